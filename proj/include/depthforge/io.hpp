#pragma once

#include <string>
#include <vector>

#include "depthforge/types.hpp"

namespace depthforge {

// Binary grid containers. All integers little-endian.
//   "DFD1"  u32 width  u32 height  width*height float32 row-major (NaN = invalid)
//   "DFM1"  u32 width  u32 height  width*height u8 category codes
//   "DFS1"  u32 width  u32 height  width*height u8 raw class ids

DepthMap read_depth(const std::string& path);
void write_depth(const DepthMap& map, const std::string& path);

// Same container as DFD1 but values pass through untouched (used for
// gradient grids and other signed data). NaN still reads as NaN.
struct RawGrid {
  int width = 0;
  int height = 0;
  std::vector<float> values;
};
RawGrid read_grid(const std::string& path);
void write_grid(int width, int height, const std::vector<float>& values,
                const std::string& path);

SemanticCategoryMask read_mask(const std::string& path);
void write_mask(const SemanticCategoryMask& mask, const std::string& path);

struct RawSemanticMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> class_ids;
};
RawSemanticMap read_raw_semantic(const std::string& path);
void write_raw_semantic(const RawSemanticMap& map, const std::string& path);

// Loads either a DFM1 category mask directly or a DFS1 raw map converted
// through the mapping, keyed off the magic bytes.
SemanticCategoryMask read_mask_auto(const std::string& path,
                                    const CategoryMapping& mapping);

// Mapping file: UTF-8 text, one entry per line,
//   <CATEGORY-NAME> <TAB> <comma-separated raw ids>
// Blank lines and lines starting with '#' are skipped.
CategoryMapping parse_category_mapping(const std::string& text);
CategoryMapping read_category_mapping(const std::string& path);
std::string format_category_mapping(const CategoryMapping& mapping);

// Manifest: JSON lines, one ImageRecord per line.
std::vector<ImageRecord> read_manifest(const std::string& path);
void write_manifest(const std::vector<ImageRecord>& records,
                    const std::string& path);
void append_manifest_line(const ImageRecord& record, const std::string& path);
std::string record_to_json_line(const ImageRecord& record);
ImageRecord record_from_json_line(const std::string& line);

// Ordinal pair table: CSV with header image_id,ix,iy,jx,jy,r and an
// optional trailing w column holding per-pair weights.
std::vector<OrdinalPairRow> read_ordinal_pairs(const std::string& path);
void write_ordinal_pairs(const std::vector<OrdinalPairRow>& rows,
                         const std::string& path);

}  // namespace depthforge
