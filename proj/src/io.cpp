#include "depthforge/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace depthforge {

namespace {

using json = nlohmann::ordered_json;

// Canonical quiet-NaN payload so rewriting a map is byte-stable.
constexpr std::uint32_t kNanBits = 0x7fc00000u;

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const std::string& buf, std::size_t off) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + 1]))
          << 8) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + 2]))
          << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + 3]))
          << 24);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path);
}

struct GridHeader {
  int width;
  int height;
  std::size_t payload_offset;
};

GridHeader parse_header(const std::string& buf, const char* magic,
                        std::size_t elem_size, const std::string& path) {
  if (buf.size() < 12 || std::memcmp(buf.data(), magic, 4) != 0) {
    throw FormatError("bad magic in " + path);
  }
  std::uint32_t w = get_u32(buf, 4);
  std::uint32_t h = get_u32(buf, 8);
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) {
    throw FormatError("implausible dimensions in " + path);
  }
  std::size_t expect = 12 + std::size_t(w) * h * elem_size;
  if (buf.size() != expect) {
    throw FormatError("truncated payload in " + path);
  }
  return {static_cast<int>(w), static_cast<int>(h), 12};
}

std::vector<float> parse_floats(const std::string& buf, std::size_t off,
                                std::size_t count) {
  std::vector<float> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = get_u32(buf, off + i * 4);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

}  // namespace

DepthMap read_depth(const std::string& path) {
  std::string buf = slurp(path);
  GridHeader hd = parse_header(buf, "DFD1", 4, path);
  std::size_t n = std::size_t(hd.width) * hd.height;
  std::vector<float> values = parse_floats(buf, hd.payload_offset, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isinf(values[i])) {
      throw FormatError("non-finite non-sentinel value in " + path);
    }
  }
  return DepthMap::from_data(hd.width, hd.height, std::move(values));
}

void write_depth(const DepthMap& map, const std::string& path) {
  std::string out;
  out.reserve(12 + map.pixel_count() * 4);
  out.append("DFD1", 4);
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  for (std::size_t i = 0; i < map.pixel_count(); ++i) {
    std::uint32_t bits =
        map.valid(i) ? std::bit_cast<std::uint32_t>(map.at(i)) : kNanBits;
    put_u32(out, bits);
  }
  spit(path, out);
}

RawGrid read_grid(const std::string& path) {
  std::string buf = slurp(path);
  GridHeader hd = parse_header(buf, "DFD1", 4, path);
  std::size_t n = std::size_t(hd.width) * hd.height;
  return {hd.width, hd.height, parse_floats(buf, hd.payload_offset, n)};
}

void write_grid(int width, int height, const std::vector<float>& values,
                const std::string& path) {
  if (values.size() != std::size_t(width) * height) {
    throw DimensionError("grid payload length does not match shape");
  }
  std::string out;
  out.reserve(12 + values.size() * 4);
  out.append("DFD1", 4);
  put_u32(out, static_cast<std::uint32_t>(width));
  put_u32(out, static_cast<std::uint32_t>(height));
  for (float v : values) {
    put_u32(out, std::isnan(v) ? kNanBits : std::bit_cast<std::uint32_t>(v));
  }
  spit(path, out);
}

SemanticCategoryMask read_mask(const std::string& path) {
  std::string buf = slurp(path);
  GridHeader hd = parse_header(buf, "DFM1", 1, path);
  std::size_t n = std::size_t(hd.width) * hd.height;
  std::vector<std::uint8_t> codes(n);
  std::memcpy(codes.data(), buf.data() + hd.payload_offset, n);
  return SemanticCategoryMask::from_codes(hd.width, hd.height, codes);
}

void write_mask(const SemanticCategoryMask& mask, const std::string& path) {
  std::string out;
  out.reserve(12 + mask.pixel_count());
  out.append("DFM1", 4);
  put_u32(out, static_cast<std::uint32_t>(mask.width()));
  put_u32(out, static_cast<std::uint32_t>(mask.height()));
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    out.push_back(static_cast<char>(static_cast<std::uint8_t>(mask.at(i))));
  }
  spit(path, out);
}

RawSemanticMap read_raw_semantic(const std::string& path) {
  std::string buf = slurp(path);
  GridHeader hd = parse_header(buf, "DFS1", 1, path);
  std::size_t n = std::size_t(hd.width) * hd.height;
  RawSemanticMap out;
  out.width = hd.width;
  out.height = hd.height;
  out.class_ids.resize(n);
  std::memcpy(out.class_ids.data(), buf.data() + hd.payload_offset, n);
  return out;
}

void write_raw_semantic(const RawSemanticMap& map, const std::string& path) {
  if (map.class_ids.size() != std::size_t(map.width) * map.height) {
    throw DimensionError("raw semantic payload length does not match shape");
  }
  std::string out;
  out.append("DFS1", 4);
  put_u32(out, static_cast<std::uint32_t>(map.width));
  put_u32(out, static_cast<std::uint32_t>(map.height));
  for (std::uint8_t id : map.class_ids) out.push_back(static_cast<char>(id));
  spit(path, out);
}

SemanticCategoryMask read_mask_auto(const std::string& path,
                                    const CategoryMapping& mapping) {
  std::string buf = slurp(path);
  if (buf.size() >= 4 && std::memcmp(buf.data(), "DFM1", 4) == 0) {
    return read_mask(path);
  }
  RawSemanticMap raw = read_raw_semantic(path);
  return mapping.apply(raw.width, raw.height, raw.class_ids);
}

CategoryMapping parse_category_mapping(const std::string& text) {
  CategoryMapping mapping;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("mapping line " + std::to_string(lineno) +
                        ": missing tab separator");
    }
    auto category = category_from_name(line.substr(0, tab));
    if (!category) {
      throw FormatError("mapping line " + std::to_string(lineno) +
                        ": unknown category name");
    }
    std::istringstream ids(line.substr(tab + 1));
    std::string tok;
    while (std::getline(ids, tok, ',')) {
      std::size_t pos = 0;
      int id;
      try {
        id = std::stoi(tok, &pos);
      } catch (const std::exception&) {
        throw FormatError("mapping line " + std::to_string(lineno) +
                          ": bad class id '" + tok + "'");
      }
      while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
      if (pos != tok.size()) {
        throw FormatError("mapping line " + std::to_string(lineno) +
                          ": bad class id '" + tok + "'");
      }
      mapping.assign(id, *category);
    }
  }
  return mapping;
}

CategoryMapping read_category_mapping(const std::string& path) {
  return parse_category_mapping(slurp(path));
}

std::string format_category_mapping(const CategoryMapping& mapping) {
  // Group preserved-order entries by category, categories in code order.
  std::string out;
  for (Category c : {Category::Sky, Category::Foreground, Category::Background,
                     Category::Unknown}) {
    std::string ids;
    for (const auto& [id, cat] : mapping.entries()) {
      if (cat != c) continue;
      if (!ids.empty()) ids += ',';
      ids += std::to_string(id);
    }
    if (ids.empty()) continue;
    out += category_name(c);
    out += '\t';
    out += ids;
    out += '\n';
  }
  return out;
}

std::string record_to_json_line(const ImageRecord& record) {
  json j;
  j["image_id"] = record.image_id;
  j["depth_path"] = record.depth_path;
  j["mask_path"] = record.mask_path;
  if (record.curation_verdict) {
    j["curation_verdict"] = verdict_name(*record.curation_verdict);
  } else {
    j["curation_verdict"] = nullptr;
  }
  if (record.valid_fraction) {
    j["valid_fraction"] = *record.valid_fraction;
  } else {
    j["valid_fraction"] = nullptr;
  }
  j["provenance"] = record.provenance;
  return j.dump();
}

ImageRecord record_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad manifest line: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("manifest line is not an object");
  ImageRecord r;
  try {
    r.image_id = j.at("image_id").get<std::string>();
    r.depth_path = j.at("depth_path").get<std::string>();
    r.mask_path = j.at("mask_path").get<std::string>();
    if (j.contains("curation_verdict") && !j["curation_verdict"].is_null()) {
      auto v = verdict_from_name(j["curation_verdict"].get<std::string>());
      if (!v) throw FormatError("unknown curation_verdict");
      r.curation_verdict = *v;
    }
    if (j.contains("valid_fraction") && !j["valid_fraction"].is_null()) {
      r.valid_fraction = j["valid_fraction"].get<double>();
    }
    if (j.contains("provenance") && !j["provenance"].is_null()) {
      r.provenance = j["provenance"].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad manifest line: ") + e.what());
  }
  return r;
}

std::vector<ImageRecord> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<ImageRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    records.push_back(record_from_json_line(line));
  }
  return records;
}

void write_manifest(const std::vector<ImageRecord>& records,
                    const std::string& path) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json_line(r);
    out += '\n';
  }
  spit(path, out);
}

void append_manifest_line(const ImageRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw FormatError("cannot append to " + path);
  out << record_to_json_line(record) << '\n';
}

std::vector<OrdinalPairRow> read_ordinal_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty pair file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool has_weight = false;
  if (line == "image_id,ix,iy,jx,jy,r") {
    has_weight = false;
  } else if (line == "image_id,ix,iy,jx,jy,r,w") {
    has_weight = true;
  } else {
    throw FormatError("bad pair CSV header in " + path);
  }
  std::vector<OrdinalPairRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    std::size_t expect = has_weight ? 7u : 6u;
    if (fields.size() != expect) {
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": wrong field count");
    }
    OrdinalPairRow row;
    row.image_id = fields[0];
    try {
      row.pair.ix = std::stoi(fields[1]);
      row.pair.iy = std::stoi(fields[2]);
      row.pair.jx = std::stoi(fields[3]);
      row.pair.jy = std::stoi(fields[4]);
      row.pair.relation = std::stoi(fields[5]);
      if (has_weight) row.weight = std::stod(fields[6]);
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": bad number");
    }
    if (row.pair.relation != 1 && row.pair.relation != -1) {
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": relation must be 1 or -1");
    }
    if (row.pair.same_pixels()) {
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": pair references one pixel twice");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ordinal_pairs(const std::vector<OrdinalPairRow>& rows,
                         const std::string& path) {
  bool any_weight = false;
  for (const auto& r : rows) {
    if (r.weight != 1.0) any_weight = true;
  }
  std::ostringstream out;
  out << (any_weight ? "image_id,ix,iy,jx,jy,r,w" : "image_id,ix,iy,jx,jy,r")
      << '\n';
  for (const auto& r : rows) {
    out << r.image_id << ',' << r.pair.ix << ',' << r.pair.iy << ','
        << r.pair.jx << ',' << r.pair.jy << ',' << r.pair.relation;
    if (any_weight) out << ',' << r.weight;
    out << '\n';
  }
  spit(path, out.str());
}

}  // namespace depthforge
