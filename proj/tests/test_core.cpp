#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "depthforge/io.hpp"
#include "depthforge/types.hpp"
#include "oracles.hpp"

using namespace depthforge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "depthforge_core_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("to_log basics") {
  DepthMap ones = DepthMap::from_data(3, 2, {1, 1, 1, 1, 1, 1});
  LogDepthMap log_ones = to_log(ones);
  for (std::size_t i = 0; i < log_ones.pixel_count(); ++i) {
    CHECK(log_ones.valid(i));
    CHECK(log_ones.at(i) == 0.0);
  }

  const float e = std::exp(1.0f);
  DepthMap map = DepthMap::from_data(2, 1, {e, 1.0f});
  LogDepthMap lg = to_log(map);
  CHECK(lg.at(0, 0) == doctest::Approx(1.0).epsilon(1e-7));

  // Validity travels with the data.
  const float nan = std::numeric_limits<float>::quiet_NaN();
  DepthMap holes = DepthMap::from_data(3, 3, {1, nan, 2, 3, nan, 4, nan, 5, 6});
  LogDepthMap lh = to_log(holes);
  int invalid = 0;
  for (std::size_t i = 0; i < lh.pixel_count(); ++i) {
    if (!lh.valid(i)) {
      ++invalid;
      CHECK_FALSE(holes.valid(i));
    }
  }
  CHECK(invalid == 3);
}

TEST_CASE("to_log then exp is identity on valid pixels") {
  std::mt19937_64 rng(7);
  DepthMap map = oracles::random_depth_map(rng, 13, 9, 0.8);
  DepthMap back = from_log(to_log(map));
  for (std::size_t i = 0; i < map.pixel_count(); ++i) {
    CHECK(map.valid(i) == back.valid(i));
    if (map.valid(i)) {
      double rel = std::abs(back.at(i) - map.at(i)) / map.at(i);
      CHECK(rel <= 1e-6);
    }
  }
}

TEST_CASE("valid_fraction") {
  SemanticCategoryMask mask(10, 10, Category::Background);
  DepthMap map(10, 10);
  for (std::size_t i = 0; i < map.pixel_count(); ++i) map.set(i, 5.0f);
  CHECK(valid_fraction(map, mask) == 1.0);

  // 30 valid of 100 non-sky.
  DepthMap sparse(10, 10);
  for (std::size_t i = 0; i < 30; ++i) sparse.set(i, 2.0f);
  CHECK(valid_fraction(sparse, mask) == doctest::Approx(0.30));

  SemanticCategoryMask sky(10, 10, Category::Sky);
  CHECK(valid_fraction(map, sky) == 0.0);

  SemanticCategoryMask small(4, 4);
  CHECK_THROWS_AS(valid_fraction(map, small), DimensionError);
}

TEST_CASE("valid_fraction ignores sky pixels on both sides") {
  SemanticCategoryMask mask(4, 4, Category::Background);
  DepthMap map(4, 4);
  for (int x = 0; x < 4; ++x) {
    mask.set(x, 0, Category::Sky);
    map.set(x, 0, 3.0f);  // valid depth under sky must not count
  }
  map.set(0, 1, 2.0f);
  map.set(1, 1, 2.0f);
  map.set(2, 1, 2.0f);
  CHECK(valid_fraction(map, mask) == doctest::Approx(3.0 / 12.0));
}

TEST_CASE("depth file round-trip is bit-exact") {
  std::mt19937_64 rng(21);
  auto dir = temp_dir();
  for (int trial = 0; trial < 5; ++trial) {
    DepthMap map = oracles::random_depth_map(rng, 17, 11, 0.7);
    auto path = (dir / ("rt_" + std::to_string(trial) + ".dfd")).string();
    write_depth(map, path);
    DepthMap back = read_depth(path);
    REQUIRE(back.same_shape(map));
    for (std::size_t i = 0; i < map.pixel_count(); ++i) {
      CHECK(map.valid(i) == back.valid(i));
      if (map.valid(i)) CHECK(map.at(i) == back.at(i));
    }
    // Byte-for-byte: a second write emits the identical file.
    auto path2 = (dir / "rt_again.dfd").string();
    write_depth(back, path2);
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)),
                   std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)),
                   std::istreambuf_iterator<char>());
    CHECK(sa == sb);
  }
}

TEST_CASE("depth file error paths") {
  auto dir = temp_dir();
  auto path = (dir / "bad.dfd").string();

  {
    std::ofstream out(path, std::ios::binary);
    out << "XXXX";
  }
  CHECK_THROWS_AS(read_depth(path), FormatError);

  {
    DepthMap map = DepthMap::from_data(2, 2, {1, 2, 3, 4});
    write_depth(map, path);
    // Chop the payload.
    auto bytes = [&] {
      std::ifstream in(path, std::ios::binary);
      return std::string((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    }();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 3));
  }
  CHECK_THROWS_AS(read_depth(path), FormatError);

  {
    // +inf payload is a format error; NaN reads as an invalid pixel.
    std::string bytes;
    bytes.append("DFD1", 4);
    auto put_u32 = [&](std::uint32_t v) {
      for (int k = 0; k < 4; ++k) bytes.push_back(char((v >> (8 * k)) & 0xff));
    };
    put_u32(2);
    put_u32(1);
    put_u32(0x7f800000u);  // +inf
    put_u32(0x3f800000u);  // 1.0f
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(read_depth(path), FormatError);

  {
    std::string bytes;
    bytes.append("DFD1", 4);
    auto put_u32 = [&](std::uint32_t v) {
      for (int k = 0; k < 4; ++k) bytes.push_back(char((v >> (8 * k)) & 0xff));
    };
    put_u32(2);
    put_u32(1);
    put_u32(0x7fc00000u);  // quiet NaN -> invalid pixel
    put_u32(0x40000000u);  // 2.0f
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  DepthMap read_back = read_depth(path);
  CHECK_FALSE(read_back.valid(0, 0));
  CHECK(read_back.at(1, 0) == 2.0f);
}

TEST_CASE("mask files and raw semantic conversion") {
  auto dir = temp_dir();
  SemanticCategoryMask mask(5, 4, Category::Background);
  mask.set(0, 0, Category::Sky);
  mask.set(1, 1, Category::Foreground);
  mask.set(2, 2, Category::Unknown);
  auto path = (dir / "m.dfm").string();
  write_mask(mask, path);
  SemanticCategoryMask back = read_mask(path);
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    CHECK(mask.at(i) == back.at(i));
  }

  RawSemanticMap raw;
  raw.width = 3;
  raw.height = 1;
  raw.class_ids = {2, 12, 77};  // sky, person, unmapped
  auto raw_path = (dir / "m.dfs").string();
  write_raw_semantic(raw, raw_path);
  SemanticCategoryMask converted =
      read_mask_auto(raw_path, default_category_mapping());
  CHECK(converted.at(0, 0) == Category::Sky);
  CHECK(converted.at(1, 0) == Category::Foreground);
  CHECK(converted.at(2, 0) == Category::Unknown);

  // read_mask_auto also takes DFM1 directly.
  SemanticCategoryMask direct = read_mask_auto(path, default_category_mapping());
  CHECK(direct.at(1, 1) == Category::Foreground);
}

TEST_CASE("category mapping text format") {
  CategoryMapping m = parse_category_mapping(
      "# comment\n"
      "SKY\t2\n"
      "FOREGROUND\t12, 20\n"
      "BACKGROUND\t0,1\n");
  CHECK(m.lookup(2) == Category::Sky);
  CHECK(m.lookup(12) == Category::Foreground);
  CHECK(m.lookup(20) == Category::Foreground);
  CHECK(m.lookup(1) == Category::Background);
  CHECK(m.lookup(99) == Category::Unknown);

  CHECK_THROWS_AS(parse_category_mapping("SKY\t2\nFOREGROUND\t2\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_category_mapping("SKY 2\n"), FormatError);
  CHECK_THROWS_AS(parse_category_mapping("SKY\t200\n"), ConfigError);

  // Round-trip through the formatter.
  CategoryMapping again = parse_category_mapping(format_category_mapping(m));
  for (int id = 0; id < 256; ++id) {
    CHECK(again.lookup(static_cast<std::uint8_t>(id)) ==
          m.lookup(static_cast<std::uint8_t>(id)));
  }
}

TEST_CASE("manifest json lines") {
  ImageRecord r;
  r.image_id = "img_0001";
  r.depth_path = "a.dfd;b.dfd";
  r.mask_path = "m.dfm";
  r.curation_verdict = Verdict::Euclidean;
  r.valid_fraction = 0.42;
  r.provenance = "refine | curate";
  ImageRecord back = record_from_json_line(record_to_json_line(r));
  CHECK(back.image_id == r.image_id);
  CHECK(back.depth_path == r.depth_path);
  CHECK(back.mask_path == r.mask_path);
  CHECK(back.curation_verdict == Verdict::Euclidean);
  CHECK(back.valid_fraction == doctest::Approx(0.42));
  CHECK(back.provenance == r.provenance);

  ImageRecord blank;
  blank.image_id = "x";
  ImageRecord blank_back = record_from_json_line(record_to_json_line(blank));
  CHECK_FALSE(blank_back.curation_verdict.has_value());
  CHECK_FALSE(blank_back.valid_fraction.has_value());

  CHECK_THROWS_AS(record_from_json_line("not json"), FormatError);
  CHECK_THROWS_AS(record_from_json_line("{\"image_id\": \"x\"}"), FormatError);
}

TEST_CASE("ordinal pair csv") {
  auto dir = temp_dir();
  auto path = (dir / "pairs.csv").string();
  std::vector<OrdinalPairRow> rows;
  rows.push_back({"img", {1, 2, 3, 4, 1}, 1.0});
  rows.push_back({"img", {5, 6, 7, 8, -1}, 1.0});
  write_ordinal_pairs(rows, path);
  auto back = read_ordinal_pairs(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].pair.ix == 1);
  CHECK(back[0].pair.relation == 1);
  CHECK(back[1].pair.relation == -1);
  CHECK(back[1].weight == 1.0);

  // Optional weight column.
  {
    std::ofstream out(path);
    out << "image_id,ix,iy,jx,jy,r,w\n";
    out << "img,0,0,1,1,1,0.5\n";
  }
  auto weighted = read_ordinal_pairs(path);
  REQUIRE(weighted.size() == 1);
  CHECK(weighted[0].weight == doctest::Approx(0.5));

  {
    std::ofstream out(path);
    out << "wrong,header\n";
  }
  CHECK_THROWS_AS(read_ordinal_pairs(path), FormatError);

  {
    std::ofstream out(path);
    out << "image_id,ix,iy,jx,jy,r\n";
    out << "img,0,0,0,0,1\n";  // degenerate pair
  }
  CHECK_THROWS_AS(read_ordinal_pairs(path), FormatError);

  {
    std::ofstream out(path);
    out << "image_id,ix,iy,jx,jy,r\n";
    out << "img,0,0,1,1,2\n";  // bad relation
  }
  CHECK_THROWS_AS(read_ordinal_pairs(path), FormatError);
}

TEST_CASE("valid_fraction is permutation invariant") {
  std::mt19937_64 rng(99);
  DepthMap map = oracles::random_depth_map(rng, 8, 8, 0.5);
  SemanticCategoryMask mask(8, 8, Category::Background);
  for (std::size_t i = 0; i < mask.pixel_count(); ++i) {
    if ((rng() & 7) == 0) mask.set(i, Category::Sky);
  }
  double base = valid_fraction(map, mask);

  // Shuffle pixel order identically in both grids.
  std::vector<std::size_t> perm(map.pixel_count());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  DepthMap pm(8, 8);
  SemanticCategoryMask pk(8, 8);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    pm.set(i, map.at(perm[i]));
    pk.set(i, mask.at(perm[i]));
  }
  CHECK(valid_fraction(pm, pk) == base);
}
