#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "depthforge/refine.hpp"
#include "depthforge/synth.hpp"
#include "depthforge/types.hpp"
#include "oracles.hpp"

using namespace depthforge;
using refine::RefineConfig;

namespace {

constexpr float kNan = std::numeric_limits<float>::quiet_NaN();

}  // namespace

TEST_CASE("keep_closer_fuse") {
  DepthMap a = DepthMap::from_data(2, 1, {5.0f, kNan});
  DepthMap b = DepthMap::from_data(2, 1, {3.0f, 7.0f});

  SUBCASE("single map is identity") {
    DepthMap out = refine::keep_closer_fuse({a});
    CHECK(out.at(0, 0) == 5.0f);
    CHECK_FALSE(out.valid(1, 0));
  }
  SUBCASE("minimum wins, validity is the union") {
    DepthMap out = refine::keep_closer_fuse({a, b});
    CHECK(out.at(0, 0) == 3.0f);
    CHECK(out.at(1, 0) == 7.0f);  // valid only in the second iteration
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(refine::keep_closer_fuse({}), DimensionError);
    DepthMap small(3, 3);
    CHECK_THROWS_AS(refine::keep_closer_fuse({a, small}), DimensionError);
  }
}

TEST_CASE("keep_closer_fuse properties: pointwise min, order independent") {
  std::mt19937_64 rng(31);
  std::vector<DepthMap> maps;
  for (int k = 0; k < 4; ++k) {
    maps.push_back(oracles::random_depth_map(rng, 9, 7, 0.6));
  }
  DepthMap fused = refine::keep_closer_fuse(maps);
  for (std::size_t i = 0; i < fused.pixel_count(); ++i) {
    float expect = std::numeric_limits<float>::infinity();
    bool any = false;
    for (const auto& m : maps) {
      if (m.valid(i)) {
        expect = std::min(expect, m.at(i));
        any = true;
      }
    }
    CHECK(fused.valid(i) == any);
    if (any) CHECK(fused.at(i) == expect);
    for (const auto& m : maps) {
      if (m.valid(i) && fused.valid(i)) CHECK(fused.at(i) <= m.at(i));
    }
  }

  std::vector<DepthMap> shuffled = {maps[2], maps[0], maps[3], maps[1]};
  DepthMap fused2 = refine::keep_closer_fuse(shuffled);
  for (std::size_t i = 0; i < fused.pixel_count(); ++i) {
    CHECK(fused.valid(i) == fused2.valid(i));
    if (fused.valid(i)) CHECK(fused.at(i) == fused2.at(i));
  }
}

TEST_CASE("median_stabilize") {
  RefineConfig cfg;

  SUBCASE("constant map is untouched") {
    DepthMap map(6, 6);
    for (std::size_t i = 0; i < map.pixel_count(); ++i) map.set(i, 4.0f);
    DepthMap out = refine::median_stabilize(map, cfg);
    for (std::size_t i = 0; i < map.pixel_count(); ++i) {
      CHECK(out.at(i) == 4.0f);
    }
  }

  SUBCASE("speckle 10x its neighbors is invalidated, neighbors kept") {
    // 3x3 patch, center ten times the rest, kernel window covers everything.
    DepthMap map = DepthMap::from_data(3, 3, {1, 1, 1, 1, 10, 1, 1, 1, 1});
    DepthMap out = refine::median_stabilize(map, cfg);
    CHECK_FALSE(out.valid(1, 1));
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        if (x == 1 && y == 1) continue;
        CHECK(out.at(x, y) == 1.0f);
      }
    }
  }

  SUBCASE("isolated pixel stays") {
    DepthMap map(7, 7);
    map.set(3, 3, 9.0f);
    DepthMap out = refine::median_stabilize(map, cfg);
    CHECK(out.at(3, 3) == 9.0f);
  }

  SUBCASE("validity never grows, twice-applied never re-validates") {
    std::mt19937_64 rng(11);
    DepthMap map = oracles::random_depth_map(rng, 12, 12, 0.8, 1.0, 3.0);
    DepthMap once = refine::median_stabilize(map, cfg);
    DepthMap twice = refine::median_stabilize(once, cfg);
    for (std::size_t i = 0; i < map.pixel_count(); ++i) {
      if (!map.valid(i)) CHECK_FALSE(once.valid(i));
      if (!once.valid(i)) CHECK_FALSE(twice.valid(i));
      if (once.valid(i)) CHECK(once.at(i) == map.at(i));  // values untouched
    }
  }

  SUBCASE("config validation") {
    RefineConfig bad = cfg;
    bad.median_kernel = 4;
    CHECK_THROWS_AS(refine::median_stabilize(DepthMap(3, 3), bad),
                    ConfigError);
    bad = cfg;
    bad.instability_rel_tol = 0.0;
    CHECK_THROWS_AS(refine::median_stabilize(DepthMap(3, 3), bad),
                    ConfigError);
  }
}

TEST_CASE("semantic_filter") {
  RefineConfig cfg;
  // Two foreground blobs on a 10x6 background; left blob 40% valid,
  // right blob 80% valid.
  SemanticCategoryMask mask(10, 6, Category::Background);
  DepthMap map(10, 6);
  for (std::size_t i = 0; i < map.pixel_count(); ++i) map.set(i, 5.0f);
  // Left blob: 5 pixels, 2 valid.
  const int left[][2] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}, {1, 3}};
  for (auto& p : left) mask.set(p[0], p[1], Category::Foreground);
  map.invalidate(1, 1);
  map.invalidate(2, 1);
  map.invalidate(1, 2);
  // Right blob: 5 pixels, 4 valid.
  const int right[][2] = {{7, 1}, {8, 1}, {7, 2}, {8, 2}, {7, 3}};
  for (auto& p : right) mask.set(p[0], p[1], Category::Foreground);
  map.invalidate(7, 1);

  DepthMap out = refine::semantic_filter(map, mask, cfg);
  // 2/5 = 40% < 50%: left blob cleared.
  for (auto& p : left) CHECK_FALSE(out.valid(p[0], p[1]));
  // 4/5 = 80%: right blob untouched.
  CHECK(out.valid(8, 1));
  CHECK(out.at(7, 2) == 5.0f);
  CHECK_FALSE(out.valid(7, 1));  // was already invalid
  // Background depths never touched.
  CHECK(out.at(0, 0) == 5.0f);
  CHECK(out.at(9, 5) == 5.0f);

  SUBCASE("no foreground means no change") {
    SemanticCategoryMask bg(10, 6, Category::Background);
    DepthMap out2 = refine::semantic_filter(map, bg, cfg);
    for (std::size_t i = 0; i < map.pixel_count(); ++i) {
      CHECK(map.valid(i) == out2.valid(i));
    }
  }

  SUBCASE("exactly at the threshold is kept") {
    // 4-pixel blob with 2 valid = 50%, not < 50%.
    SemanticCategoryMask m2(4, 4, Category::Background);
    DepthMap d2(4, 4);
    m2.set(1, 1, Category::Foreground);
    m2.set(2, 1, Category::Foreground);
    m2.set(1, 2, Category::Foreground);
    m2.set(2, 2, Category::Foreground);
    d2.set(1, 1, 3.0f);
    d2.set(2, 1, 3.0f);
    DepthMap out2 = refine::semantic_filter(d2, m2, cfg);
    CHECK(out2.valid(1, 1));
    CHECK(out2.valid(2, 1));
  }

  SUBCASE("idempotent") {
    DepthMap again = refine::semantic_filter(out, mask, cfg);
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
      CHECK(out.valid(i) == again.valid(i));
    }
  }

  SUBCASE("diagonal blobs are separate components") {
    SemanticCategoryMask m2(4, 4, Category::Background);
    DepthMap d2(4, 4);
    m2.set(0, 0, Category::Foreground);  // fully valid
    m2.set(1, 1, Category::Foreground);  // invalid depth
    d2.set(0, 0, 2.0f);
    DepthMap out2 = refine::semantic_filter(d2, m2, cfg);
    CHECK(out2.valid(0, 0));  // its own component at 100%
  }
}

TEST_CASE("remove_sky") {
  SemanticCategoryMask mask(5, 5, Category::Background);
  DepthMap map(5, 5);
  for (std::size_t i = 0; i < map.pixel_count(); ++i) map.set(i, 2.0f);

  SUBCASE("all sky clears everything") {
    SemanticCategoryMask sky(5, 5, Category::Sky);
    DepthMap out = refine::remove_sky(map, sky);
    CHECK(out.valid_count() == 0);
  }
  SUBCASE("no sky changes nothing") {
    DepthMap out = refine::remove_sky(map, mask);
    CHECK(out.valid_count() == map.pixel_count());
  }
  SUBCASE("exactly the sky pixels are dropped") {
    int sky_pixels = 0;
    for (int x = 0; x < 5; ++x) {
      mask.set(x, 0, Category::Sky);
      mask.set(x, 1, Category::Sky);
      sky_pixels += 2;
    }
    DepthMap out = refine::remove_sky(map, mask);
    CHECK(out.valid_count() == map.pixel_count() - sky_pixels);
    for (std::size_t i = 0; i < map.pixel_count(); ++i) {
      CHECK(out.valid(i) == (mask.at(i) != Category::Sky));
    }
    // Idempotent.
    DepthMap again = refine::remove_sky(out, mask);
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
      CHECK(out.valid(i) == again.valid(i));
    }
  }
}

TEST_CASE("refine_pipeline on synthetic fixtures") {
  RefineConfig cfg;

  SUBCASE("noise-free scene passes through minus sky") {
    auto p = synth::preset("bleed");
    auto [clean, mask] = synth::render(p.scene);
    synth::NoiseSpec none;
    none.iterations = 3;
    auto iterations = synth::corrupt(clean, mask, none);
    DepthMap out = refine::refine_pipeline(iterations, mask, cfg);
    for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
      CHECK(out.valid(i) == clean.valid(i));
      if (clean.valid(i)) CHECK(out.at(i) == clean.at(i));
    }
  }

  SUBCASE("bleeding: refined error never exceeds raw, beats it somewhere") {
    auto p = synth::preset("bleed");
    auto [clean, mask] = synth::render(p.scene);
    auto iterations = synth::corrupt(clean, mask, p.noise);
    const DepthMap& raw = iterations.back();  // fully bled iteration
    DepthMap out = refine::refine_pipeline(iterations, mask, cfg);
    bool strictly_better_somewhere = false;
    for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
      if (!clean.valid(i) || !raw.valid(i) || !out.valid(i)) continue;
      double truth = std::log(clean.at(i));
      double err_raw = std::abs(std::log(raw.at(i)) - truth);
      double err_ref = std::abs(std::log(out.at(i)) - truth);
      CHECK(err_ref <= err_raw + 1e-12);
      if (err_ref < err_raw - 1e-9) strictly_better_somewhere = true;
    }
    CHECK(strictly_better_somewhere);
  }

  SUBCASE("transient component with sparse spurious depth is wiped") {
    auto p = synth::preset("transient");
    auto [clean, mask] = synth::render(p.scene);
    auto iterations = synth::corrupt(clean, mask, p.noise);
    DepthMap out = refine::refine_pipeline(iterations, mask, cfg);
    // The person rectangle is the largest foreground component.
    int person_valid = 0;
    for (int y = 30; y < 60; ++y) {
      for (int x = 38; x < 52; ++x) {
        if (out.valid(x, y)) ++person_valid;
      }
    }
    CHECK(person_valid == 0);
    // The statue survives.
    CHECK(out.valid(18, 40));
  }
}
