#include <doctest.h>

#include <cmath>

#include "depthforge/refine.hpp"
#include "depthforge/synth.hpp"
#include "depthforge/types.hpp"
#include "oracles.hpp"

using namespace depthforge;

TEST_CASE("render basics") {
  SUBCASE("single background plane") {
    synth::SceneSpec spec;
    spec.width = 8;
    spec.height = 6;
    synth::Layer bg;
    bg.kind = synth::Layer::Kind::Rect;
    bg.category = Category::Background;
    bg.w = 8;
    bg.h = 6;
    bg.depth = {10.0, 0.0, 0.0};
    spec.layers = {bg};
    auto [depth, mask] = synth::render(spec);
    for (std::size_t i = 0; i < depth.pixel_count(); ++i) {
      CHECK(depth.at(i) == 10.0f);
      CHECK(mask.at(i) == Category::Background);
    }
  }

  SUBCASE("later layers occlude") {
    synth::SceneSpec spec;
    spec.width = 20;
    spec.height = 20;
    synth::Layer bg;
    bg.kind = synth::Layer::Kind::Rect;
    bg.category = Category::Background;
    bg.w = 20;
    bg.h = 20;
    bg.depth = {10.0, 0.0, 0.0};
    synth::Layer disc;
    disc.kind = synth::Layer::Kind::Disc;
    disc.category = Category::Foreground;
    disc.cx = 10;
    disc.cy = 10;
    disc.r = 4;
    disc.depth = {2.0, 0.0, 0.0};
    spec.layers = {bg, disc};
    auto [depth, mask] = synth::render(spec);
    CHECK(depth.at(10, 10) == 2.0f);
    CHECK(mask.at(10, 10) == Category::Foreground);
    CHECK(depth.at(0, 0) == 10.0f);
    CHECK(mask.at(0, 0) == Category::Background);
  }

  SUBCASE("sky band wins over layers") {
    auto p = synth::preset("bleed");
    auto [depth, mask] = synth::render(p.scene);
    for (int y = 0; y < p.scene.sky_band; ++y) {
      for (int x = 0; x < p.scene.width; ++x) {
        CHECK(mask.at(x, y) == Category::Sky);
        CHECK_FALSE(depth.valid(x, y));
      }
    }
  }

  SUBCASE("deterministic") {
    auto p = synth::preset("mixed");
    auto [d1, m1] = synth::render(p.scene);
    auto [d2, m2] = synth::render(p.scene);
    for (std::size_t i = 0; i < d1.pixel_count(); ++i) {
      CHECK(d1.valid(i) == d2.valid(i));
      if (d1.valid(i)) CHECK(d1.at(i) == d2.at(i));
      CHECK(m1.at(i) == m2.at(i));
    }
  }

  SUBCASE("non-positive layer depth is rejected") {
    synth::SceneSpec spec;
    spec.width = 10;
    spec.height = 10;
    synth::Layer bad;
    bad.kind = synth::Layer::Kind::Rect;
    bad.category = Category::Background;
    bad.w = 10;
    bad.h = 10;
    bad.depth = {1.0, -0.5, 0.0};  // goes negative across the row
    spec.layers = {bad};
    CHECK_THROWS_AS(synth::render(spec), ConfigError);
  }
}

TEST_CASE("corrupt") {
  SUBCASE("zero noise emits copies of clean") {
    auto p = synth::preset("bleed");
    auto [clean, mask] = synth::render(p.scene);
    synth::NoiseSpec none;
    none.iterations = 3;
    auto iterations = synth::corrupt(clean, mask, none);
    REQUIRE(iterations.size() == 3);
    for (const auto& it : iterations) {
      for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
        CHECK(it.valid(i) == clean.valid(i));
        if (clean.valid(i)) CHECK(it.at(i) == clean.at(i));
      }
    }
  }

  SUBCASE("bleed alters exactly the inner boundary band") {
    auto p = synth::preset("bleed");
    auto [clean, mask] = synth::render(p.scene);
    auto iterations = synth::corrupt(clean, mask, p.noise);
    REQUIRE(iterations.size() == 2);
    // First iteration is unbled.
    for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
      CHECK(iterations[0].valid(i) == clean.valid(i));
      if (clean.valid(i)) CHECK(iterations[0].at(i) == clean.at(i));
    }
    // Last iteration: altered set == foreground pixels within L1 distance
    // bleed_width of a non-foreground pixel (brute-force oracle).
    std::size_t altered = 0;
    for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
      bool changed =
          clean.valid(i) != iterations[1].valid(i) ||
          (clean.valid(i) && clean.at(i) != iterations[1].at(i));
      altered += changed;
    }
    CHECK(altered == oracles::l1_boundary_band_size(mask, p.noise.bleed_width));
    // All altered pixels took the background plane's depth.
    for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
      if (clean.valid(i) && iterations[1].valid(i) &&
          clean.at(i) != iterations[1].at(i)) {
        CHECK(iterations[1].at(i) == 10.0f);
      }
    }
  }

  SUBCASE("speckle count obeys the binomial oracle") {
    auto p = synth::preset("speckle");
    auto [clean, mask] = synth::render(p.scene);
    auto iterations = synth::corrupt(clean, mask, p.noise);
    // 100x100 all valid at rate 0.01: Binomial(10000, 0.01), mean 100,
    // sigma = sqrt(10000 * 0.01 * 0.99) ~ 9.95; accept within 3 sigma.
    for (const auto& it : iterations) {
      int altered = 0;
      for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
        if (clean.valid(i) && it.at(i) != clean.at(i)) ++altered;
      }
      CHECK(altered >= 71);
      CHECK(altered <= 129);
    }
    // Speckles multiply depth by a factor in [2, 10].
    for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
      if (clean.valid(i) && iterations[0].at(i) != clean.at(i)) {
        double factor = iterations[0].at(i) / clean.at(i);
        CHECK(factor >= 2.0);
        CHECK(factor <= 10.0);
      }
    }
  }

  SUBCASE("pure function of its inputs") {
    auto p = synth::preset("mixed");
    auto [clean, mask] = synth::render(p.scene);
    auto a = synth::corrupt(clean, mask, p.noise);
    auto b = synth::corrupt(clean, mask, p.noise);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
        CHECK(a[k].valid(i) == b[k].valid(i));
        if (a[k].valid(i)) CHECK(a[k].at(i) == b[k].at(i));
      }
    }
  }
}

TEST_CASE("true_ordinal") {
  DepthMap map = DepthMap::from_data(2, 2, {10.0f, 2.0f, 5.0f, 5.0f});

  OrdinalPair far_near{0, 0, 1, 0, 1};
  CHECK(synth::true_ordinal(map, far_near) == 1);

  OrdinalPair near_far{1, 0, 0, 0, 1};
  CHECK(synth::true_ordinal(map, near_far) == -1);

  OrdinalPair equal{0, 1, 1, 1, 1};
  CHECK(synth::true_ordinal(map, equal) == 0);

  DepthMap holes(2, 2);
  holes.set(0, 0, 1.0f);
  CHECK_THROWS_AS(synth::true_ordinal(holes, far_near), std::invalid_argument);
  OrdinalPair oob{0, 0, 5, 5, 1};
  CHECK_THROWS_AS(synth::true_ordinal(map, oob), std::invalid_argument);
}

TEST_CASE("bleeding-only noise is fully undone on foreground") {
  auto p = synth::preset("bleed");
  auto [clean, mask] = synth::render(p.scene);
  auto iterations = synth::corrupt(clean, mask, p.noise);
  DepthMap out =
      refine::refine_pipeline(iterations, mask, refine::RefineConfig{});
  for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
    if (mask.at(i) != Category::Foreground) continue;
    CHECK(out.valid(i) == clean.valid(i));
    if (clean.valid(i)) CHECK(out.at(i) == clean.at(i));
  }
}
