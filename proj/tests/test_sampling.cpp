#include <doctest.h>

#include "coreks/sampling.hpp"

using namespace coreks;

TEST_CASE("R = 1 yields a fully sampled mask") {
  SamplingMask m = make_gro_mask(32, 3, 1.0, 5);
  CHECK(m.count() == 32u * 3);
  CHECK(m.r_achieved() == 1.0);
  m.validate();
}

TEST_CASE("128 lines at R = 2.2 selects 58 per frame") {
  SamplingMask m = make_gro_mask(128, 1, 2.2, 7);
  CHECK(m.count() >= 56u);
  CHECK(m.count() <= 60u);
  CHECK(m.count() == 58u);  // round(128/2.2)
  CHECK(std::abs(m.r_achieved() - 2.2) <= 0.05 * 2.2);
  m.validate();
}

TEST_CASE("deterministic in the seed, distinct across seeds and frames") {
  SamplingMask a = make_gro_mask(64, 4, 3.0, 11);
  SamplingMask b = make_gro_mask(64, 4, 3.0, 11);
  CHECK(a.selected == b.selected);

  SamplingMask c = make_gro_mask(64, 4, 3.0, 12);
  CHECK(a.selected != c.selected);

  // Golden-ratio frame offsets shift the pattern between frames.
  bool frames_differ = false;
  for (int y = 0; y < 64 && !frames_differ; ++y)
    frames_differ = a.is_selected(y, 0) != a.is_selected(y, 1);
  CHECK(frames_differ);
}

TEST_CASE("line density is center weighted") {
  SamplingMask m = make_gro_mask(256, 8, 4.0, 3);
  size_t center = 0, edge = 0;
  for (int t = 0; t < 8; ++t)
    for (int y = 0; y < 256; ++y) {
      if (!m.is_selected(y, t)) continue;
      if (y >= 96 && y < 160) ++center;
      if (y < 32 || y >= 224) ++edge;
    }
  // Equal-width center and edge windows; the warp should favor the center.
  CHECK(center > edge * 2);
}

TEST_CASE("invalid parameters are configuration errors") {
  CHECK_THROWS_AS(make_gro_mask(16, 1, 17.0, 0), config_error);
  CHECK_THROWS_AS(make_gro_mask(16, 1, 0.5, 0), config_error);
  CHECK_THROWS_AS(make_gro_mask(0, 1, 1.0, 0), config_error);
}
