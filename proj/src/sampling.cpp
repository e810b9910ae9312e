#include "coreks/sampling.hpp"

#include <cmath>

#include "coreks/rng.hpp"

namespace coreks {
namespace {

constexpr double kGolden = 0.618033988749894848;
constexpr double kDensity = 0.6;  // center weighting strength, in (0, 1)

double frac(double v) { return v - std::floor(v); }

// Inverse CDF of p(u) = 1 + kDensity*cos(2*pi*(u - 0.5)); maps the uniform
// golden-ratio sequence to a center-weighted line position.
double warp(double u) {
  double w = u;
  for (int it = 0; it < 24; ++it) {
    double f = w + kDensity / (2.0 * M_PI) * std::sin(2.0 * M_PI * (w - 0.5)) - u;
    double fp = 1.0 + kDensity * std::cos(2.0 * M_PI * (w - 0.5));
    double nw = w - f / fp;
    if (nw < 0.0) nw = 0.0;
    if (nw > 1.0) nw = 1.0;
    if (std::abs(nw - w) < 1e-14) return nw;
    w = nw;
  }
  return w;
}

}  // namespace

SamplingMask make_gro_mask(int ny, int nt, double R, uint64_t seed) {
  if (ny < 1 || nt < 1) throw config_error("mask dims must be positive");
  if (R < 1.0) throw config_error("acceleration must be >= 1");
  if (R > ny) throw config_error("acceleration exceeds phase-encode count");

  const int per_frame = std::max(1, static_cast<int>(std::lround(ny / R)));
  SamplingMask mask(ny, nt, R);

  CounterRng rng(seed, 0x6720);
  const double off0 = rng.uniform();

  // A fully sampled center block anchors every frame.
  const int center_block = std::min(per_frame, std::max(1, ny / 32));

  for (int t = 0; t < nt; ++t) {
    const double off = frac(off0 + t * kGolden);
    int placed = 0;
    for (int c = 0; c < center_block; ++c) {
      const int line = ny / 2 - center_block / 2 + c;
      if (!mask.is_selected(line, t)) {
        mask.set(line, t);
        ++placed;
      }
    }
    for (long k = 0; placed < per_frame && k < 64L * ny; ++k) {
      const double u = frac(off + static_cast<double>(k) * kGolden);
      int line = static_cast<int>(warp(u) * ny);
      if (line >= ny) line = ny - 1;
      if (!mask.is_selected(line, t)) {
        mask.set(line, t);
        ++placed;
      }
    }
    // Quantization collisions can starve dense frames; fill center-out.
    for (int d = 0; placed < per_frame && d <= ny; ++d) {
      for (int line : {ny / 2 + d, ny / 2 - d}) {
        if (placed == per_frame || line < 0 || line >= ny) continue;
        if (!mask.is_selected(line, t)) {
          mask.set(line, t);
          ++placed;
        }
      }
    }
  }

  mask.validate();
  return mask;
}

}  // namespace coreks
