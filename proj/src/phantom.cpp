#include "coreks/phantom.hpp"

#include <cmath>

namespace coreks {
namespace {

void rasterize(ComplexGrid& g, const std::vector<Ellipse>& ellipses) {
  const int n = g.dims().nx;
  for (const Ellipse& e : ellipses) {
    const double th = e.theta_deg * M_PI / 180.0;
    const double ct = std::cos(th), st = std::sin(th);
    const double ia2 = 1.0 / (e.a * e.a), ib2 = 1.0 / (e.b * e.b);
    for (int j = 0; j < n; ++j) {
      const double y = (2.0 * (j + 0.5) - n) / n;
      for (int i = 0; i < n; ++i) {
        const double x = (2.0 * (i + 0.5) - n) / n;
        const double xr = ct * (x - e.x0) + st * (y - e.y0);
        const double yr = -st * (x - e.x0) + ct * (y - e.y0);
        if (xr * xr * ia2 + yr * yr * ib2 <= 1.0) g.at(i, j) += e.value;
      }
    }
  }
  // Overlapping intensities cancel to exactly zero in some regions; sweep the
  // round-off residue so the range contract holds.
  for (size_t i = 0; i < g.size(); ++i)
    if (g[i].real() < 0.0 && g[i].real() > -1e-12) g[i] = 0.0;
}

}  // namespace

// Ten-ellipse head phantom with the modified intensity set (values in [0,1]).
const std::vector<Ellipse>& shepp_logan_ellipses() {
  static const std::vector<Ellipse> table = {
      {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
      {-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
      {-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
      {-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
      {0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
      {0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
      {0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
      {0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
      {0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
      {0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
  };
  return table;
}

// Torso phantom with two respiratory states: the diaphragm boundary
// translates by the configured pixel shift, the heart displaces and deforms
// with it, and a small vessel cross-section rides along.
std::vector<Ellipse> dynamic_torso_ellipses(MotionState state, int diaphragm_shift_px) {
  const double s = state == MotionState::inspiratory
                       ? 2.0 * static_cast<double>(diaphragm_shift_px) / 256.0
                       : 0.0;
  const double squeeze = state == MotionState::inspiratory ? 0.88 : 1.0;
  return {
      {0.35, 0.880, 0.700, 0.00, 0.000, 0.0},              // torso
      {-0.15, 0.300, 0.420, -0.38, 0.120, 8.0},            // left lung
      {-0.15, 0.300, 0.420, 0.38, 0.120, -8.0},            // right lung
      {0.40, 0.520, 0.380, 0.05, -0.480 + s, 0.0},         // diaphragm/liver dome
      {0.25, 0.220, 0.180 * squeeze, -0.08, 0.200 + 0.4 * s, -20.0},  // heart
      {0.30, 0.060, 0.060, 0.22, 0.340 + 0.25 * s, 0.0},   // vessel
  };
}

ComplexGrid make_phantom(const PhantomSpec& spec) {
  if (spec.kind == PhantomKind::shepp_logan_128) {
    if (spec.state != MotionState::statik)
      throw config_error("shepp_logan_128 has no motion states");
    ComplexGrid g({128, 128, 1}, Domain::image);
    rasterize(g, shepp_logan_ellipses());
    return g;
  }
  if (spec.state == MotionState::statik)
    throw config_error("dynamic_256 requires expiratory or inspiratory state");
  if (spec.diaphragm_shift_px < 0 || spec.diaphragm_shift_px > 64)
    throw config_error("diaphragm shift out of range");
  ComplexGrid g({256, 256, 1}, Domain::image);
  rasterize(g, dynamic_torso_ellipses(spec.state, spec.diaphragm_shift_px));
  return g;
}

}  // namespace coreks
