#pragma once

#include "coreks/grid.hpp"

namespace coreks {

enum class PhantomKind { shepp_logan_128, dynamic_256 };
enum class MotionState { statik, expiratory, inspiratory };

struct PhantomSpec {
  PhantomKind kind = PhantomKind::shepp_logan_128;
  MotionState state = MotionState::statik;
  int diaphragm_shift_px = 12;  // dynamic phantom only, in pixels of 256
};

struct Ellipse {
  double value;      // additive intensity
  double a, b;       // semi-axes (normalized units, grid spans [-1, 1])
  double x0, y0;     // center
  double theta_deg;  // rotation
};

// Ellipse tables; exposed so tests can rasterize independently.
const std::vector<Ellipse>& shepp_logan_ellipses();
std::vector<Ellipse> dynamic_torso_ellipses(MotionState state, int diaphragm_shift_px);

// Real-valued phantom in [0, 1] stored as a complex image grid; deterministic.
ComplexGrid make_phantom(const PhantomSpec& spec);

}  // namespace coreks
