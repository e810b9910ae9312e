#pragma once

#include <cstdint>

#include "coreks/kspace.hpp"

namespace coreks {

// Cartesian variable-density mask: per frame, round(ny/R) distinct
// phase-encode lines placed by a golden-ratio offset sequence warped toward
// the k-space center, with the per-frame offset advancing by the golden
// fraction. Deterministic given (ny, nt, R, seed); achieved acceleration is
// within 5% of R.
SamplingMask make_gro_mask(int ny, int nt, double R, uint64_t seed);

}  // namespace coreks
