#pragma once

#include "coreks/grid.hpp"

namespace coreks {

// Centered, orthonormal 2D DFT applied frame by frame:
//   forward: X = fftshift(FFT(ifftshift(x))) / sqrt(nx*ny)
//   inverse: the exact unitary inverse (also the adjoint).
// Flips the grid's domain tag. Safe for concurrent calls; each call uses its
// own scratch buffers.
void fft2_centered(ComplexGrid& g, bool inverse);

}  // namespace coreks
