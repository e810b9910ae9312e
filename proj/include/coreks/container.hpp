#pragma once

#include <string>

#include "coreks/grid.hpp"
#include "coreks/kspace.hpp"

namespace coreks {

// COREKS1 binary container (little-endian). 32-byte header:
//   0..6   magic "COREKS1"
//   7      dtype: 1 = complex64, 2 = complex128
//   8      kind:  0 = grid, 1 = k-space set, 2 = sampling mask
//   9      domain tag (grids: 0 image, 1 kspace)
//   10..11 reserved (zero)
//   12..31 u32 nx, ny, nt, J, K
// Payloads:
//   grid:   nx*ny*nt interleaved re/im samples
//   kspace: J * (u32 pe, u32 frame, u32 coil) coordinate table,
//           then J*K interleaved re/im samples; ny/nt record the grid the
//           samples came from (0 when unknown)
//   mask:   f64 target acceleration, then ny*nt selection bytes
// Save-then-load is bit-identical for complex128 payloads.

void save_grid(const std::string& path, const ComplexGrid& g, bool f32 = false);
ComplexGrid load_grid(const std::string& path);

void save_kspace(const std::string& path, const KSpaceSet& ks, int ny = 0, int nt = 0,
                 bool f32 = false);

struct LoadedKSpace {
  KSpaceSet ks;
  int ny = 0;
  int nt = 0;
};
LoadedKSpace load_kspace(const std::string& path);

void save_mask(const std::string& path, const SamplingMask& m);
SamplingMask load_mask(const std::string& path);

}  // namespace coreks
