#pragma once

#include <vector>

#include "coreks/grid.hpp"
#include "coreks/kspace.hpp"

namespace coreks {

// Linear sensing operator A: per-coil sensitivity weighting, centered
// orthonormal 2D DFT per frame, then restriction to the sampled phase-encode
// cells. Each selected (pe, frame, coil) cell yields one readout of K = nx
// samples. With full sampling and a single identity coil the operator is
// unitary. Immutable after construction; applications are concurrency safe.
class SensingOperator {
 public:
  // maps empty => single coil with identity sensitivity.
  SensingOperator(GridDims dims, SamplingMask mask, std::vector<ComplexGrid> maps = {});

  const GridDims& dims() const { return dims_; }
  const SamplingMask& mask() const { return mask_; }
  int coils() const { return maps_.empty() ? 1 : static_cast<int>(maps_.size()); }
  int readouts_per_coil() const { return static_cast<int>(cells_.size()); }
  // True for the single-coil identity-sensitivity case, where the operator is
  // a pure masked Fourier transform.
  bool identity_single_coil() const { return maps_.empty(); }

  KSpaceSet forward(const ComplexGrid& x) const;
  ComplexGrid adjoint(const KSpaceSet& y) const;

  // In-place variants for hot loops; out must have been produced by
  // forward()/zeros_like() of this operator (coords are checked).
  void forward_into(const ComplexGrid& x, KSpaceSet& out) const;
  void adjoint_into(const KSpaceSet& y, ComplexGrid& out) const;

  // Power iteration estimate of the operator 2-norm; deterministic given seed.
  double estimate_spectral_norm(uint64_t seed = 0, int max_iters = 200, double tol = 1e-4) const;

 private:
  void check_coords(const KSpaceSet& y) const;

  GridDims dims_;
  SamplingMask mask_;
  std::vector<ComplexGrid> maps_;
  std::vector<std::pair<int, int>> cells_;  // selected (pe, frame), canonical order
};

}  // namespace coreks
