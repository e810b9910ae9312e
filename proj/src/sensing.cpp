#include "coreks/sensing.hpp"

#include <cmath>
#include <cstring>

#include "coreks/fft.hpp"
#include "coreks/rng.hpp"

namespace coreks {

SensingOperator::SensingOperator(GridDims dims, SamplingMask mask, std::vector<ComplexGrid> maps)
    : dims_(dims), mask_(std::move(mask)), maps_(std::move(maps)) {
  if (mask_.ny != dims_.ny || mask_.nt != dims_.nt)
    throw contract_error("mask shape does not match grid dims");
  for (const ComplexGrid& m : maps_)
    if (!(m.dims() == dims_)) throw contract_error("coil map dims do not match grid dims");
  cells_ = mask_.cells();
  if (cells_.empty()) throw contract_error("sampling mask selects no cells");
}

KSpaceSet SensingOperator::forward(const ComplexGrid& x) const {
  KSpaceSet out(dims_.nx);
  out.reserve(cells_.size() * coils());
  for (int c = 0; c < coils(); ++c)
    for (const auto& [pe, frame] : cells_) out.add_readout({pe, frame, c});
  forward_into(x, out);
  return out;
}

void SensingOperator::forward_into(const ComplexGrid& x, KSpaceSet& out) const {
  if (!(x.dims() == dims_)) throw contract_error("forward: image dims do not match operator");
  if (x.domain() != Domain::image) throw contract_error("forward: input must be image domain");
  check_coords(out);

  const size_t n = dims_.size();
  ComplexGrid tmp(dims_, Domain::image);
  int j = 0;
  for (int c = 0; c < coils(); ++c) {
    if (maps_.empty()) {
      std::memcpy(tmp.data(), x.data(), n * sizeof(cplx));
    } else {
      const cplx* m = maps_[c].data();
      const cplx* src = x.data();
      cplx* dst = tmp.data();
      for (size_t i = 0; i < n; ++i) dst[i] = m[i] * src[i];
    }
    tmp.set_domain(Domain::image);
    fft2_centered(tmp, false);
    for (size_t cell = 0; cell < cells_.size(); ++cell, ++j) {
      const auto& [pe, frame] = cells_[cell];
      std::memcpy(out.readout(j), &tmp.at(0, pe, frame), dims_.nx * sizeof(cplx));
    }
  }
}

ComplexGrid SensingOperator::adjoint(const KSpaceSet& y) const {
  ComplexGrid out(dims_, Domain::image);
  adjoint_into(y, out);
  return out;
}

void SensingOperator::adjoint_into(const KSpaceSet& y, ComplexGrid& out) const {
  check_coords(y);
  if (!(out.dims() == dims_)) out = ComplexGrid(dims_, Domain::image);

  const size_t n = dims_.size();
  std::fill(out.raw().begin(), out.raw().end(), cplx{0.0, 0.0});
  out.set_domain(Domain::image);

  ComplexGrid tmp(dims_, Domain::kspace);
  for (int c = 0; c < coils(); ++c) {
    std::fill(tmp.raw().begin(), tmp.raw().end(), cplx{0.0, 0.0});
    for (int j = 0; j < y.J(); ++j) {
      if (y.coords()[j].coil != c) continue;
      std::memcpy(&tmp.at(0, y.coords()[j].pe, y.coords()[j].frame), y.readout(j),
                  dims_.nx * sizeof(cplx));
    }
    tmp.set_domain(Domain::kspace);
    fft2_centered(tmp, true);
    if (maps_.empty()) {
      for (size_t i = 0; i < n; ++i) out[i] += tmp[i];
    } else {
      const cplx* m = maps_[c].data();
      for (size_t i = 0; i < n; ++i) out[i] += std::conj(m[i]) * tmp[i];
    }
  }
}

void SensingOperator::check_coords(const KSpaceSet& y) const {
  if (y.K() != dims_.nx) throw contract_error("readout length K does not match nx");
  if (y.J() != static_cast<int>(cells_.size()) * coils())
    throw contract_error("readout count does not match operator sampling");
  for (const ReadoutCoord& rc : y.coords()) {
    if (rc.pe < 0 || rc.pe >= dims_.ny || rc.frame < 0 || rc.frame >= dims_.nt ||
        rc.coil < 0 || rc.coil >= coils())
      throw contract_error("readout coordinate out of range");
    if (!mask_.is_selected(rc.pe, rc.frame))
      throw contract_error("readout coordinate (pe=" + std::to_string(rc.pe) +
                           ", frame=" + std::to_string(rc.frame) + ") outside sampling mask");
  }
}

double SensingOperator::estimate_spectral_norm(uint64_t seed, int max_iters, double tol) const {
  CounterRng rng(seed, 0x5eed);
  ComplexGrid b(dims_, Domain::image);
  for (size_t i = 0; i < b.size(); ++i) b[i] = {rng.gaussian(), rng.gaussian()};
  double nb = norm2(b.raw());
  scale(b.raw(), 1.0 / nb);

  KSpaceSet ab = forward(b);
  double est = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    forward_into(b, ab);
    double cur = norm2(ab.raw());  // ||A b|| with ||b|| = 1
    ComplexGrid nb2 = adjoint(ab);
    double nn = norm2(nb2.raw());
    if (nn == 0.0) return 0.0;
    scale(nb2.raw(), 1.0 / nn);
    b = std::move(nb2);
    if (it > 0 && std::abs(cur - est) <= tol * std::max(cur, 1e-300)) return cur;
    est = cur;
  }
  return est;
}

}  // namespace coreks
