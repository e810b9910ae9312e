#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "coreks/grid.hpp"

namespace coreks {

// Binary phase-encode selection over (ny x nt) cells.
struct SamplingMask {
  int ny = 0;
  int nt = 0;
  double r_target = 1.0;
  std::vector<uint8_t> selected;  // [t*ny + y]

  SamplingMask() = default;
  SamplingMask(int ny_, int nt_, double r_target_)
      : ny(ny_), nt(nt_), r_target(r_target_), selected(static_cast<size_t>(ny_) * nt_, 0) {
    if (ny_ <= 0 || nt_ <= 0) throw contract_error("mask dims must be positive");
  }

  bool is_selected(int y, int t) const { return selected[static_cast<size_t>(t) * ny + y] != 0; }
  void set(int y, int t, bool v = true) { selected[static_cast<size_t>(t) * ny + y] = v ? 1 : 0; }

  size_t count() const {
    size_t c = 0;
    for (uint8_t v : selected) c += v != 0;
    return c;
  }

  double r_achieved() const {
    size_t c = count();
    if (c == 0) throw contract_error("empty sampling mask");
    return static_cast<double>(ny) * nt / static_cast<double>(c);
  }

  // Selected (phase-encode, frame) cells in canonical scan order.
  std::vector<std::pair<int, int>> cells() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(count());
    for (int t = 0; t < nt; ++t)
      for (int y = 0; y < ny; ++y)
        if (is_selected(y, t)) out.emplace_back(y, t);
    return out;
  }

  // Enforces the type invariants: achieved acceleration within 5% of target
  // and at least one line per frame.
  void validate() const;
};

struct ReadoutCoord {
  int pe = 0;     // phase-encode index
  int frame = 0;  // frame index
  int coil = 0;

  bool operator==(const ReadoutCoord&) const = default;
};

// Readout-structured k-space samples: J readouts of K samples each, stored
// contiguously readout-major. Also used for the outlier field v, which shares
// the readout structure of the measurements it augments.
class KSpaceSet {
 public:
  KSpaceSet() = default;
  explicit KSpaceSet(int samples_per_readout) : k_(samples_per_readout) {
    if (samples_per_readout <= 0) throw contract_error("K must be positive");
  }

  int K() const { return k_; }
  int J() const { return static_cast<int>(coords_.size()); }

  void reserve(size_t j) {
    coords_.reserve(j);
    data_.reserve(j * k_);
  }

  // Appends a readout and returns a pointer to its K samples (zero filled).
  cplx* add_readout(const ReadoutCoord& c) {
    coords_.push_back(c);
    data_.resize(data_.size() + k_, cplx{0.0, 0.0});
    return data_.data() + data_.size() - k_;
  }

  cplx* readout(int j) { return data_.data() + static_cast<size_t>(j) * k_; }
  const cplx* readout(int j) const { return data_.data() + static_cast<size_t>(j) * k_; }

  const std::vector<ReadoutCoord>& coords() const { return coords_; }
  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

  // Same readout structure, all samples zero.
  KSpaceSet zeros_like() const {
    KSpaceSet z(k_);
    z.coords_ = coords_;
    z.data_.assign(data_.size(), cplx{0.0, 0.0});
    return z;
  }

  // Throws if any (pe, frame, coil) coordinate repeats or sizes disagree.
  void validate() const;

 private:
  int k_ = 0;
  std::vector<ReadoutCoord> coords_;
  std::vector<cplx> data_;  // J*K, readout-major
};

// Auxiliary outlier variable v: same readout structure as the measurements.
using OutlierField = KSpaceSet;

}  // namespace coreks
