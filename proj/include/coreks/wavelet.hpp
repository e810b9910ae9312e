#pragma once

#include <string>
#include <vector>

#include "coreks/grid.hpp"

namespace coreks {

enum class WaveletFamily { haar, db2 };

struct WaveletConfig {
  WaveletFamily family = WaveletFamily::haar;
  int levels_space = 2;
  int levels_time = -1;  // -1: one temporal level when nt > 1, none otherwise
};

// Undecimated coefficients: every band has the full grid shape.
struct CoefficientSet {
  GridDims dims;
  std::vector<ComplexGrid> bands;
  std::vector<std::string> labels;

  size_t total() const { return bands.size() * dims.size(); }
};

// Undecimated (a trous) wavelet transform over the spatio-temporal axes with
// periodic boundaries. Filters carry a 1/sqrt(2) per-split normalization on
// top of the orthonormal pair, which makes the analysis operator a Parseval
// frame: the adjoint is an exact left inverse and the operator norm is 1.
class WaveletTransform {
 public:
  WaveletTransform(WaveletConfig cfg, GridDims dims);

  const WaveletConfig& config() const { return cfg_; }
  int levels_time() const { return lt_; }
  int band_count() const;
  // The final low-pass band of each temporal branch; it is not sparse and
  // carries the image mean, so the l1 prior leaves it unpenalized.
  bool is_approx_band(int band) const {
    const int per = 3 * cfg_.levels_space + 1;
    return band % per == per - 1;
  }

  CoefficientSet forward(const ComplexGrid& x) const;
  void forward_into(const ComplexGrid& x, CoefficientSet& w) const;
  ComplexGrid adjoint(const CoefficientSet& w) const;
  void adjoint_into(const CoefficientSet& w, ComplexGrid& out) const;

  CoefficientSet zeros() const;

 private:
  WaveletConfig cfg_;
  GridDims dims_;
  int lt_ = 0;  // resolved temporal level count
  std::vector<double> h_, g_;
};

}  // namespace coreks
