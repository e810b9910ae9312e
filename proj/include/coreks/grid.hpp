#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "coreks/errors.hpp"

namespace coreks {

using cplx = std::complex<double>;

enum class Domain { image, kspace };

// nx: frequency-encode size, ny: phase-encode size, nt: frame count.
struct GridDims {
  int nx = 0;
  int ny = 0;
  int nt = 1;

  size_t size() const { return static_cast<size_t>(nx) * ny * nt; }
  bool operator==(const GridDims&) const = default;
};

// Complex-valued image/k-space array. Layout: x fastest, then y, then t,
// i.e. index (x, y, t) -> (t*ny + y)*nx + x. A k-space readout is therefore
// one contiguous row.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(GridDims dims, Domain domain)
      : dims_(dims), domain_(domain), data_(checked_size(dims)) {}
  ComplexGrid(GridDims dims, Domain domain, std::vector<cplx> data)
      : dims_(dims), domain_(domain), data_(std::move(data)) {
    if (data_.size() != dims.size()) throw contract_error("grid data length != nx*ny*nt");
    checked_size(dims);
  }

  const GridDims& dims() const { return dims_; }
  Domain domain() const { return domain_; }
  void set_domain(Domain d) { domain_ = d; }

  size_t size() const { return data_.size(); }
  cplx& operator[](size_t i) { return data_[i]; }
  const cplx& operator[](size_t i) const { return data_[i]; }

  cplx& at(int x, int y, int t = 0) { return data_[index(x, y, t)]; }
  const cplx& at(int x, int y, int t = 0) const { return data_[index(x, y, t)]; }

  size_t index(int x, int y, int t) const {
    return (static_cast<size_t>(t) * dims_.ny + y) * dims_.nx + x;
  }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

  // Pointer to the start of frame t.
  cplx* frame(int t) { return data_.data() + static_cast<size_t>(t) * dims_.ny * dims_.nx; }
  const cplx* frame(int t) const {
    return data_.data() + static_cast<size_t>(t) * dims_.ny * dims_.nx;
  }

 private:
  static size_t checked_size(const GridDims& d) {
    if (d.nx <= 0 || d.ny <= 0 || d.nt <= 0) throw contract_error("grid dims must be positive");
    return d.size();
  }

  GridDims dims_;
  Domain domain_ = Domain::image;
  std::vector<cplx> data_;
};

// --- small vector kernels shared by operators and solvers ---

double norm2(const std::vector<cplx>& a);
double norm2(const std::vector<double>& a);
cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b);  // sum a_i * conj(b_i)
void axpy(cplx alpha, const std::vector<cplx>& x, std::vector<cplx>& y);  // y += alpha*x
void scale(std::vector<cplx>& a, double s);
double max_abs(const std::vector<cplx>& a);
bool all_finite(const std::vector<cplx>& a);

}  // namespace coreks
