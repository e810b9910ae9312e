#include "coreks/grid.hpp"

#include <cmath>

namespace coreks {

double norm2(const std::vector<cplx>& a) {
  double s = 0.0;
  for (const cplx& z : a) s += std::norm(z);
  return std::sqrt(s);
}

double norm2(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw contract_error("dot: size mismatch");
  cplx s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

void axpy(cplx alpha, const std::vector<cplx>& x, std::vector<cplx>& y) {
  if (x.size() != y.size()) throw contract_error("axpy: size mismatch");
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::vector<cplx>& a, double s) {
  for (cplx& z : a) z *= s;
}

double max_abs(const std::vector<cplx>& a) {
  double m = 0.0;
  for (const cplx& z : a) m = std::max(m, std::abs(z));
  return m;
}

bool all_finite(const std::vector<cplx>& a) {
  for (const cplx& z : a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace coreks
