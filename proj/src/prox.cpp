#include "coreks/prox.hpp"

#include <cmath>

namespace coreks {

cplx soft_threshold(cplx z, double tau) {
  double m = std::sqrt(std::norm(z));
  if (m <= tau || m == 0.0) return {0.0, 0.0};
  return z * ((m - tau) / m);
}

void soft_threshold(std::vector<cplx>& z, double tau) {
  for (cplx& v : z) v = soft_threshold(v, tau);
}

void soft_threshold(CoefficientSet& w, double tau) {
  for (ComplexGrid& b : w.bands) soft_threshold(b.raw(), tau);
}

void soft_threshold(std::vector<double>& z, double tau) {
  for (double& v : z) {
    double m = std::abs(v) - tau;
    v = m > 0.0 ? (v < 0.0 ? -m : m) : 0.0;
  }
}

std::vector<double> group_norms(const OutlierField& v) {
  std::vector<double> out(v.J());
  for (int j = 0; j < v.J(); ++j) {
    const cplx* r = v.readout(j);
    double s = 0.0;
    for (int k = 0; k < v.K(); ++k) s += std::norm(r[k]);
    out[j] = std::sqrt(s);
  }
  return out;
}

OutlierField group_soft_threshold(const OutlierField& v, const std::vector<double>& scale) {
  if (scale.size() != static_cast<size_t>(v.J()))
    throw contract_error("group scale length does not match readout count");
  OutlierField out = v;
  for (int j = 0; j < out.J(); ++j) {
    cplx* r = out.readout(j);
    for (int k = 0; k < out.K(); ++k) r[k] *= scale[j];
  }
  return out;
}

}  // namespace coreks
