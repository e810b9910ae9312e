#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coreks/grid.hpp"

namespace coreks {

struct MetricReport {
  double nmse_db = 0.0;
  double ssim = 0.0;
  std::string method;
  uint64_t seed = 0;
};

// 20*log10(||x_hat - truth|| / ||truth||) on the complex grids.
// Exact equality reports -inf; an all-zero truth is an error.
double nmse_db(const ComplexGrid& x_hat, const ComplexGrid& truth);

// Mean structural similarity over all 8x8 windows (stride 1), computed on
// magnitude images rescaled by the truth's maximum; K1 = 0.01, K2 = 0.03,
// dynamic range 1 after normalization.
double ssim(const ComplexGrid& x_hat, const ComplexGrid& truth);

// Core SSIM on real images with an explicit dynamic range (shared
// normalization); exposed for symmetry checks.
double ssim_windowed(const std::vector<double>& a, const std::vector<double>& b, int nx, int ny,
                     int nt, double data_range, int window = 8);

struct TTestResult {
  double t = 0.0;
  double p_adjusted = 1.0;
};

// Two-sided paired t statistic with Bonferroni-adjusted p-value
// min(1, p * n_comparisons). Zero variance of the differences is an error
// unless the differences are identically zero.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                          int n_comparisons);

// Regularized incomplete beta I_x(a, b) via continued fraction; used for the
// t distribution CDF. Accurate to ~1e-12.
double incomplete_beta(double a, double b, double x);

}  // namespace coreks
