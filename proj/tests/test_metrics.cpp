#include <doctest.h>

#include <cmath>

#include "coreks/metrics.hpp"
#include "support/test_support.hpp"

using namespace coreks;
using namespace coreks::testing;

namespace {

ComplexGrid const_grid(GridDims d, cplx v) {
  ComplexGrid g(d, Domain::image);
  for (size_t i = 0; i < g.size(); ++i) g[i] = v;
  return g;
}

// From-definition sliding-window SSIM: per window, plain loops over the 8x8
// patch, population statistics, then the standard two-factor formula.
double ssim_oracle(const std::vector<double>& a, const std::vector<double>& b, int n) {
  const int w = 8;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double acc = 0.0;
  int count = 0;
  for (int y = 0; y + w <= n; ++y)
    for (int x = 0; x + w <= n; ++x) {
      double m1 = 0, m2 = 0;
      for (int j = 0; j < w; ++j)
        for (int i = 0; i < w; ++i) {
          m1 += a[(y + j) * n + (x + i)];
          m2 += b[(y + j) * n + (x + i)];
        }
      m1 /= w * w;
      m2 /= w * w;
      double v1 = 0, v2 = 0, cov = 0;
      for (int j = 0; j < w; ++j)
        for (int i = 0; i < w; ++i) {
          const double da = a[(y + j) * n + (x + i)] - m1;
          const double db = b[(y + j) * n + (x + i)] - m2;
          v1 += da * da;
          v2 += db * db;
          cov += da * db;
        }
      v1 /= w * w;
      v2 /= w * w;
      cov /= w * w;
      acc += ((2 * m1 * m2 + c1) * (2 * cov + c2)) / ((m1 * m1 + m2 * m2 + c1) * (v1 + v2 + c2));
      ++count;
    }
  return acc / count;
}

}  // namespace

TEST_CASE("nmse examples") {
  ComplexGrid truth = random_grid({16, 16, 1}, 31);

  CHECK(nmse_db(truth, truth) == -std::numeric_limits<double>::infinity());

  ComplexGrid zero({16, 16, 1}, Domain::image);
  CHECK(nmse_db(zero, truth) == doctest::Approx(0.0).epsilon(1e-12));

  ComplexGrid scaled = truth;
  for (size_t i = 0; i < scaled.size(); ++i) scaled[i] *= 0.9;
  CHECK(nmse_db(scaled, truth) == doctest::Approx(-20.0).epsilon(1e-10));

  // Scale sensitivity: alpha*truth sits at 20*log10|alpha - 1|.
  for (double alpha : {0.5, 2.0}) {
    ComplexGrid s = truth;
    for (size_t i = 0; i < s.size(); ++i) s[i] *= alpha;
    CHECK(nmse_db(s, truth) ==
          doctest::Approx(20.0 * std::log10(std::abs(alpha - 1.0))).epsilon(1e-12));
  }

  CHECK_THROWS_AS(nmse_db(truth, zero), degenerate_input_error);
  CHECK_THROWS_AS(nmse_db(truth, random_grid({8, 8, 1}, 1)), contract_error);
}

TEST_CASE("ssim basics") {
  ComplexGrid truth = random_grid({16, 16, 1}, 32);
  for (size_t i = 0; i < truth.size(); ++i) truth[i] = std::abs(truth[i]);

  CHECK(ssim(truth, truth) == doctest::Approx(1.0).epsilon(1e-12));

  ComplexGrid noisy = truth;
  CounterRng rng(33, 0);
  for (size_t i = 0; i < noisy.size(); ++i) noisy[i] += 0.8 * std::abs(rng.gaussian());
  CHECK(ssim(noisy, truth) < 1.0);

  CHECK_THROWS_AS(ssim(random_grid({4, 4, 1}, 2), random_grid({4, 4, 1}, 3)), config_error);
}

TEST_CASE("ssim equals the from-definition sliding-window oracle at 16x16") {
  const int n = 16;
  CounterRng rng(34, 0);
  std::vector<double> a(n * n), b(n * n);
  for (int i = 0; i < n * n; ++i) {
    a[i] = 0.5 + 0.2 * rng.gaussian();
    b[i] = a[i] + 0.1 * rng.gaussian();
  }
  const double mine = ssim_windowed(a, b, n, n, 1, 1.0);
  CHECK(std::abs(mine - ssim_oracle(a, b, n)) < 1e-10);
}

TEST_CASE("ssim is symmetric under a shared normalization constant") {
  const int n = 12;
  CounterRng rng(35, 0);
  std::vector<double> a(n * n), b(n * n);
  for (int i = 0; i < n * n; ++i) {
    a[i] = 0.4 + 0.3 * rng.gaussian();
    b[i] = 0.6 + 0.2 * rng.gaussian();
  }
  CHECK(std::abs(ssim_windowed(a, b, n, n, 1, 1.0) - ssim_windowed(b, a, n, n, 1, 1.0)) < 1e-12);
}

TEST_CASE("incomplete beta matches reference values") {
  CHECK(incomplete_beta(2.0, 0.5, 0.55) == doctest::Approx(0.144703998606330).epsilon(1e-10));
  CHECK(incomplete_beta(0.5, 0.5, 0.3) == doctest::Approx(0.369010119565545).epsilon(1e-10));
  CHECK(incomplete_beta(5.0, 2.0, 0.8) == doctest::Approx(0.655360000000000).epsilon(1e-10));
  CHECK(incomplete_beta(2.5, 3.5, 0.12) == doctest::Approx(0.043383503862271).epsilon(1e-10));
  CHECK(incomplete_beta(2.0, 0.5, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 0.5, 1.0) == 1.0);
}

TEST_CASE("paired t-test against the textbook formula on hand-sized vectors") {
  const std::vector<double> a = {1.1, 2.3, 3.0, 4.2, 5.1};
  const std::vector<double> b = {1.0, 2.0, 3.1, 4.0, 5.0};
  TTestResult r = paired_t_test(a, b, 3);
  CHECK(r.t == doctest::Approx(1.809068067466580).epsilon(1e-12));
  CHECK(r.p_adjusted == doctest::Approx(0.434111995818992).epsilon(1e-9));

  const std::vector<double> a2 = {-20.1, -22.3, -19.5, -21.0, -23.2, -20.8, -18.9};
  const std::vector<double> b2 = {-18.0, -20.1, -19.0, -19.5, -21.8, -19.2, -18.2};
  TTestResult r2 = paired_t_test(a2, b2, 3);
  CHECK(r2.t == doctest::Approx(-5.885748238972125).epsilon(1e-12));
  CHECK(r2.p_adjusted == doctest::Approx(0.003199963135604).epsilon(1e-9));
}

TEST_CASE("paired t-test degenerate and edge cases") {
  const std::vector<double> a = {1.0, 2.0, 3.0};

  TTestResult same = paired_t_test(a, a, 3);
  CHECK(same.t == 0.0);
  CHECK(same.p_adjusted == 1.0);

  std::vector<double> shifted = {2.0, 3.0, 4.0};
  CHECK_THROWS_AS(paired_t_test(shifted, a, 3), degenerate_input_error);

  CHECK_THROWS_AS(paired_t_test({1.0}, {2.0}, 3), contract_error);
  CHECK_THROWS_AS(paired_t_test(a, {1.0, 2.0}, 3), contract_error);
  CHECK_THROWS_AS(paired_t_test(a, a, 0), contract_error);
}

TEST_CASE("bonferroni adjustment is monotone in the comparison count") {
  const std::vector<double> a = {1.1, 2.3, 3.0, 4.2, 5.1};
  const std::vector<double> b = {1.0, 2.0, 3.1, 4.0, 5.0};
  double prev = 0.0;
  for (int n : {1, 2, 3, 5, 10, 100}) {
    const double p = paired_t_test(a, b, n).p_adjusted;
    CHECK(p >= prev);
    CHECK(p <= 1.0);
    prev = p;
  }
}
