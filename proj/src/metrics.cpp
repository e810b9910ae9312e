#include "coreks/metrics.hpp"

#include <cmath>
#include <limits>

namespace coreks {

double nmse_db(const ComplexGrid& x_hat, const ComplexGrid& truth) {
  if (!(x_hat.dims() == truth.dims())) throw contract_error("nmse: dims mismatch");
  double err = 0.0, ref = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    err += std::norm(x_hat[i] - truth[i]);
    ref += std::norm(truth[i]);
  }
  if (ref == 0.0) throw degenerate_input_error("nmse: reference image is all zero");
  if (err == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(std::sqrt(err / ref));
}

namespace {

// Summed-area table over one frame; sums of f over windows in O(1).
struct Sat {
  int nx, ny;
  std::vector<double> s;  // (nx+1)*(ny+1)

  Sat(const double* img, int nx_, int ny_) : nx(nx_), ny(ny_), s((nx_ + 1) * (ny_ + 1), 0.0) {
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        s[(y + 1) * (nx + 1) + (x + 1)] = img[y * nx + x] + s[y * (nx + 1) + (x + 1)] +
                                          s[(y + 1) * (nx + 1) + x] - s[y * (nx + 1) + x];
  }

  double window(int x, int y, int w) const {
    return s[(y + w) * (nx + 1) + (x + w)] - s[y * (nx + 1) + (x + w)] -
           s[(y + w) * (nx + 1) + x] + s[y * (nx + 1) + x];
  }
};

}  // namespace

double ssim_windowed(const std::vector<double>& a, const std::vector<double>& b, int nx, int ny,
                     int nt, double data_range, int window) {
  if (a.size() != b.size() || a.size() != static_cast<size_t>(nx) * ny * nt)
    throw contract_error("ssim: size mismatch");
  if (nx < window || ny < window)
    throw config_error("ssim: image smaller than " + std::to_string(window) + "x" +
                       std::to_string(window) + " window");

  const double c1 = std::pow(0.01 * data_range, 2);
  const double c2 = std::pow(0.03 * data_range, 2);
  const double wn = static_cast<double>(window) * window;

  double acc = 0.0;
  size_t count = 0;
  std::vector<double> aa(static_cast<size_t>(nx) * ny), bb(aa.size()), ab(aa.size());
  for (int t = 0; t < nt; ++t) {
    const double* fa = a.data() + static_cast<size_t>(t) * nx * ny;
    const double* fb = b.data() + static_cast<size_t>(t) * nx * ny;
    for (size_t i = 0; i < aa.size(); ++i) {
      aa[i] = fa[i] * fa[i];
      bb[i] = fb[i] * fb[i];
      ab[i] = fa[i] * fb[i];
    }
    Sat sa(fa, nx, ny), sb(fb, nx, ny), saa(aa.data(), nx, ny), sbb(bb.data(), nx, ny),
        sab(ab.data(), nx, ny);
    for (int y = 0; y + window <= ny; ++y) {
      for (int x = 0; x + window <= nx; ++x) {
        const double mu1 = sa.window(x, y, window) / wn;
        const double mu2 = sb.window(x, y, window) / wn;
        const double v1 = saa.window(x, y, window) / wn - mu1 * mu1;
        const double v2 = sbb.window(x, y, window) / wn - mu2 * mu2;
        const double cov = sab.window(x, y, window) / wn - mu1 * mu2;
        acc += ((2.0 * mu1 * mu2 + c1) * (2.0 * cov + c2)) /
               ((mu1 * mu1 + mu2 * mu2 + c1) * (v1 + v2 + c2));
        ++count;
      }
    }
  }
  return acc / static_cast<double>(count);
}

double ssim(const ComplexGrid& x_hat, const ComplexGrid& truth) {
  if (!(x_hat.dims() == truth.dims())) throw contract_error("ssim: dims mismatch");
  std::vector<double> a(truth.size()), b(truth.size());
  double m = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    b[i] = std::abs(truth[i]);
    m = std::max(m, b[i]);
  }
  if (m == 0.0) throw degenerate_input_error("ssim: reference image is all zero");
  for (size_t i = 0; i < truth.size(); ++i) {
    a[i] = std::abs(x_hat[i]) / m;
    b[i] /= m;
  }
  return ssim_windowed(a, b, truth.dims().nx, truth.dims().ny, truth.dims().nt, 1.0);
}

// Continued fraction for the incomplete beta (Lentz's method).
static double betacf(double a, double b, double x) {
  const double eps = 1e-15, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double num = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + num / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + num / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw contract_error("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                          int n_comparisons) {
  if (a.size() != b.size()) throw contract_error("paired t-test: unequal lengths");
  if (a.size() < 2) throw contract_error("paired t-test: need at least 2 pairs");
  if (n_comparisons < 1) throw contract_error("paired t-test: n_comparisons must be >= 1");

  const size_t n = a.size();
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  if (ss == 0.0) {
    if (mean == 0.0) return {0.0, 1.0};
    throw degenerate_input_error("paired t-test: differences have zero variance");
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const double nu = static_cast<double>(n - 1);
  const double p = incomplete_beta(nu / 2.0, 0.5, nu / (nu + t * t));
  return {t, std::min(1.0, p * n_comparisons)};
}

}  // namespace coreks
