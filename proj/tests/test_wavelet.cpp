#include <doctest.h>

#include "coreks/wavelet.hpp"
#include "support/test_support.hpp"

using namespace coreks;
using namespace coreks::testing;

namespace {

int pwrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// Direct (non-separable) a-trous convolution used as the oracle: every 2D
// output sample is accumulated straight from the tap definition.
struct DirectUwt {
  std::vector<double> h, g;

  explicit DirectUwt(WaveletFamily fam) {
    if (fam == WaveletFamily::haar) {
      h = {0.5, 0.5};
      g = {0.5, -0.5};
    } else {
      const double s3 = std::sqrt(3.0);
      const double c = 1.0 / (4.0 * std::sqrt(2.0)) / std::sqrt(2.0);
      h = {c * (1 + s3), c * (3 + s3), c * (3 - s3), c * (1 - s3)};
      g = {h[3], -h[2], h[1], -h[0]};
    }
  }

  // fx, fy choose the filter along each axis (false = h, true = g).
  std::vector<cplx> level(const std::vector<cplx>& a, int nx, int ny, int step, bool fx,
                          bool fy) const {
    const std::vector<double>& fxv = fx ? g : h;
    const std::vector<double>& fyv = fy ? g : h;
    std::vector<cplx> out(a.size());
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        cplx acc{0.0, 0.0};
        for (size_t k = 0; k < fxv.size(); ++k)
          for (size_t l = 0; l < fyv.size(); ++l)
            acc += fxv[k] * fyv[l] *
                   a[static_cast<size_t>(pwrap(y + static_cast<int>(l) * step, ny)) * nx +
                     pwrap(x + static_cast<int>(k) * step, nx)];
        out[static_cast<size_t>(y) * nx + x] = acc;
      }
    return out;
  }

  // Bands in the implementation's order for a 2-level spatial transform.
  std::vector<std::vector<cplx>> forward2(const std::vector<cplx>& x, int nx, int ny) const {
    std::vector<std::vector<cplx>> bands;
    std::vector<cplx> a = x;
    for (int lvl = 1; lvl <= 2; ++lvl) {
      const int step = 1 << (lvl - 1);
      bands.push_back(level(a, nx, ny, step, false, true));   // LH
      bands.push_back(level(a, nx, ny, step, true, false));   // HL
      bands.push_back(level(a, nx, ny, step, true, true));    // HH
      a = level(a, nx, ny, step, false, false);                // LL
    }
    bands.push_back(a);
    return bands;
  }
};

}  // namespace

TEST_CASE("constant image: detail bands vanish, approximation does not") {
  WaveletTransform psi({WaveletFamily::haar, 2, 0}, {16, 16, 1});
  ComplexGrid x({16, 16, 1}, Domain::image);
  for (size_t i = 0; i < x.size(); ++i) x[i] = {0.7, -0.2};
  CoefficientSet w = psi.forward(x);
  for (size_t b = 0; b + 1 < w.bands.size(); ++b) CHECK(norm2(w.bands[b].raw()) < 1e-14);
  CHECK(norm2(w.bands.back().raw()) > 1.0);
}

TEST_CASE("zero image transforms to zero coefficients") {
  WaveletTransform psi({WaveletFamily::db2, 2, 1}, {8, 8, 4});
  CoefficientSet w = psi.forward(ComplexGrid({8, 8, 4}, Domain::image));
  CHECK(static_cast<int>(w.bands.size()) == psi.band_count());
  for (const ComplexGrid& b : w.bands) CHECK(norm2(b.raw()) == 0.0);
}

TEST_CASE("single-level haar matches hand-computed a-trous filtering") {
  // Signal [1 2 3 5] repeated down the columns; the x-detail band then holds
  // (s[i] - s[i+1])/2 with periodic wrap.
  WaveletTransform psi({WaveletFamily::haar, 1, 0}, {4, 4, 1});
  ComplexGrid x({4, 4, 1}, Domain::image);
  const double s[4] = {1.0, 2.0, 3.0, 5.0};
  for (int y = 0; y < 4; ++y)
    for (int i = 0; i < 4; ++i) x.at(i, y) = s[i];
  CoefficientSet w = psi.forward(x);
  REQUIRE(w.labels == std::vector<std::string>{"s1.LH", "s1.HL", "s1.HH", "s1.LL"});

  const double expect_hl[4] = {-0.5, -0.5, -1.0, 2.0};
  const double expect_ll[4] = {1.5, 2.5, 4.0, 3.0};
  for (int y = 0; y < 4; ++y)
    for (int i = 0; i < 4; ++i) {
      CHECK(w.bands[1].at(i, y).real() == doctest::Approx(expect_hl[i]).epsilon(1e-14));
      CHECK(w.bands[3].at(i, y).real() == doctest::Approx(expect_ll[i]).epsilon(1e-14));
      CHECK(std::abs(w.bands[0].at(i, y)) < 1e-14);  // y-detail of a y-constant image
      CHECK(std::abs(w.bands[2].at(i, y)) < 1e-14);
    }
}

TEST_CASE("forward matches the direct convolution oracle at 16x16") {
  for (WaveletFamily fam : {WaveletFamily::haar, WaveletFamily::db2}) {
    CAPTURE(static_cast<int>(fam));
    WaveletTransform psi({fam, 2, 0}, {16, 16, 1});
    ComplexGrid x = random_grid({16, 16, 1}, 11);
    CoefficientSet w = psi.forward(x);
    DirectUwt oracle(fam);
    auto expect = oracle.forward2(x.raw(), 16, 16);
    REQUIRE(expect.size() == w.bands.size());
    for (size_t b = 0; b < w.bands.size(); ++b)
      CHECK(max_abs_diff(w.bands[b].raw(), expect[b]) < 1e-12);
  }
}

TEST_CASE("adjoint identity and exact reconstruction") {
  WaveletTransform psi({WaveletFamily::db2, 2, 1}, {16, 12, 2});
  ComplexGrid x = random_grid({16, 12, 2}, 12);
  CoefficientSet w = psi.forward(x);

  CoefficientSet z = psi.zeros();
  CounterRng rng(13, 0);
  for (ComplexGrid& b : z.bands) fill_random(b.raw(), rng);

  // <Psi x, z> == <x, Psi^H z>
  cplx lhs = 0.0;
  for (size_t b = 0; b < w.bands.size(); ++b) lhs += dot(w.bands[b].raw(), z.bands[b].raw());
  ComplexGrid adj = psi.adjoint(z);
  cplx rhs = dot(x.raw(), adj.raw());
  double scale = 0.0;
  for (const ComplexGrid& b : w.bands) scale += std::pow(norm2(b.raw()), 2);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::sqrt(scale) * norm2(adj.raw()));

  // Parseval frame: Psi^H Psi = I.
  ComplexGrid back = psi.adjoint(w);
  CHECK(rel_err(back.raw(), x.raw()) < 1e-12);

  // Psi^H of all zeros is the zero image.
  ComplexGrid zero = psi.adjoint(psi.zeros());
  CHECK(norm2(zero.raw()) == 0.0);
}

TEST_CASE("adjoint matches the dense transform matrix at 16x16") {
  const int n = 16;
  WaveletTransform psi({WaveletFamily::haar, 2, 0}, {n, n, 1});
  DirectUwt oracle(WaveletFamily::haar);

  // Dense Psi built column by column from the oracle.
  const size_t N = static_cast<size_t>(n) * n;
  const size_t B = 7 * N;
  std::vector<double> dense(B * N);
  for (size_t col = 0; col < N; ++col) {
    std::vector<cplx> e(N, cplx{0.0, 0.0});
    e[col] = 1.0;
    auto bands = oracle.forward2(e, n, n);
    for (size_t b = 0; b < bands.size(); ++b)
      for (size_t i = 0; i < N; ++i) dense[(b * N + i) * N + col] = bands[b][i].real();
  }

  CoefficientSet w = psi.zeros();
  CounterRng rng(14, 0);
  for (ComplexGrid& b : w.bands) fill_random(b.raw(), rng);

  // Psi^H w via the dense matrix transpose.
  std::vector<cplx> expect(N, cplx{0.0, 0.0});
  for (size_t b = 0; b < w.bands.size(); ++b)
    for (size_t i = 0; i < N; ++i) {
      const cplx wv = w.bands[b][i];
      const double* row = dense.data() + (b * N + i) * N;
      for (size_t col = 0; col < N; ++col) expect[col] += row[col] * wv;
    }
  ComplexGrid adj = psi.adjoint(w);
  CHECK(max_abs_diff(adj.raw(), expect) < 1e-11);
}

TEST_CASE("circular shifts commute with the undecimated transform") {
  const int n = 16, sx = 5, sy = 9;
  WaveletTransform psi({WaveletFamily::haar, 2, 0}, {n, n, 1});
  ComplexGrid x = random_grid({n, n, 1}, 15);
  ComplexGrid xs({n, n, 1}, Domain::image);
  for (int y = 0; y < n; ++y)
    for (int i = 0; i < n; ++i) xs.at(pwrap(i + sx, n), pwrap(y + sy, n)) = x.at(i, y);

  CoefficientSet w = psi.forward(x);
  CoefficientSet ws = psi.forward(xs);
  for (size_t b = 0; b < w.bands.size(); ++b)
    for (int y = 0; y < n; ++y)
      for (int i = 0; i < n; ++i)
        CHECK(std::abs(ws.bands[b].at(pwrap(i + sx, n), pwrap(y + sy, n)) - w.bands[b].at(i, y)) <
              1e-12);
}

TEST_CASE("infeasible level counts are rejected") {
  CHECK_THROWS_AS(WaveletTransform({WaveletFamily::haar, 5, 0}, {16, 16, 1}), config_error);
  CHECK_THROWS_AS(WaveletTransform({WaveletFamily::haar, 2, 2}, {16, 16, 2}), config_error);
  CHECK_THROWS_AS(WaveletTransform({WaveletFamily::haar, 0, 0}, {16, 16, 1}), config_error);
}

TEST_CASE("band shape mismatches are contract violations") {
  WaveletTransform psi({WaveletFamily::haar, 2, 0}, {16, 16, 1});
  CoefficientSet w = psi.zeros();
  w.bands.pop_back();
  CHECK_THROWS_AS(psi.adjoint(w), contract_error);
}
