#include <doctest.h>

#include "coreks/fft.hpp"
#include "support/test_support.hpp"

using namespace coreks;
using namespace coreks::testing;

TEST_CASE("centered fft is unitary and flips the domain tag") {
  ComplexGrid x = random_grid({16, 12, 2}, 1);
  ComplexGrid y = x;
  fft2_centered(y, false);
  CHECK(y.domain() == Domain::kspace);
  CHECK(norm2(y.raw()) == doctest::Approx(norm2(x.raw())).epsilon(1e-12));
  fft2_centered(y, true);
  CHECK(y.domain() == Domain::image);
  CHECK(rel_err(y.raw(), x.raw()) < 1e-12);
}

TEST_CASE("centered impulse transforms to a flat real spectrum") {
  ComplexGrid x({8, 8, 1}, Domain::image);
  x.at(4, 4) = 1.0;
  fft2_centered(x, false);
  const double expect = 1.0 / 8.0;
  for (size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].real() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(x[i].imag()) < 1e-14);
  }
}

TEST_CASE("forward matches the independent centered dft matrix") {
  const int n = 8;
  ComplexGrid x = random_grid({n, n, 1}, 2);
  ComplexGrid y = x;
  fft2_centered(y, false);

  const std::vector<cplx> w = centered_dft_matrix(n);
  std::vector<cplx> expect(x.size());
  for (int ky = 0; ky < n; ++ky)
    for (int kx = 0; kx < n; ++kx) {
      cplx acc{0.0, 0.0};
      for (int yy = 0; yy < n; ++yy)
        for (int xx = 0; xx < n; ++xx)
          acc += w[static_cast<size_t>(ky) * n + yy] * w[static_cast<size_t>(kx) * n + xx] *
                 x.at(xx, yy);
      expect[static_cast<size_t>(ky) * n + kx] = acc;
    }
  CHECK(max_abs_diff(y.raw(), expect) < 1e-12);
}
