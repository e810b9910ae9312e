#include <doctest.h>

#include <Eigen/Dense>

#include "coreks/sampling.hpp"
#include "coreks/sensing.hpp"
#include "support/test_support.hpp"

using namespace coreks;
using namespace coreks::testing;

namespace {

SamplingMask full_mask(int ny, int nt) {
  SamplingMask m(ny, nt, 1.0);
  for (auto& s : m.selected) s = 1;
  return m;
}

SamplingMask alternating_mask(int ny, int nt) {
  SamplingMask m(ny, nt, 2.0);
  for (int t = 0; t < nt; ++t)
    for (int y = t % 2; y < ny; y += 2) m.set(y, t);
  return m;
}

// Dense matrix of the operator, built from the centered DFT formula rather
// than the implementation: row ((c*cells + cell)*nx + k), column (y*nx + x).
Eigen::MatrixXcd dense_operator(const SensingOperator& A,
                                const std::vector<ComplexGrid>& maps) {
  const int nx = A.dims().nx, ny = A.dims().ny;
  const auto cells = A.mask().cells();
  const int coils = A.coils();
  const std::vector<cplx> wx = centered_dft_matrix(nx);
  const std::vector<cplx> wy = centered_dft_matrix(ny);
  Eigen::MatrixXcd M(static_cast<long>(coils) * cells.size() * nx, static_cast<long>(nx) * ny);
  for (int c = 0; c < coils; ++c)
    for (size_t cell = 0; cell < cells.size(); ++cell) {
      const int pe = cells[cell].first;
      for (int k = 0; k < nx; ++k) {
        const long row = (static_cast<long>(c) * cells.size() + cell) * nx + k;
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) {
            cplx v = wy[static_cast<size_t>(pe) * ny + y] * wx[static_cast<size_t>(k) * nx + x];
            if (!maps.empty()) v *= maps[c].at(x, y);
            M(row, static_cast<long>(y) * nx + x) = v;
          }
      }
    }
  return M;
}

}  // namespace

TEST_CASE("forward of zero image is all-zero readouts") {
  SensingOperator A({8, 8, 1}, alternating_mask(8, 1));
  ComplexGrid x({8, 8, 1}, Domain::image);
  KSpaceSet y = A.forward(x);
  CHECK(y.J() == 4);
  CHECK(norm2(y.raw()) == 0.0);
}

TEST_CASE("centered unit impulse gives flat magnitude across all samples") {
  SensingOperator A({8, 8, 1}, full_mask(8, 1));
  ComplexGrid x({8, 8, 1}, Domain::image);
  x.at(4, 4) = 1.0;
  KSpaceSet y = A.forward(x);
  for (const cplx& z : y.raw()) CHECK(std::abs(z) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("forward matches the dense matrix oracle on a random 8x8 image") {
  SamplingMask m(8, 1, 8.0 / 3.0);
  m.set(1, 0);
  m.set(4, 0);
  m.set(6, 0);
  SensingOperator A({8, 8, 1}, m);
  ComplexGrid x = random_grid({8, 8, 1}, 3);

  Eigen::MatrixXcd M = dense_operator(A, {});
  Eigen::VectorXcd xv(64);
  for (int i = 0; i < 64; ++i) xv(i) = x[i];
  Eigen::VectorXcd yv = M * xv;

  KSpaceSet y = A.forward(x);
  double worst = 0.0;
  for (int i = 0; i < yv.size(); ++i) worst = std::max(worst, std::abs(y.raw()[i] - yv(i)));
  CHECK(worst < 1e-10);
}

TEST_CASE("adjoint of zeros is the zero image") {
  SensingOperator A({8, 8, 1}, alternating_mask(8, 1));
  KSpaceSet y = A.forward(ComplexGrid({8, 8, 1}, Domain::image));
  ComplexGrid x = A.adjoint(y);
  CHECK(norm2(x.raw()) == 0.0);
}

TEST_CASE("adjoint identity holds for random vectors") {
  SensingOperator A({8, 6, 2}, alternating_mask(6, 2));
  ComplexGrid x = random_grid({8, 6, 2}, 4);
  KSpaceSet y = A.forward(random_grid({8, 6, 2}, 5));
  CounterRng rng(6, 0);
  fill_random(y.raw(), rng);

  const KSpaceSet ax = A.forward(x);
  const ComplexGrid aty = A.adjoint(y);
  const cplx lhs = dot(ax.raw(), y.raw());
  const cplx rhs = dot(x.raw(), aty.raw());
  CHECK(std::abs(lhs - rhs) <= 1e-10 * norm2(ax.raw()) * norm2(y.raw()));
}

TEST_CASE("adjoint-forward is the identity under full sampling, and matches AHA") {
  SensingOperator A({8, 8, 1}, full_mask(8, 1));
  ComplexGrid x = random_grid({8, 8, 1}, 7);
  ComplexGrid back = A.adjoint(A.forward(x));
  CHECK(rel_err(back.raw(), x.raw()) < 1e-10);

  Eigen::MatrixXcd M = dense_operator(A, {});
  Eigen::MatrixXcd AHA = M.adjoint() * M;
  CHECK((AHA - Eigen::MatrixXcd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectral norm estimates") {
  SUBCASE("full sampling, single coil is unitary") {
    SensingOperator A({8, 8, 1}, full_mask(8, 1));
    CHECK(A.estimate_spectral_norm(1) == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("subsampling does not expand the norm") {
    SensingOperator A({8, 8, 1}, alternating_mask(8, 1));
    CHECK(A.estimate_spectral_norm(1) <= 1.0 + 1e-9);
  }
  SUBCASE("multi-coil random mask matches the dense SVD oracle") {
    SamplingMask m(8, 1, 8.0 / 3.0);
    m.set(0, 0);
    m.set(3, 0);
    m.set(5, 0);
    std::vector<ComplexGrid> maps;
    for (int c = 0; c < 2; ++c) {
      ComplexGrid g({8, 8, 1}, Domain::image);
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          g.at(x, y) = cplx(0.4 + 0.1 * ((x + 8 * c) % 5), 0.05 * ((y * (c + 1)) % 3));
      maps.push_back(g);
    }
    SensingOperator A({8, 8, 1}, m, maps);
    Eigen::MatrixXcd M = dense_operator(A, maps);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const double expect = svd.singularValues()(0);
    CHECK(A.estimate_spectral_norm(1, 2000, 1e-9) == doctest::Approx(expect).epsilon(0.01));
  }
}

TEST_CASE("forward is linear") {
  SensingOperator A({8, 8, 1}, alternating_mask(8, 1));
  ComplexGrid x1 = random_grid({8, 8, 1}, 8);
  ComplexGrid x2 = random_grid({8, 8, 1}, 9);
  const cplx a{0.7, -1.3}, b{-0.2, 0.5};

  ComplexGrid mix({8, 8, 1}, Domain::image);
  for (size_t i = 0; i < mix.size(); ++i) mix[i] = a * x1[i] + b * x2[i];
  KSpaceSet lhs = A.forward(mix);
  KSpaceSet y1 = A.forward(x1), y2 = A.forward(x2);
  std::vector<cplx> rhs(lhs.raw().size());
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] = a * y1.raw()[i] + b * y2.raw()[i];
  CHECK(rel_err(lhs.raw(), rhs) < 1e-12);
}

TEST_CASE("readout structure: one readout per selected cell, K = nx") {
  SamplingMask m = alternating_mask(6, 2);
  SensingOperator A({10, 6, 2}, m);
  KSpaceSet y = A.forward(random_grid({10, 6, 2}, 10));
  CHECK(y.K() == 10);
  CHECK(static_cast<size_t>(y.J()) == m.count());
  auto cells = m.cells();
  for (int j = 0; j < y.J(); ++j) {
    CHECK(y.coords()[j].pe == cells[j].first);
    CHECK(y.coords()[j].frame == cells[j].second);
  }
  y.validate();
}

TEST_CASE("contract violations are reported") {
  SensingOperator A({8, 8, 1}, alternating_mask(8, 1));
  CHECK_THROWS_AS(A.forward(ComplexGrid({4, 4, 1}, Domain::image)), contract_error);

  ComplexGrid k({8, 8, 1}, Domain::kspace);
  CHECK_THROWS_AS(A.forward(k), contract_error);

  KSpaceSet bad(8);
  bad.add_readout({1, 0, 0});  // pe 1 is not selected by the even mask
  bad.add_readout({2, 0, 0});
  bad.add_readout({4, 0, 0});
  bad.add_readout({6, 0, 0});
  CHECK_THROWS_AS(A.adjoint(bad), contract_error);
}
