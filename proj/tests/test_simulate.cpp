#include <doctest.h>

#include <cmath>

#include "coreks/phantom.hpp"
#include "coreks/simulate.hpp"
#include "support/test_support.hpp"

using namespace coreks;
using namespace coreks::testing;

TEST_CASE("study I: clean draw differs from the noiseless forward model by noise only") {
  const double sigma = 0.03;
  Realization r = simulate_study1_realization(sigma, {ContaminationMode::noise_outliers, 0.0,
                                                      0.0, 42});
  CHECK(r.outlier_readout_ids.empty());
  CHECK(r.y.J() == 58);
  CHECK(r.y.K() == 128);

  SensingOperator A(r.truth.dims(), r.mask);
  KSpaceSet clean = A.forward(r.truth);
  double acc = 0.0;
  for (size_t i = 0; i < clean.raw().size(); ++i) acc += std::norm(r.y.raw()[i] - clean.raw()[i]);
  const double var = acc / static_cast<double>(clean.raw().size());
  // 7424 samples: the sample variance should sit within ~10%.
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.10));
}

TEST_CASE("study I: contaminated readout count and variance match the draw") {
  const double sigma = 0.02;
  ContaminationSpec spec{ContaminationMode::noise_outliers, 0.20, 6.0, 77};
  Realization r = simulate_study1_realization(sigma, spec);
  CHECK(r.outlier_readout_ids.size() == 12u);  // ceil(0.20 * 58)

  SensingOperator A(r.truth.dims(), r.mask);
  KSpaceSet clean = A.forward(r.truth);

  // Pooled per-sample variance over the contaminated readouts.
  double acc = 0.0;
  size_t n = 0;
  for (int id : r.outlier_readout_ids) {
    for (int k = 0; k < r.y.K(); ++k) {
      acc += std::norm(r.y.readout(id)[k] - clean.readout(id)[k]);
      ++n;
    }
  }
  const double var = acc / static_cast<double>(n);
  CHECK(var == doctest::Approx(sigma * sigma * (1.0 + spec.outlier_noise_var)).epsilon(0.10));

  // Non-listed readouts carry base noise only.
  std::vector<bool> is_outlier(r.y.J(), false);
  for (int id : r.outlier_readout_ids) is_outlier[id] = true;
  acc = 0.0;
  n = 0;
  for (int j = 0; j < r.y.J(); ++j) {
    if (is_outlier[j]) continue;
    for (int k = 0; k < r.y.K(); ++k) {
      acc += std::norm(r.y.readout(j)[k] - clean.readout(j)[k]);
      ++n;
    }
  }
  CHECK(acc / static_cast<double>(n) == doctest::Approx(sigma * sigma).epsilon(0.10));
}

TEST_CASE("study I: realizations are bit-reproducible from the seed") {
  ContaminationSpec spec{ContaminationMode::noise_outliers, 0.10, 4.0, 123};
  Realization a = simulate_study1_realization(0.03, spec);
  Realization b = simulate_study1_realization(0.03, spec);
  CHECK(max_abs_diff(a.y.raw(), b.y.raw()) == 0.0);
  CHECK(a.outlier_readout_ids == b.outlier_readout_ids);
  CHECK(a.mask.selected == b.mask.selected);
}

TEST_CASE("study II: bin-relative replacement of 13 of 130 readouts") {
  Realization r = simulate_study2_realization(0.05, 9);
  CHECK(r.y.J() == 130);
  CHECK(r.y.K() == 256);
  CHECK(r.outlier_readout_ids.size() == 13u);

  // Alternative reading: fraction counted against both bins (260 readouts).
  Study2Options both;
  both.fraction_of_bin = false;
  Realization r2 = simulate_study2_realization(0.05, 9, both);
  CHECK(r2.outlier_readout_ids.size() == 26u);
}

TEST_CASE("study II: replaced readouts equal the inspiratory forward model exactly") {
  Realization r = simulate_study2_realization(0.0, 15);  // zero noise isolates replacement
  ComplexGrid insp = make_phantom({PhantomKind::dynamic_256, MotionState::inspiratory, 12});
  SensingOperator A(r.truth.dims(), r.mask);
  KSpaceSet y_exp = A.forward(r.truth);
  KSpaceSet y_insp = A.forward(insp);

  std::vector<bool> is_outlier(r.y.J(), false);
  for (int id : r.outlier_readout_ids) is_outlier[id] = true;
  for (int j = 0; j < r.y.J(); ++j) {
    const KSpaceSet& want = is_outlier[j] ? y_insp : y_exp;
    for (int k = 0; k < r.y.K(); ++k) CHECK(r.y.readout(j)[k] == want.readout(j)[k]);
  }
}

TEST_CASE("study II: zero-noise zero-replacement draw reproduces the masked truth spectrum") {
  Study2Options opt;
  opt.replaced_fraction = 0.0;
  Realization r = simulate_study2_realization(0.0, 21, opt);
  CHECK(r.outlier_readout_ids.empty());

  SensingOperator A(r.truth.dims(), r.mask);
  ComplexGrid via_y = A.adjoint(r.y);
  ComplexGrid via_truth = A.adjoint(A.forward(r.truth));
  CHECK(max_abs_diff(via_y.raw(), via_truth.raw()) < 1e-14);
}

TEST_CASE("study II: noise calibration over >= 1e4 samples") {
  const double sigma = 0.05;
  Study2Options opt;
  opt.replaced_fraction = 0.0;
  Realization r = simulate_study2_realization(sigma, 33, opt);
  SensingOperator A(r.truth.dims(), r.mask);
  KSpaceSet clean = A.forward(r.truth);
  REQUIRE(clean.raw().size() >= 10000u);
  double acc = 0.0;
  for (size_t i = 0; i < clean.raw().size(); ++i) acc += std::norm(r.y.raw()[i] - clean.raw()[i]);
  CHECK(acc / static_cast<double>(clean.raw().size()) ==
        doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("contamination bookkeeping: ids are sorted, distinct, in range") {
  ContaminationSpec spec{ContaminationMode::noise_outliers, 0.17, 2.0, 55};
  Realization r = simulate_study1_realization(0.03, spec);
  CHECK(r.outlier_readout_ids.size() == static_cast<size_t>(std::ceil(0.17 * r.y.J())));
  for (size_t i = 0; i < r.outlier_readout_ids.size(); ++i) {
    CHECK(r.outlier_readout_ids[i] >= 0);
    CHECK(r.outlier_readout_ids[i] < r.y.J());
    if (i > 0) CHECK(r.outlier_readout_ids[i] > r.outlier_readout_ids[i - 1]);
  }
}
