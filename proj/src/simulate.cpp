#include "coreks/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "coreks/phantom.hpp"
#include "coreks/rng.hpp"
#include "coreks/sampling.hpp"

namespace coreks {
namespace {

// Stream ids for the per-realization counter RNG.
enum : uint64_t { kStreamNoise = 1, kStreamSelect = 2, kStreamOutlier = 3 };

void add_noise(KSpaceSet& y, double var, CounterRng& rng) {
  if (var <= 0.0) return;
  for (cplx& z : y.raw()) z += rng.cgaussian(var);
}

std::vector<int> pick_distinct(int count, int total, CounterRng& rng) {
  std::vector<int> ids(total);
  for (int i = 0; i < total; ++i) ids[i] = i;
  for (int i = 0; i < count; ++i) {
    int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(total - i)));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

Realization simulate_study1_realization(double sigma, const ContaminationSpec& spec) {
  if (spec.mode != ContaminationMode::noise_outliers)
    throw contract_error("study I expects noise_outliers mode");
  if (spec.fraction < 0.0 || spec.fraction > 1.0) throw config_error("fraction must be in [0,1]");

  Realization r;
  r.sigma = sigma;
  r.seed = spec.seed;
  r.truth = make_phantom({PhantomKind::shepp_logan_128, MotionState::statik});
  r.mask = make_gro_mask(128, 1, 2.2, spec.seed);

  SensingOperator A(r.truth.dims(), r.mask);
  r.y = A.forward(r.truth);

  const int J = r.y.J();
  const int n_outliers = static_cast<int>(std::ceil(spec.fraction * J - 1e-12));
  if (n_outliers > 0) {
    CounterRng sel(spec.seed, kStreamSelect);
    r.outlier_readout_ids = pick_distinct(n_outliers, J, sel);
    CounterRng orng(spec.seed, kStreamOutlier);
    const double var = spec.outlier_noise_var * sigma * sigma;
    for (int id : r.outlier_readout_ids) {
      cplx* ro = r.y.readout(id);
      for (int k = 0; k < r.y.K(); ++k) ro[k] += orng.cgaussian(var);
    }
  }

  CounterRng nrng(spec.seed, kStreamNoise);
  add_noise(r.y, sigma * sigma, nrng);
  return r;
}

Realization simulate_study2_realization(double sigma, uint64_t seed, const Study2Options& opt) {
  Realization r;
  r.sigma = sigma;
  r.seed = seed;
  r.truth = make_phantom({PhantomKind::dynamic_256, MotionState::expiratory,
                          opt.diaphragm_shift_px});
  ComplexGrid insp = make_phantom(
      {PhantomKind::dynamic_256, MotionState::inspiratory, opt.diaphragm_shift_px});

  // 260 readouts across the two motion states, 130 retained in the target bin.
  r.mask = make_gro_mask(256, 1, 256.0 / 130.0, seed);
  SensingOperator A(r.truth.dims(), r.mask);
  r.y = A.forward(r.truth);
  KSpaceSet y_insp = A.forward(insp);

  const int J = r.y.J();
  const int base = opt.fraction_of_bin ? J : 2 * J;
  const int n_replaced =
      std::min(J, static_cast<int>(std::ceil(opt.replaced_fraction * base - 1e-12)));
  if (n_replaced > 0) {
    CounterRng sel(seed, kStreamSelect);
    r.outlier_readout_ids = pick_distinct(n_replaced, J, sel);
    for (int id : r.outlier_readout_ids)
      std::copy_n(y_insp.readout(id), r.y.K(), r.y.readout(id));
  }

  CounterRng nrng(seed, kStreamNoise);
  add_noise(r.y, sigma * sigma, nrng);
  return r;
}

}  // namespace coreks
