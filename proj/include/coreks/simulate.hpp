#pragma once

#include <cstdint>
#include <vector>

#include "coreks/grid.hpp"
#include "coreks/kspace.hpp"
#include "coreks/sensing.hpp"

namespace coreks {

enum class ContaminationMode { noise_outliers, motion_outliers };

struct ContaminationSpec {
  ContaminationMode mode = ContaminationMode::noise_outliers;
  double fraction = 0.0;          // fraction of readouts contaminated
  double outlier_noise_var = 0.0; // added noise variance, as a multiple of sigma^2
  uint64_t seed = 0;
};

// One simulated acquisition: contaminated noisy measurements plus everything
// needed to score a reconstruction against the truth. Bit-reproducible from
// the seed.
struct Realization {
  KSpaceSet y;
  SamplingMask mask;
  ComplexGrid truth;
  std::vector<int> outlier_readout_ids;
  double sigma = 0.0;
  uint64_t seed = 0;
};

struct Study2Options {
  double replaced_fraction = 0.10;
  bool fraction_of_bin = true;  // false: fraction counted against both bins combined
  int diaphragm_shift_px = 12;
};

// Static phantom protocol: 128x128 image, golden-ratio mask at R = 2.2,
// complex Gaussian noise of variance sigma^2 on every sample, and
// ceil(fraction*J) readouts hit with extra noise of the given variance.
Realization simulate_study1_realization(double sigma, const ContaminationSpec& spec);

// Dynamic phantom protocol: 256x256 two-state torso, 130 sampled readouts;
// 10% of the retained expiratory-bin readouts are replaced by the
// inspiratory state at the same coordinates before noise is added.
Realization simulate_study2_realization(double sigma, uint64_t seed,
                                        const Study2Options& opt = {});

}  // namespace coreks
