#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "coreks/kspace.hpp"
#include "coreks/sensing.hpp"
#include "coreks/wavelet.hpp"

namespace coreks {

enum class Method { CS, RR, SO, CORe };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

enum class StepPolicy { fixed, lipschitz_estimate };

struct SolverConfig {
  Method method = Method::CS;
  double lambda1 = 1e-3;
  // Outlier weight (SO/CORe). +inf disables the outlier variable entirely,
  // which reduces both methods to CS exactly.
  double lambda2 = std::numeric_limits<double>::infinity();
  // RR data weight; <= 0 selects 4/sigma in normalized units. The RR data
  // term is the Moreau-smoothed l1 realized by the residual split, with
  // Huber width lambda0 * sigma^2 / (2 mu2).
  double lambda0 = 0.0;
  double sigma = 1.0;
  // Split penalties, expressed relative to the 2/sigma^2 data curvature so
  // the defaults stay serviceable across noise levels.
  double mu1 = 1.0;
  double mu2 = 1.0;
  int outer_iters = 500;   // T
  int inner_iters = 4;     // gradient-descent sub-iterations
  // The outlier variable activates after this fraction of the schedule, so
  // readout residuals are judged against a converged reconstruction.
  double v_warmup_fraction = 0.5;
  // Capture decisions are revisited this often (iterations), letting the
  // reconstruction settle between changes of the rejected set.
  int v_capture_period = 10;
  // At most this fraction of groups may be rejected at once.
  double v_max_capture_fraction = 0.25;
  StepPolicy step_policy = StepPolicy::lipschitz_estimate;
  double fixed_step = 0.0; // used when step_policy == fixed
  WaveletConfig wavelet{};
  bool trace = false;
  uint64_t seed = 0;       // spectral-norm estimation seed

  void validate() const;
};

struct ResidualSample {
  double primal1 = 0.0;  // ||Psi x - w1||
  double primal2 = 0.0;  // ||g(v) - w2|| (or ||Ax - y - r|| for RR)
  double dual1 = 0.0;
  double dual2 = 0.0;
};

struct SolveResult {
  ComplexGrid x_hat;
  OutlierField v_hat;  // empty (J = 0) for CS/RR
  std::vector<double> objective_trace;        // when trace; normalized units
  std::vector<ResidualSample> residual_trace; // every outer iteration
  std::vector<double> elapsed_trace;          // when trace: seconds since start
  std::vector<int> zero_norm_groups;          // when trace: groups where the
                                              // v/||v|| = 0 rule fired
};

struct SolverState {
  ComplexGrid x;
  OutlierField v;
  CoefficientSet w1;
  std::vector<double> w2;
  CoefficientSet u1;
  std::vector<double> u2;
  int iteration = 0;
};

// Runs the configured method. Measurements are normalized to unit max
// magnitude internally (sigma scales along, outputs are scaled back), so the
// result is homogeneous in the data: solve(a*y, a*sigma) == a * solve(y, sigma).
SolveResult solve(const KSpaceSet& y, const SensingOperator& A, const SolverConfig& cfg);

// The method's primal objective at (x, v), in the units of the arguments.
// For RR with lambda0 <= 0 the weight resolves to 4/sigma.
double objective_value(const SolverState& state, const KSpaceSet& y, const SensingOperator& A,
                       const SolverConfig& cfg);

// Wirtinger gradient of H(v) = (mu2/2) * sum_g (||v_g|| - r2_g)^2, accumulated
// into grad: per group g, grad += mu2 * (v_g - r2_g * v_g / ||v_g||), with
// v/||v|| taken as 0 on zero-norm groups. Returns how many groups hit that
// rule while r2_g was nonzero. Used by the v-update; exposed for gradient
// checks.
int add_group_norm_penalty_gradient(const std::vector<cplx>& v, const std::vector<double>& r2,
                                    double mu2, int group_size, std::vector<cplx>& grad);

}  // namespace coreks
