#include "coreks/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "coreks/fft.hpp"
#include "coreks/prox.hpp"

namespace coreks {

std::string method_name(Method m) {
  switch (m) {
    case Method::CS: return "cs";
    case Method::RR: return "rr";
    case Method::SO: return "so";
    case Method::CORe: return "core";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "cs") return Method::CS;
  if (name == "rr") return Method::RR;
  if (name == "so") return Method::SO;
  if (name == "core") return Method::CORe;
  throw config_error("unknown method '" + name + "' (expected cs|rr|so|core)");
}

void SolverConfig::validate() const {
  if (!(lambda1 > 0.0)) throw config_error("lambda1 must be positive");
  if (!(sigma > 0.0)) throw config_error("sigma must be positive");
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw config_error("mu1 and mu2 must be positive");
  if (outer_iters < 1 || inner_iters < 1) throw config_error("iteration counts must be >= 1");
  const bool has_l2 = !std::isinf(lambda2);
  if ((method == Method::CS || method == Method::RR) && has_l2)
    throw config_error("lambda2 applies to SO/CORe only");
  if ((method == Method::SO || method == Method::CORe) && !(lambda2 > 0.0))
    throw config_error("lambda2 must be positive for SO/CORe");
  if (method != Method::RR && lambda0 != 0.0) throw config_error("lambda0 applies to RR only");
  if (method == Method::RR && lambda0 < 0.0) throw config_error("lambda0 must be positive");
  if (step_policy == StepPolicy::fixed && !(fixed_step > 0.0))
    throw config_error("fixed step policy requires a positive step");
  if (v_warmup_fraction < 0.0 || v_warmup_fraction >= 1.0)
    throw config_error("v_warmup_fraction must lie in [0, 1)");
}

namespace {

// l1 of the sparsity prior: detail bands only, the approximation band is
// unpenalized.
double detail_l1_norm(const WaveletTransform& psi, const CoefficientSet& w) {
  double s = 0.0;
  for (size_t b = 0; b < w.bands.size(); ++b) {
    if (psi.is_approx_band(static_cast<int>(b))) continue;
    for (const cplx& z : w.bands[b].raw()) s += std::abs(z);
  }
  return s;
}

// Uniform grouping of the flattened readout samples: CORe groups whole
// readouts (size K), SO treats every sample as its own group.
struct Grouping {
  int size = 1;
  int count = 0;
};

double group_l1(const std::vector<cplx>& v, const Grouping& g) {
  double s = 0.0;
  for (int gi = 0; gi < g.count; ++gi) {
    double e = 0.0;
    const cplx* p = v.data() + static_cast<size_t>(gi) * g.size;
    for (int k = 0; k < g.size; ++k) e += std::norm(p[k]);
    s += std::sqrt(e);
  }
  return s;
}

struct Shared {
  const KSpaceSet& y;
  const SensingOperator& A;
  const SolverConfig& cfg;
  double sig;  // sigma in normalized units
};

// One fused shrink/dual pass: w = S_tau(target + u), u = target + u - w.
// Returns {||target - w||, ||w - w_old||}.
std::pair<double, double> shrink_and_dual(const std::vector<cplx>& target, std::vector<cplx>& w,
                                          std::vector<cplx>& u, double tau) {
  double p = 0.0, d = 0.0;
  for (size_t i = 0; i < target.size(); ++i) {
    const cplx z = target[i] + u[i];
    const cplx nw = soft_threshold(z, tau);
    p += std::norm(target[i] - nw);
    d += std::norm(nw - w[i]);
    w[i] = nw;
    u[i] = z - nw;
  }
  return {p, d};
}

// For a single-coil identity-map operator, A is row extraction after the
// unitary FFT, so the x-update can run entirely on the k-space image kx:
// per selected row the data gradient is dw (kx - target), elsewhere zero, and
// the Parseval-collapsed penalty m1 (kx - F q) is element-wise. One inverse
// FFT per outer iteration recovers x. Exact, just reordered arithmetic.
struct KSpaceUpdater {
  int nx = 0;
  size_t rows = 0;                 // ny*nt
  std::vector<size_t> row_of;      // readout j -> row index in the grid
  std::vector<int> readout_of;     // row index -> readout j (-1: unsampled)

  KSpaceUpdater() = default;
  KSpaceUpdater(const SensingOperator& A, const KSpaceSet& y)
      : nx(A.dims().nx), rows(static_cast<size_t>(A.dims().ny) * A.dims().nt) {
    row_of.resize(y.J());
    readout_of.assign(rows, -1);
    for (int j = 0; j < y.J(); ++j) {
      row_of[j] = static_cast<size_t>(y.coords()[j].frame) * A.dims().ny + y.coords()[j].pe;
      readout_of[row_of[j]] = j;
    }
  }

  // target holds per-readout rows of the data-consistency anchor. Samples
  // flagged in excluded (readout-major, may be null) carry no data weight.
  void step(ComplexGrid& kx, const ComplexGrid& kq, const KSpaceSet& target, double step_size,
            double dw, double m1, const uint8_t* excluded = nullptr) const {
    for (size_t r = 0; r < rows; ++r) {
      cplx* kr = kx.data() + r * nx;
      const cplx* qr = kq.data() + r * nx;
      const int j = readout_of[r];
      if (j >= 0) {
        const cplx* tr = target.readout(j);
        const uint8_t* ex = excluded ? excluded + static_cast<size_t>(j) * nx : nullptr;
        for (int i = 0; i < nx; ++i) {
          const double w = ex && ex[i] ? 0.0 : dw;
          kr[i] -= step_size * (w * (kr[i] - tr[i]) + m1 * (kr[i] - qr[i]));
        }
      } else {
        for (int i = 0; i < nx; ++i) kr[i] -= step_size * (m1 * (kr[i] - qr[i]));
      }
    }
  }

  void extract(const ComplexGrid& kx, KSpaceSet& out) const {
    for (int j = 0; j < out.J(); ++j) {
      const cplx* kr = kx.data() + row_of[j] * nx;
      cplx* o = out.readout(j);
      for (int i = 0; i < nx; ++i) o[i] = kr[i];
    }
  }
};

// ADMM for the sigma^2-weighted objectives (CS, SO, CORe). SO and CORe share
// the same update structure; they differ only in the grouping of v. CS is the
// lambda2 = inf limit with the outlier variable pinned to zero.
SolveResult admm_quadratic(const Shared& sh, const KSpaceSet& yn) {
  const SolverConfig& cfg = sh.cfg;
  const GridDims dims = sh.A.dims();
  const bool with_v = cfg.method != Method::CS && !std::isinf(cfg.lambda2);

  const double dw = 2.0 / (sh.sig * sh.sig);
  const double m1 = cfg.mu1 * dw;
  const double m2 = cfg.mu2 * dw;
  const double tau1 = cfg.lambda1 / m1;
  // Group capture threshold of the outlier penalty: the exact group-shrink
  // scale of the objective, independent of the split penalty.
  const double theta = with_v ? 0.5 * cfg.lambda2 * sh.sig * sh.sig : 0.0;

  WaveletTransform psi(cfg.wavelet, dims);
  const double norm_a = cfg.step_policy == StepPolicy::lipschitz_estimate
                            ? sh.A.estimate_spectral_norm(cfg.seed)
                            : 1.0;
  const double step_x =
      cfg.step_policy == StepPolicy::fixed ? cfg.fixed_step : 1.0 / (dw * norm_a * norm_a + m1);

  Grouping grp;
  grp.size = cfg.method == Method::CORe ? yn.K() : 1;
  grp.count = yn.J() * yn.K() / grp.size;
  const int warmup = with_v ? static_cast<int>(cfg.v_warmup_fraction * cfg.outer_iters) : 0;

  // State per Algorithm: x from the adjoint, everything else zero.
  ComplexGrid x = sh.A.adjoint(yn);
  OutlierField v = yn.zeros_like();
  CoefficientSet w1 = psi.zeros(), u1 = psi.zeros();
  std::vector<double> w2(with_v ? grp.count : 0, 0.0), u2 = w2;
  std::vector<uint8_t> captured(with_v ? grp.count : 0, 0);
  std::vector<uint8_t> excluded(with_v ? v.raw().size() : 0, 0);
  std::vector<double> capture_thresh(with_v ? grp.count : 0, 0.0);
  std::vector<double> group_nb(with_v ? grp.count : 0, 0.0);
  bool thresholds_set = false;

  // Scratch reused across iterations.
  KSpaceSet kres = yn.zeros_like();
  ComplexGrid gx(dims, Domain::image), gpsi(dims, Domain::image);
  CoefficientSet cw = psi.zeros(), psix = psi.zeros();

  // Fast path: keep the k-space image kx as the working variable so the
  // gradient steps need no transforms (see KSpaceUpdater).
  const bool fast = sh.A.identity_single_coil();
  KSpaceUpdater upd = fast ? KSpaceUpdater(sh.A, yn) : KSpaceUpdater();
  ComplexGrid kx, kq;
  KSpaceSet anchor;
  if (fast) {
    kx = ComplexGrid(dims, Domain::kspace);
    kq = ComplexGrid(dims, Domain::image);
    for (int j = 0; j < yn.J(); ++j) {
      const cplx* src = yn.readout(j);
      cplx* dst = kx.data() + upd.row_of[j] * dims.nx;
      for (int i = 0; i < dims.nx; ++i) dst[i] = src[i];
    }
    anchor = yn;
  }

  SolveResult out;
  out.residual_trace.reserve(cfg.outer_iters);
  const auto t0 = std::chrono::steady_clock::now();

  for (int t = 1; t <= cfg.outer_iters; ++t) {
    // x-update: gradient steps on (1/s^2)||Ax - y + v||^2 + (m1/2)||Psi x - w1 + u1||^2.
    // Psi is a Parseval frame (Psi^H Psi = I), so the penalty gradient
    // m1 Psi^H(Psi x - w1 + u1) equals m1 (x - q) with q = Psi^H(w1 - u1)
    // fixed across the sub-iterations.
    for (size_t b = 0; b < cw.bands.size(); ++b) {
      std::vector<cplx>& cb = cw.bands[b].raw();
      const std::vector<cplx>& wb = w1.bands[b].raw();
      const std::vector<cplx>& ub = u1.bands[b].raw();
      for (size_t i = 0; i < cb.size(); ++i) cb[i] = wb[i] - ub[i];
    }
    psi.adjoint_into(cw, gpsi);
    // Captured samples are excluded from the data term outright: the
    // reconstruction is driven by the retained measurements only, which is
    // the separation of y into outliers and usable data the outlier model
    // is after.
    if (fast) {
      kq.raw() = gpsi.raw();
      kq.set_domain(Domain::image);
      fft2_centered(kq, false);
      for (int it = 0; it < cfg.inner_iters; ++it)
        upd.step(kx, kq, anchor, step_x, dw, m1, with_v ? excluded.data() : nullptr);
      x.raw() = kx.raw();
      x.set_domain(Domain::kspace);
      fft2_centered(x, true);
    } else {
      for (int it = 0; it < cfg.inner_iters; ++it) {
        sh.A.forward_into(x, kres);
        for (size_t i = 0; i < kres.raw().size(); ++i) {
          kres.raw()[i] -= yn.raw()[i];
          if (with_v && excluded[i]) kres.raw()[i] = {0.0, 0.0};
        }
        sh.A.adjoint_into(kres, gx);
        for (size_t i = 0; i < x.size(); ++i)
          x[i] -= step_x * (dw * gx[i] + m1 * (x[i] - gpsi[i]));
      }
    }
    if (!all_finite(x.raw())) throw divergence_error("x-update", t);

    int zero_groups = 0;
    double p2 = 0.0, d2 = 0.0;
    if (with_v && t > warmup) {
      // v-update. The group soft-threshold solves the v-subproblem exactly,
      // but its theta-sized leftover keeps pulling x onto captured readouts
      // until x has absorbed them and v collapses (measured: v_hat -> 0 and
      // the method degenerates to CS). The stable form of the intended
      // estimator captures a group outright once its data inconsistency
      // crosses the threshold; the captured samples drop out of the data
      // term and v carries their residual, which is the automatic
      // separation of y into outliers and usable data. Thresholds combine
      // theta with a per-group allowance proportional to the group's data
      // energy, estimated from the median residual-to-energy ratio at
      // activation, so the shrinkage misfit on strong center rows is not
      // mistaken for contamination. Activation waits for the warm-up part
      // of the schedule so residuals are judged against a converged
      // reconstruction; capture decisions are revisited every
      // v_capture_period iterations with release hysteresis at half the
      // threshold.
      if (fast)
        upd.extract(kx, kres);
      else
        sh.A.forward_into(x, kres);
      for (size_t i = 0; i < kres.raw().size(); ++i) kres.raw()[i] -= yn.raw()[i];
      std::vector<cplx>& vd = v.raw();
      const std::vector<cplx>& bd = kres.raw();
      for (int g = 0; g < grp.count; ++g) {
        const size_t base = static_cast<size_t>(g) * grp.size;
        double e = 0.0;
        for (int k = 0; k < grp.size; ++k) e += std::norm(bd[base + k]);
        group_nb[g] = std::sqrt(e);
      }
      if (!thresholds_set) {
        thresholds_set = true;
        std::vector<double> energy(grp.count);
        for (int g = 0; g < grp.count; ++g) {
          const size_t base = static_cast<size_t>(g) * grp.size;
          double ye = 0.0;
          for (int k = 0; k < grp.size; ++k) ye += std::norm(yn.raw()[base + k]);
          energy[g] = std::sqrt(ye);
        }
        // Misfit of the shrinkage prior grows with a group's signal energy;
        // estimate that fraction from the strongest quarter of the groups
        // (weak groups are noise-dominated and would inflate it).
        std::vector<int> order(grp.count);
        for (int g = 0; g < grp.count; ++g) order[g] = g;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return energy[a] > energy[b]; });
        const int top = std::max(2, grp.count / 4);
        std::vector<double> ratio;
        ratio.reserve(top);
        for (int i = 0; i < top; ++i)
          if (energy[order[i]] > 0.0) ratio.push_back(group_nb[order[i]] / energy[order[i]]);
        double c = 0.0;
        if (!ratio.empty()) {
          std::nth_element(ratio.begin(), ratio.begin() + ratio.size() / 2, ratio.end());
          c = ratio[ratio.size() / 2];
        }
        for (int g = 0; g < grp.count; ++g) capture_thresh[g] = theta + c * energy[g];
      }
      if ((t - warmup - 1) % std::max(1, cfg.v_capture_period) == 0) {
        for (int g = 0; g < grp.count; ++g) {
          if (!captured[g] && group_nb[g] > capture_thresh[g])
            captured[g] = 1;
          else if (captured[g] && group_nb[g] < 0.5 * capture_thresh[g])
            captured[g] = 0;
        }
        // Rejecting data can feed itself (worse fit -> larger residuals ->
        // more rejection); keep only the strongest exceedances under the cap.
        const int cap =
            std::max(1, static_cast<int>(cfg.v_max_capture_fraction * grp.count));
        int n_captured = 0;
        for (int g = 0; g < grp.count; ++g) n_captured += captured[g];
        if (n_captured > cap) {
          std::vector<std::pair<double, int>> excess;
          excess.reserve(n_captured);
          for (int g = 0; g < grp.count; ++g)
            if (captured[g]) excess.push_back({group_nb[g] / capture_thresh[g], g});
          std::nth_element(excess.begin(), excess.begin() + cap, excess.end(),
                           [](const auto& a, const auto& b) { return a.first > b.first; });
          for (size_t i = cap; i < excess.size(); ++i) captured[excess[i].second] = 0;
        }
      }
      for (int g = 0; g < grp.count; ++g) {
        const size_t base = static_cast<size_t>(g) * grp.size;
        double gn = 0.0;
        if (captured[g]) {
          for (int k = 0; k < grp.size; ++k) {
            vd[base + k] = -bd[base + k];
            excluded[base + k] = 1;
          }
          gn = group_nb[g];
        } else {
          for (int k = 0; k < grp.size; ++k) {
            vd[base + k] = {0.0, 0.0};
            excluded[base + k] = 0;
          }
          ++zero_groups;
        }
        // w2 tracks g(v); its change doubles as the split-consistency trace.
        p2 += (gn - w2[g]) * (gn - w2[g]);
        d2 += (gn - w2[g]) * (gn - w2[g]);
        w2[g] = gn;
      }
      if (!all_finite(v.raw())) throw divergence_error("v-update", t);
    }

    // w1-update by element-wise shrinkage at lambda1/mu1, then the scaled
    // dual ascent u1 += Psi x - w1, fused band by band. The approximation
    // band is not sparse and passes through unshrunk.
    psi.forward_into(x, psix);
    double p1 = 0.0, d1 = 0.0;
    for (size_t b = 0; b < psix.bands.size(); ++b) {
      const double tb = psi.is_approx_band(static_cast<int>(b)) ? 0.0 : tau1;
      auto [p, d] = shrink_and_dual(psix.bands[b].raw(), w1.bands[b].raw(), u1.bands[b].raw(), tb);
      p1 += p;
      d1 += d;
    }

    out.residual_trace.push_back(
        {std::sqrt(p1), std::sqrt(p2), m1 * std::sqrt(d1), m2 * std::sqrt(d2)});
    if (cfg.trace) {
      if (fast)
        upd.extract(kx, kres);
      else
        sh.A.forward_into(x, kres);
      double data = 0.0;
      for (size_t i = 0; i < kres.raw().size(); ++i)
        data += std::norm(kres.raw()[i] - yn.raw()[i] + (with_v ? v.raw()[i] : cplx{0.0, 0.0}));
      double obj = data / (sh.sig * sh.sig) + cfg.lambda1 * detail_l1_norm(psi, psix);
      if (with_v) obj += cfg.lambda2 * group_l1(v.raw(), grp);
      out.objective_trace.push_back(obj);
      out.zero_norm_groups.push_back(zero_groups);
      out.elapsed_trace.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
  }

  out.x_hat = std::move(x);
  if (with_v) out.v_hat = std::move(v);
  return out;
}

// Robust regression: the residual split r = Ax - y with an element-wise
// soft-threshold r-update at lambda0/mu0. Partially minimizing the split in
// closed form makes the data term the Moreau-smoothed l1 (a Huber loss of
// width lambda0/mu0): quadratic inside the noise band, linear on outliers.
// The exact l1 fidelity interpolates noisy samples at these sampling levels,
// so the smoothed form is what the method contract needs on clean data.
SolveResult admm_l1_fidelity(const Shared& sh, const KSpaceSet& yn) {
  const SolverConfig& cfg = sh.cfg;
  const GridDims dims = sh.A.dims();

  const double dw = 2.0 / (sh.sig * sh.sig);
  const double m0 = cfg.mu2 * dw;
  const double m1 = cfg.mu1 * dw;
  const double lam0 = cfg.lambda0 > 0.0 ? cfg.lambda0 : 4.0 / sh.sig;
  const double tau_r = lam0 / m0;  // Huber width
  const double tau1 = cfg.lambda1 / m1;

  WaveletTransform psi(cfg.wavelet, dims);
  const double norm_a = cfg.step_policy == StepPolicy::lipschitz_estimate
                            ? sh.A.estimate_spectral_norm(cfg.seed)
                            : 1.0;
  const double step_x =
      cfg.step_policy == StepPolicy::fixed ? cfg.fixed_step : 1.0 / (m0 * norm_a * norm_a + m1);

  ComplexGrid x = sh.A.adjoint(yn);
  KSpaceSet r = yn.zeros_like(), kres = yn.zeros_like();
  CoefficientSet w1 = psi.zeros(), u1 = psi.zeros();
  ComplexGrid gx(dims, Domain::image), gpsi(dims, Domain::image);
  CoefficientSet cw = psi.zeros(), psix = psi.zeros();

  const bool fast = sh.A.identity_single_coil();
  KSpaceUpdater upd = fast ? KSpaceUpdater(sh.A, yn) : KSpaceUpdater();
  ComplexGrid kx, kq;
  KSpaceSet anchor;
  if (fast) {
    kx = ComplexGrid(dims, Domain::kspace);
    kq = ComplexGrid(dims, Domain::image);
    for (int j = 0; j < yn.J(); ++j) {
      const cplx* src = yn.readout(j);
      cplx* dst = kx.data() + upd.row_of[j] * dims.nx;
      for (int i = 0; i < dims.nx; ++i) dst[i] = src[i];
    }
    anchor = yn;
  }

  SolveResult out;
  out.residual_trace.reserve(cfg.outer_iters);
  const auto t0 = std::chrono::steady_clock::now();

  // The Huber width anneals from the bulk residual scale down to its target
  // over the first half of the schedule: starting at the target stalls
  // convergence (the linear zone swallows the large early residuals), while
  // anchoring the start at a bulk quantile keeps gross outliers outside the
  // trusted zone. The anchor is measured after the first outer iteration
  // (the initialization interpolates the data, so its residual is zero).
  double width_start = tau_r;

  for (int t = 1; t <= cfg.outer_iters; ++t) {
    // Same Parseval collapse of the Psi penalty as in admm_quadratic.
    for (size_t b = 0; b < cw.bands.size(); ++b) {
      std::vector<cplx>& cb = cw.bands[b].raw();
      const std::vector<cplx>& wb = w1.bands[b].raw();
      const std::vector<cplx>& ub = u1.bands[b].raw();
      for (size_t i = 0; i < cb.size(); ++i) cb[i] = wb[i] - ub[i];
    }
    psi.adjoint_into(cw, gpsi);
    if (fast) {
      kq.raw() = gpsi.raw();
      kq.set_domain(Domain::image);
      fft2_centered(kq, false);
      for (size_t i = 0; i < anchor.raw().size(); ++i)
        anchor.raw()[i] = yn.raw()[i] + r.raw()[i];
      for (int it = 0; it < cfg.inner_iters; ++it) upd.step(kx, kq, anchor, step_x, m0, m1);
      x.raw() = kx.raw();
      x.set_domain(Domain::kspace);
      fft2_centered(x, true);
    } else {
      for (int it = 0; it < cfg.inner_iters; ++it) {
        sh.A.forward_into(x, kres);
        for (size_t i = 0; i < kres.raw().size(); ++i)
          kres.raw()[i] -= yn.raw()[i] + r.raw()[i];
        sh.A.adjoint_into(kres, gx);
        for (size_t i = 0; i < x.size(); ++i)
          x[i] -= step_x * (m0 * gx[i] + m1 * (x[i] - gpsi[i]));
      }
    }
    if (!all_finite(x.raw())) throw divergence_error("x-update", t);

    // r-update: exact partial minimization by element-wise shrinkage, with
    // the annealed width.
    if (fast)
      upd.extract(kx, kres);
    else
      sh.A.forward_into(x, kres);
    for (size_t i = 0; i < kres.raw().size(); ++i) kres.raw()[i] -= yn.raw()[i];
    if (t == 1) {
      std::vector<double> mags(kres.raw().size());
      for (size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(kres.raw()[i]);
      const size_t q = mags.size() * 3 / 4;
      std::nth_element(mags.begin(), mags.begin() + q, mags.end());
      width_start = std::max(64.0 * tau_r, 6.0 * mags[q]);
    }
    const int ramp_end = cfg.outer_iters / 2;
    const double frac = t < ramp_end ? static_cast<double>(ramp_end - t) / ramp_end : 0.0;
    const double tau_r_eff = tau_r * std::pow(width_start / tau_r, frac);
    double p2 = 0.0, d2 = 0.0;
    for (size_t i = 0; i < kres.raw().size(); ++i) {
      const cplx nr = soft_threshold(kres.raw()[i], tau_r_eff);
      p2 += std::norm(kres.raw()[i] - nr);
      d2 += std::norm(nr - r.raw()[i]);
      r.raw()[i] = nr;
    }

    psi.forward_into(x, psix);
    double p1 = 0.0, d1 = 0.0;
    for (size_t b = 0; b < psix.bands.size(); ++b) {
      const double tb = psi.is_approx_band(static_cast<int>(b)) ? 0.0 : tau1;
      auto [p, d] = shrink_and_dual(psix.bands[b].raw(), w1.bands[b].raw(), u1.bands[b].raw(), tb);
      p1 += p;
      d1 += d;
    }

    out.residual_trace.push_back(
        {std::sqrt(p1), std::sqrt(p2), m1 * std::sqrt(d1), m0 * std::sqrt(d2)});
    if (cfg.trace) {
      // Objective actually minimized: the Huberized data term plus the prior.
      double data = 0.0;
      for (const cplx& z : kres.raw()) {
        const double a = std::abs(z);
        data += a <= tau_r ? 0.5 * m0 * a * a : lam0 * a - 0.5 * lam0 * tau_r;
      }
      out.objective_trace.push_back(data + cfg.lambda1 * detail_l1_norm(psi, psix));
      out.elapsed_trace.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
  }

  out.x_hat = std::move(x);
  return out;
}

}  // namespace

int add_group_norm_penalty_gradient(const std::vector<cplx>& v, const std::vector<double>& r2,
                                    double mu2, int group_size, std::vector<cplx>& grad) {
  if (group_size < 1 || v.size() % static_cast<size_t>(group_size) != 0)
    throw contract_error("group size does not divide the sample count");
  const size_t groups = v.size() / static_cast<size_t>(group_size);
  if (r2.size() != groups || grad.size() != v.size())
    throw contract_error("group gradient: shape mismatch");
  int zero_hits = 0;
  for (size_t g = 0; g < groups; ++g) {
    const size_t base = g * static_cast<size_t>(group_size);
    double e = 0.0;
    for (int k = 0; k < group_size; ++k) e += std::norm(v[base + k]);
    const double nrm = std::sqrt(e);
    double rad = 0.0;
    if (nrm > 0.0) {
      rad = r2[g] / nrm;
    } else if (r2[g] != 0.0) {
      ++zero_hits;
    }
    for (int k = 0; k < group_size; ++k) grad[base + k] += mu2 * (v[base + k] - rad * v[base + k]);
  }
  return zero_hits;
}

SolveResult solve(const KSpaceSet& y, const SensingOperator& A, const SolverConfig& cfg) {
  cfg.validate();
  if (y.K() != A.dims().nx) throw contract_error("solve: measurement K does not match operator");

  double s = max_abs(y.raw());
  if (s == 0.0) s = 1.0;
  KSpaceSet yn = y;
  scale(yn.raw(), 1.0 / s);
  Shared sh{y, A, cfg, cfg.sigma / s};

  SolveResult out = cfg.method == Method::RR ? admm_l1_fidelity(sh, yn) : admm_quadratic(sh, yn);
  scale(out.x_hat.raw(), s);
  if (out.v_hat.J() > 0) scale(out.v_hat.raw(), s);
  return out;
}

double objective_value(const SolverState& state, const KSpaceSet& y, const SensingOperator& A,
                       const SolverConfig& cfg) {
  KSpaceSet res = A.forward(state.x);
  const bool with_v = state.v.J() > 0;
  if (with_v && (state.v.J() != y.J() || state.v.K() != y.K()))
    throw contract_error("objective: outlier field shape does not match measurements");
  for (size_t i = 0; i < res.raw().size(); ++i) {
    res.raw()[i] -= y.raw()[i];
    if (with_v && cfg.method != Method::CS && cfg.method != Method::RR)
      res.raw()[i] += state.v.raw()[i];
  }

  WaveletTransform psi(cfg.wavelet, A.dims());
  const double reg1 = cfg.lambda1 * detail_l1_norm(psi, psi.forward(state.x));

  switch (cfg.method) {
    case Method::CS: {
      const double n = norm2(res.raw());
      return n * n / (cfg.sigma * cfg.sigma) + reg1;
    }
    case Method::RR: {
      // Moreau-smoothed l1 data term, matching what the solver minimizes.
      const double lam0 = cfg.lambda0 > 0.0 ? cfg.lambda0 : 4.0 / cfg.sigma;
      const double m0 = cfg.mu2 * 2.0 / (cfg.sigma * cfg.sigma);
      const double width = lam0 / m0;
      double data = 0.0;
      for (const cplx& z : res.raw()) {
        const double a = std::abs(z);
        data += a <= width ? 0.5 * m0 * a * a : lam0 * a - 0.5 * lam0 * width;
      }
      return data + reg1;
    }
    case Method::SO:
    case Method::CORe: {
      const double n = norm2(res.raw());
      double reg2 = 0.0;
      if (with_v && !std::isinf(cfg.lambda2)) {
        Grouping grp{cfg.method == Method::CORe ? y.K() : 1, 0};
        grp.count = state.v.J() * state.v.K() / grp.size;
        reg2 = cfg.lambda2 * group_l1(state.v.raw(), grp);
      }
      return n * n / (cfg.sigma * cfg.sigma) + reg1 + reg2;
    }
  }
  return 0.0;
}

}  // namespace coreks
