#pragma once

#include <map>
#include <string>
#include <vector>

#include "coreks/metrics.hpp"
#include "coreks/simulate.hpp"
#include "coreks/solvers.hpp"

namespace coreks {

enum class StudyId { I, II };

std::string study_name(StudyId s);
StudyId study_from_name(const std::string& name);

// Calibration grids are expressed as thresholds relative to the normalized
// noise scale (kappa); calibrate() resolves them to absolute lambdas.
struct MethodGrid {
  std::vector<double> kappa1;
  std::vector<double> kappa2;  // SO/CORe only
};

struct StudyConfig {
  StudyId study = StudyId::I;
  int n_outlier_draws = 50;
  int n_clean_draws = 5;
  double sigma = 0.0;  // 0 selects the per-study default
  uint64_t seed_base = 1000;
  int threads = 0;  // 0: CORE_RECON_THREADS env or hardware concurrency
  std::string output_dir = "study_out";
  std::map<Method, SolverConfig> solvers;
  std::map<Method, MethodGrid> grids;
  Study2Options study2{};
  bool write_realizations = false;

  int total_draws() const { return n_outlier_draws + n_clean_draws; }
};

// Fully populated defaults for a study (T, sigma, grids, wavelet choices).
StudyConfig default_study_config(StudyId study);

// JSON round trip for config files (documented schema).
StudyConfig load_study_config(const std::string& path);
void save_study_config(const StudyConfig& cfg, const std::string& path);

// What the simulation protocol draws for one seed index.
struct DrawSpec {
  uint64_t seed = 0;
  bool with_outliers = false;
  double fraction = 0.0;
  double var_mult = 0.0;
  double sigma = 0.0;
};

DrawSpec draw_for_index(const StudyConfig& cfg, int index);
Realization make_realization(const StudyConfig& cfg, const DrawSpec& draw);

struct CalibrationPoint {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double summed_nmse_db = 0.0;
};

struct CalibrationResult {
  std::map<Method, SolverConfig> tuned;
  std::map<Method, std::vector<CalibrationPoint>> profile;
  uint64_t seed_with_outliers = 0;
  uint64_t seed_clean = 0;
};

// Grid search minimizing the summed NMSE (dB) over two extra realizations,
// one with and one without outliers; their seeds are disjoint from the study
// range. SO/CORe use coordinate sweeps over (lambda1, lambda2).
CalibrationResult calibrate(const StudyConfig& cfg);

struct SeedResult {
  uint64_t seed = 0;
  bool with_outliers = false;
  double fraction = 0.0;
  double var_mult = 0.0;
  double sigma = 0.0;
  std::map<Method, MetricReport> reports;
  std::map<Method, bool> diverged;
};

struct TTestRow {
  Method other = Method::CS;
  std::string metric;
  double t = 0.0;
  double p_adjusted = 1.0;
  bool significant = false;  // at alpha = 0.01
};

struct StudySummary {
  StudyId study = StudyId::I;
  std::vector<SeedResult> seeds;
  std::map<Method, double> mean_nmse_db;
  std::map<Method, double> mean_ssim;
  std::map<Method, int> n_diverged;
  std::vector<TTestRow> ttests;
};

// All four methods on byte-identical realizations per seed, parallel across
// seeds with a fixed reduction order.
StudySummary run_study(const StudyConfig& cfg, const std::map<Method, SolverConfig>& tuned);

// One seed in isolation; bit-identical to its slot in run_study.
SeedResult run_single_seed(const StudyConfig& cfg, const std::map<Method, SolverConfig>& tuned,
                           int index);

// Recomputes means and t-tests from the per-seed reports.
void summarize(StudySummary& summary);

// Writes summary.csv / metrics.csv / scatter.csv / stats.txt (+ configs/).
void emit_report(const StudySummary& summary, const StudyConfig& cfg,
                 const std::map<Method, SolverConfig>& tuned);

// Lossless reload of the per-seed metrics written by emit_report.
std::vector<SeedResult> parse_metrics_csv(const std::string& path);

int resolve_threads(int requested);

}  // namespace coreks
