#include "coreks/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "coreks/container.hpp"
#include "coreks/rng.hpp"

namespace coreks {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr uint64_t kStreamSeverity = 7;
const Method kMethods[4] = {Method::CS, Method::RR, Method::SO, Method::CORe};

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double fmt_roundtrip(double v) { return v; }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", fmt_roundtrip(v));
  return buf;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CORE_RECON_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string study_name(StudyId s) { return s == StudyId::I ? "I" : "II"; }

StudyId study_from_name(const std::string& name) {
  if (name == "I" || name == "1" || name == "i") return StudyId::I;
  if (name == "II" || name == "2" || name == "ii") return StudyId::II;
  throw config_error("unknown study '" + name + "' (expected I or II)");
}

StudyConfig default_study_config(StudyId study) {
  StudyConfig cfg;
  cfg.study = study;
  cfg.sigma = study == StudyId::I ? 0.03 : 0.02;
  for (Method m : kMethods) {
    SolverConfig sc;
    sc.method = m;
    sc.sigma = cfg.sigma;
    sc.outer_iters = study == StudyId::I ? 500 : 250;
    cfg.solvers[m] = sc;
    MethodGrid grid;
    // Thresholds in units of the normalized noise scale; the Huber data term
    // puts RR's useful lambda1 range well below the quadratic methods'.
    grid.kappa1 = m == Method::RR ? std::vector<double>{0.01, 0.025, 0.06, 0.15, 0.4, 1.0}
                                  : std::vector<double>{0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
    if (m == Method::CORe) grid.kappa2 = {0.65, 0.8, 0.95, 1.15, 1.4, 1.8};
    if (m == Method::SO) grid.kappa2 = {0.9, 1.2, 1.6, 2.1, 2.8, 3.7};
    cfg.grids[m] = grid;
  }
  return cfg;
}

DrawSpec draw_for_index(const StudyConfig& cfg, int index) {
  if (index < 0 || index >= cfg.total_draws()) throw contract_error("draw index out of range");
  DrawSpec d;
  d.seed = cfg.seed_base + static_cast<uint64_t>(index);
  d.with_outliers = index < cfg.n_outlier_draws;
  d.sigma = cfg.sigma;
  if (d.with_outliers) {
    if (cfg.study == StudyId::I) {
      CounterRng sev(d.seed, kStreamSeverity);
      d.fraction = sev.uniform(0.01, 0.20);
      d.var_mult = sev.uniform(1.0, 10.0);
    } else {
      d.fraction = cfg.study2.replaced_fraction;
    }
  } else {
    // Outlier-free draws sweep the noise variance over [sigma^2, 4 sigma^2].
    const int j = index - cfg.n_outlier_draws;
    const int span = std::max(1, cfg.n_clean_draws - 1);
    d.var_mult = 1.0 + 3.0 * static_cast<double>(j) / span;
    d.sigma = cfg.sigma * std::sqrt(d.var_mult);
  }
  return d;
}

Realization make_realization(const StudyConfig& cfg, const DrawSpec& draw) {
  if (cfg.study == StudyId::I) {
    ContaminationSpec spec;
    spec.mode = ContaminationMode::noise_outliers;
    spec.fraction = draw.with_outliers ? draw.fraction : 0.0;
    spec.outlier_noise_var = draw.with_outliers ? draw.var_mult : 0.0;
    spec.seed = draw.seed;
    return simulate_study1_realization(draw.sigma, spec);
  }
  Study2Options opt = cfg.study2;
  if (!draw.with_outliers) opt.replaced_fraction = 0.0;
  return simulate_study2_realization(draw.sigma, draw.seed, opt);
}

namespace {

struct CalibrationData {
  Realization with_outliers;
  Realization clean;
  SensingOperator op_out;
  SensingOperator op_clean;
  double sig_norm;  // sigma in normalized measurement units
};

double evaluate_point(const CalibrationData& data, SolverConfig cfg) {
  double total = 0.0;
  try {
    cfg.sigma = data.with_outliers.sigma;
    total += nmse_db(solve(data.with_outliers.y, data.op_out, cfg).x_hat,
                     data.with_outliers.truth);
    cfg.sigma = data.clean.sigma;
    total += nmse_db(solve(data.clean.y, data.op_clean, cfg).x_hat, data.clean.truth);
  } catch (const divergence_error&) {
    return std::numeric_limits<double>::infinity();
  }
  return std::isfinite(total) ? total : std::numeric_limits<double>::infinity();
}

}  // namespace

CalibrationResult calibrate(const StudyConfig& cfg) {
  StudyConfig c = cfg;
  const uint64_t seed_out = cfg.seed_base + 900001;
  const uint64_t seed_clean = cfg.seed_base + 900002;

  DrawSpec d_out;
  d_out.seed = seed_out;
  d_out.with_outliers = true;
  d_out.sigma = cfg.sigma;
  if (cfg.study == StudyId::I) {
    // Mid-severity contamination for the calibration draw, so one draw
    // stands in for the whole severity range.
    d_out.fraction = 0.105;
    d_out.var_mult = 5.5;
  } else {
    d_out.fraction = cfg.study2.replaced_fraction;
  }
  DrawSpec d_clean;
  d_clean.seed = seed_clean;
  d_clean.with_outliers = false;
  d_clean.sigma = cfg.sigma;

  Realization r_out = make_realization(c, d_out);
  Realization r_clean = make_realization(c, d_clean);
  SensingOperator op_out(r_out.truth.dims(), r_out.mask);
  SensingOperator op_clean(r_clean.truth.dims(), r_clean.mask);
  const double scale = std::max(max_abs(r_out.y.raw()), 1e-300);
  CalibrationData data{std::move(r_out), std::move(r_clean), std::move(op_out),
                       std::move(op_clean), cfg.sigma / scale};

  const int threads = resolve_threads(cfg.threads);
  const int K = data.with_outliers.y.K();

  CalibrationResult result;
  result.seed_with_outliers = seed_out;
  result.seed_clean = seed_clean;

  for (Method m : kMethods) {
    const MethodGrid& grid = cfg.grids.at(m);
    if (grid.kappa1.empty()) throw calibration_error("empty lambda1 grid");
    SolverConfig base = cfg.solvers.at(m);
    base.method = m;

    // kappa is a threshold in units of the normalized noise std; the absolute
    // weights follow from tau = lambda / (mu * 2 / sigma^2).
    auto lam1_of = [&](double k1) { return 2.0 * k1 * base.mu1 / data.sig_norm; };
    auto lam2_of = [&](double k2) {
      const double group_scale = m == Method::CORe ? std::sqrt(static_cast<double>(K)) : 1.0;
      return 2.0 * k2 * base.mu2 * group_scale / data.sig_norm;
    };

    const bool joint = m == Method::SO || m == Method::CORe;
    std::vector<CalibrationPoint>& prof = result.profile[m];

    auto sweep = [&](const std::vector<double>& l1s, const std::vector<double>& l2s) {
      std::vector<CalibrationPoint> pts;
      for (double l1 : l1s)
        for (double l2 : l2s) pts.push_back({l1, l2, 0.0});
      std::vector<double> score(pts.size());
      parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
        SolverConfig sc = base;
        sc.lambda1 = pts[i].lambda1;
        if (joint) sc.lambda2 = pts[i].lambda2;
        score[i] = evaluate_point(data, sc);
      });
      size_t best = 0;
      for (size_t i = 0; i < pts.size(); ++i) {
        pts[i].summed_nmse_db = score[i];
        prof.push_back(pts[i]);
        if (score[i] < score[best]) best = i;
      }
      return pts[best];
    };

    std::vector<double> l1s;
    for (double k : grid.kappa1) l1s.push_back(lam1_of(k));

    CalibrationPoint best;
    if (!joint) {
      best = sweep(l1s, {0.0});
    } else {
      if (grid.kappa2.empty()) throw calibration_error("empty lambda2 grid");
      std::vector<double> l2s;
      for (double k : grid.kappa2) l2s.push_back(lam2_of(k));
      best = sweep(l1s, l2s);
    }
    if (!std::isfinite(best.summed_nmse_db))
      throw calibration_error("no finite objective on the " + method_name(m) + " grid");

    SolverConfig tuned = base;
    tuned.lambda1 = best.lambda1;
    if (joint) tuned.lambda2 = best.lambda2;
    result.tuned[m] = tuned;
  }
  return result;
}

SeedResult run_single_seed(const StudyConfig& cfg, const std::map<Method, SolverConfig>& tuned,
                           int index) {
  const DrawSpec draw = draw_for_index(cfg, index);
  const Realization r = make_realization(cfg, draw);
  SensingOperator A(r.truth.dims(), r.mask);

  if (cfg.write_realizations) {
    const fs::path dir = fs::path(cfg.output_dir) / "realizations";
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!ec) {
      const std::string prefix = (dir / ("seed_" + std::to_string(draw.seed))).string();
      save_kspace(prefix + ".y.coreks", r.y, r.mask.ny, r.mask.nt);
      save_mask(prefix + ".mask.coreks", r.mask);
      save_grid(prefix + ".truth.coreks", r.truth);
      json meta = {{"seed", draw.seed},       {"sigma", draw.sigma},
                   {"fraction", draw.fraction}, {"var_mult", draw.var_mult},
                   {"with_outliers", draw.with_outliers},
                   {"outlier_readout_ids", r.outlier_readout_ids}};
      std::ofstream out(prefix + ".meta.json");
      out << meta.dump(2) << "\n";
    }
  }

  SeedResult out;
  out.seed = draw.seed;
  out.with_outliers = draw.with_outliers;
  out.fraction = draw.fraction;
  out.var_mult = draw.var_mult;
  out.sigma = draw.sigma;

  for (Method m : kMethods) {
    SolverConfig sc = tuned.at(m);
    sc.method = m;
    sc.sigma = draw.sigma;
    MetricReport rep;
    rep.method = method_name(m);
    rep.seed = draw.seed;
    try {
      SolveResult res = solve(r.y, A, sc);
      rep.nmse_db = nmse_db(res.x_hat, r.truth);
      rep.ssim = ssim(res.x_hat, r.truth);
      out.diverged[m] = false;
    } catch (const divergence_error&) {
      rep.nmse_db = std::numeric_limits<double>::quiet_NaN();
      rep.ssim = std::numeric_limits<double>::quiet_NaN();
      out.diverged[m] = true;
    }
    out.reports[m] = rep;
  }
  return out;
}

void summarize(StudySummary& summary) {
  summary.mean_nmse_db.clear();
  summary.mean_ssim.clear();
  summary.n_diverged.clear();
  summary.ttests.clear();

  for (Method m : kMethods) {
    double sn = 0.0, ss = 0.0;
    int n = 0, nd = 0;
    for (const SeedResult& s : summary.seeds) {
      if (s.diverged.at(m)) {
        ++nd;
        continue;
      }
      sn += s.reports.at(m).nmse_db;
      ss += s.reports.at(m).ssim;
      ++n;
    }
    summary.mean_nmse_db[m] = n > 0 ? sn / n : std::numeric_limits<double>::quiet_NaN();
    summary.mean_ssim[m] = n > 0 ? ss / n : std::numeric_limits<double>::quiet_NaN();
    summary.n_diverged[m] = nd;
  }

  for (Method other : {Method::CS, Method::RR, Method::SO}) {
    for (const char* metric : {"nmse_db", "ssim"}) {
      std::vector<double> a, b;
      for (const SeedResult& s : summary.seeds) {
        if (s.diverged.at(Method::CORe) || s.diverged.at(other)) continue;
        const bool is_nmse = std::string(metric) == "nmse_db";
        a.push_back(is_nmse ? s.reports.at(Method::CORe).nmse_db
                            : s.reports.at(Method::CORe).ssim);
        b.push_back(is_nmse ? s.reports.at(other).nmse_db : s.reports.at(other).ssim);
      }
      TTestRow row;
      row.other = other;
      row.metric = metric;
      if (a.size() >= 2) {
        try {
          TTestResult t = paired_t_test(a, b, 3);
          row.t = t.t;
          row.p_adjusted = t.p_adjusted;
          row.significant = t.p_adjusted < 0.01;
        } catch (const degenerate_input_error&) {
          row.t = std::numeric_limits<double>::quiet_NaN();
          row.p_adjusted = std::numeric_limits<double>::quiet_NaN();
        }
      }
      summary.ttests.push_back(row);
    }
  }
}

StudySummary run_study(const StudyConfig& cfg, const std::map<Method, SolverConfig>& tuned) {
  StudySummary summary;
  summary.study = cfg.study;
  summary.seeds.resize(cfg.total_draws());
  parallel_for(cfg.total_draws(), resolve_threads(cfg.threads),
               [&](int i) { summary.seeds[i] = run_single_seed(cfg, tuned, i); });
  summarize(summary);
  return summary;
}

// --- config JSON ---

namespace {

json solver_to_json(const SolverConfig& sc) {
  json j;
  j["method"] = method_name(sc.method);
  j["lambda1"] = sc.lambda1;
  if (!std::isinf(sc.lambda2)) j["lambda2"] = sc.lambda2;
  if (sc.lambda0 != 0.0) j["lambda0"] = sc.lambda0;
  j["sigma"] = sc.sigma;
  j["mu1"] = sc.mu1;
  j["mu2"] = sc.mu2;
  j["outer_iters"] = sc.outer_iters;
  j["inner_iters"] = sc.inner_iters;
  j["step_policy"] = sc.step_policy == StepPolicy::fixed ? "fixed" : "lipschitz_estimate";
  if (sc.step_policy == StepPolicy::fixed) j["fixed_step"] = sc.fixed_step;
  j["wavelet"] = {{"family", sc.wavelet.family == WaveletFamily::haar ? "haar" : "db2"},
                  {"levels_space", sc.wavelet.levels_space},
                  {"levels_time", sc.wavelet.levels_time}};
  j["seed"] = sc.seed;
  return j;
}

SolverConfig solver_from_json(const json& j) {
  SolverConfig sc;
  sc.method = method_from_name(j.at("method").get<std::string>());
  sc.lambda1 = j.value("lambda1", sc.lambda1);
  if (j.contains("lambda2")) sc.lambda2 = j["lambda2"].get<double>();
  sc.lambda0 = j.value("lambda0", 0.0);
  sc.sigma = j.value("sigma", 1.0);
  sc.mu1 = j.value("mu1", 1.0);
  sc.mu2 = j.value("mu2", 1.0);
  sc.outer_iters = j.value("outer_iters", 500);
  sc.inner_iters = j.value("inner_iters", 4);
  if (j.value("step_policy", "lipschitz_estimate") == std::string("fixed"))
    sc.step_policy = StepPolicy::fixed;
  sc.fixed_step = j.value("fixed_step", 0.0);
  if (j.contains("wavelet")) {
    const json& w = j["wavelet"];
    sc.wavelet.family =
        w.value("family", "haar") == std::string("db2") ? WaveletFamily::db2 : WaveletFamily::haar;
    sc.wavelet.levels_space = w.value("levels_space", 2);
    sc.wavelet.levels_time = w.value("levels_time", -1);
  }
  sc.seed = j.value("seed", 0ull);
  return sc;
}

}  // namespace

void save_study_config(const StudyConfig& cfg, const std::string& path) {
  json j;
  j["study"] = study_name(cfg.study);
  j["n_outlier_draws"] = cfg.n_outlier_draws;
  j["n_clean_draws"] = cfg.n_clean_draws;
  j["sigma"] = cfg.sigma;
  j["seed_base"] = cfg.seed_base;
  j["threads"] = cfg.threads;
  j["output_dir"] = cfg.output_dir;
  j["write_realizations"] = cfg.write_realizations;
  j["study2"] = {{"replaced_fraction", cfg.study2.replaced_fraction},
                 {"fraction_of_bin", cfg.study2.fraction_of_bin},
                 {"diaphragm_shift_px", cfg.study2.diaphragm_shift_px}};
  for (const auto& [m, sc] : cfg.solvers) j["solvers"][method_name(m)] = solver_to_json(sc);
  for (const auto& [m, g] : cfg.grids) {
    j["grids"][method_name(m)]["kappa1"] = g.kappa1;
    if (!g.kappa2.empty()) j["grids"][method_name(m)]["kappa2"] = g.kappa2;
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write config '" + path + "'");
  out << j.dump(2) << "\n";
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error("config '" + path + "': " + e.what());
  }

  StudyConfig cfg = default_study_config(study_from_name(j.value("study", "I")));
  cfg.n_outlier_draws = j.value("n_outlier_draws", cfg.n_outlier_draws);
  cfg.n_clean_draws = j.value("n_clean_draws", cfg.n_clean_draws);
  if (j.contains("sigma") && j["sigma"].get<double>() > 0.0) {
    cfg.sigma = j["sigma"].get<double>();
    for (auto& [m, sc] : cfg.solvers) sc.sigma = cfg.sigma;
  }
  cfg.seed_base = j.value("seed_base", cfg.seed_base);
  cfg.threads = j.value("threads", 0);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.write_realizations = j.value("write_realizations", false);
  if (j.contains("study2")) {
    const json& s2 = j["study2"];
    cfg.study2.replaced_fraction = s2.value("replaced_fraction", 0.10);
    cfg.study2.fraction_of_bin = s2.value("fraction_of_bin", true);
    cfg.study2.diaphragm_shift_px = s2.value("diaphragm_shift_px", 12);
  }
  if (j.contains("solvers"))
    for (const auto& [name, js] : j["solvers"].items()) {
      json merged = js;
      merged["method"] = name;
      cfg.solvers[method_from_name(name)] = solver_from_json(merged);
    }
  if (j.contains("grids"))
    for (const auto& [name, jg] : j["grids"].items()) {
      MethodGrid g;
      g.kappa1 = jg.value("kappa1", std::vector<double>{});
      g.kappa2 = jg.value("kappa2", std::vector<double>{});
      if (!g.kappa1.empty()) cfg.grids[method_from_name(name)] = g;
    }
  return cfg;
}

// --- reports ---

void emit_report(const StudySummary& summary, const StudyConfig& cfg,
                 const std::map<Method, SolverConfig>& tuned) {
  const fs::path root(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(root / "configs", ec);
  if (ec) throw io_error("cannot create output directory '" + cfg.output_dir + "'");

  save_study_config(cfg, (root / "configs" / "study.json").string());
  {
    json j;
    for (const auto& [m, sc] : tuned) j[method_name(m)] = solver_to_json(sc);
    std::ofstream out(root / "configs" / "solvers.json");
    out << j.dump(2) << "\n";
  }

  {
    std::ofstream out(root / "metrics.csv");
    out << "seed,method,nmse_db,ssim,with_outliers,fraction,var_mult,sigma,diverged\n";
    for (const SeedResult& s : summary.seeds)
      for (Method m : kMethods) {
        const MetricReport& r = s.reports.at(m);
        out << s.seed << "," << method_name(m) << "," << num(r.nmse_db) << "," << num(r.ssim)
            << "," << (s.with_outliers ? 1 : 0) << "," << num(s.fraction) << ","
            << num(s.var_mult) << "," << num(s.sigma) << "," << (s.diverged.at(m) ? 1 : 0)
            << "\n";
      }
  }

  {
    std::ofstream out(root / "summary.csv");
    out << "method,mean_nmse_db,mean_ssim,n_seeds,n_diverged\n";
    if (!summary.seeds.empty())
      for (Method m : kMethods)
        out << method_name(m) << "," << num(summary.mean_nmse_db.at(m)) << ","
            << num(summary.mean_ssim.at(m)) << "," << summary.seeds.size() << ","
            << summary.n_diverged.at(m) << "\n";
  }

  {
    std::ofstream out(root / "scatter.csv");
    out << "seed,comparison,nmse_core,nmse_other,ssim_core,ssim_other,with_outliers\n";
    for (const SeedResult& s : summary.seeds)
      for (Method other : {Method::CS, Method::RR, Method::SO}) {
        const MetricReport& rc = s.reports.at(Method::CORe);
        const MetricReport& ro = s.reports.at(other);
        out << s.seed << "," << method_name(other) << "," << num(rc.nmse_db) << ","
            << num(ro.nmse_db) << "," << num(rc.ssim) << "," << num(ro.ssim) << ","
            << (s.with_outliers ? 1 : 0) << "\n";
      }
  }

  {
    std::ofstream out(root / "stats.txt");
    out << "Study " << study_name(summary.study) << ", " << summary.seeds.size()
        << " realizations. Paired t-tests vs core, Bonferroni n = 3, alpha = 0.01.\n";
    for (const TTestRow& row : summary.ttests)
      out << "core vs " << method_name(row.other) << " [" << row.metric << "]: t = " << row.t
          << ", p_adjusted = " << row.p_adjusted << ", significant: "
          << (row.significant ? "yes" : "no") << "\n";
  }
}

std::vector<SeedResult> parse_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw format_error("'" + path + "' empty", 0);

  std::map<uint64_t, SeedResult> by_seed;
  std::vector<uint64_t> order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    size_t pos = 0;
    while (true) {
      size_t c = line.find(',', pos);
      f.push_back(line.substr(pos, c == std::string::npos ? c : c - pos));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    if (f.size() != 9) throw format_error("'" + path + "' bad row", 0);
    const uint64_t seed = std::stoull(f[0]);
    if (!by_seed.count(seed)) order.push_back(seed);
    SeedResult& s = by_seed[seed];
    s.seed = seed;
    s.with_outliers = f[4] == "1";
    s.fraction = std::strtod(f[5].c_str(), nullptr);
    s.var_mult = std::strtod(f[6].c_str(), nullptr);
    s.sigma = std::strtod(f[7].c_str(), nullptr);
    const Method m = method_from_name(f[1]);
    MetricReport rep;
    rep.method = f[1];
    rep.seed = seed;
    rep.nmse_db = std::strtod(f[2].c_str(), nullptr);
    rep.ssim = std::strtod(f[3].c_str(), nullptr);
    s.reports[m] = rep;
    s.diverged[m] = f[8] == "1";
  }
  std::vector<SeedResult> out;
  out.reserve(order.size());
  for (uint64_t seed : order) out.push_back(by_seed[seed]);
  return out;
}

}  // namespace coreks
