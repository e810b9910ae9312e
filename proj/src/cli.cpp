#include "coreks/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coreks/container.hpp"
#include "coreks/harness.hpp"
#include "coreks/metrics.hpp"
#include "coreks/phantom.hpp"
#include "coreks/rng.hpp"
#include "coreks/sampling.hpp"
#include "coreks/simulate.hpp"
#include "coreks/solvers.hpp"

namespace coreks {

using nlohmann::json;

namespace {

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

void maybe_meta(bool enabled, const std::string& data_path, json meta) {
  if (!enabled) return;
  meta["tool"] = "coreks";
  meta["file"] = data_path;
  write_json(data_path + ".json", meta);
}

struct ReconArgs {
  std::string method = "cs";
  std::string input, mask_path, out, out_v, trace_path;
  double sigma = 0.0;
  double lambda1 = 1e-3;
  double lambda2 = 0.0;  // 0: unset
  double lambda0 = 0.0;
  double mu1 = 1.0, mu2 = 1.0;
  int iters = 0;
  int inner = 4;
  std::string family = "haar";
  int levels_space = 2, levels_time = -1;
  uint64_t seed = 0;
  bool f32 = false;
};

int do_recon(const ReconArgs& a, bool json_meta) {
  LoadedKSpace y = load_kspace(a.input);
  SamplingMask mask = load_mask(a.mask_path);
  if (y.ny != 0 && y.ny != mask.ny)
    throw config_error("mask ny does not match the k-space file");

  SolverConfig cfg;
  cfg.method = method_from_name(a.method);
  cfg.lambda1 = a.lambda1;
  if (a.lambda2 > 0.0) cfg.lambda2 = a.lambda2;
  cfg.lambda0 = a.lambda0;
  cfg.sigma = a.sigma > 0.0 ? a.sigma : 1.0;
  cfg.mu1 = a.mu1;
  cfg.mu2 = a.mu2;
  cfg.outer_iters = a.iters > 0 ? a.iters : 500;
  cfg.inner_iters = a.inner;
  cfg.wavelet.family = a.family == "db2" ? WaveletFamily::db2 : WaveletFamily::haar;
  cfg.wavelet.levels_space = a.levels_space;
  cfg.wavelet.levels_time = a.levels_time;
  cfg.trace = !a.trace_path.empty();
  cfg.seed = a.seed;

  GridDims dims{y.ks.K(), mask.ny, mask.nt};
  SensingOperator A(dims, mask);
  SolveResult res = solve(y.ks, A, cfg);

  save_grid(a.out, res.x_hat, a.f32);
  maybe_meta(json_meta, a.out,
             {{"subcommand", "recon"},
              {"method", a.method},
              {"lambda1", cfg.lambda1},
              {"lambda2", std::isinf(cfg.lambda2) ? 0.0 : cfg.lambda2},
              {"sigma", cfg.sigma},
              {"outer_iters", cfg.outer_iters},
              {"inner_iters", cfg.inner_iters},
              {"seed", a.seed}});
  if (!a.out_v.empty() && res.v_hat.J() > 0) {
    save_kspace(a.out_v, res.v_hat, mask.ny, mask.nt, a.f32);
    maybe_meta(json_meta, a.out_v, {{"subcommand", "recon"}, {"content", "outlier_estimate"}});
  }
  if (!a.trace_path.empty()) {
    std::ofstream out(a.trace_path);
    if (!out) throw io_error("cannot write '" + a.trace_path + "'");
    out << "iteration,objective,primal1,primal2,elapsed_s\n";
    for (size_t i = 0; i < res.residual_trace.size(); ++i) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.6f\n", i + 1,
                    i < res.objective_trace.size() ? res.objective_trace[i] : 0.0,
                    res.residual_trace[i].primal1, res.residual_trace[i].primal2,
                    i < res.elapsed_trace.size() ? res.elapsed_trace[i] : 0.0);
      out << buf;
    }
  }
  return 0;
}

json meta_for_draw(const DrawSpec& d, const Realization& r) {
  return {{"seed", d.seed},
          {"sigma", d.sigma},
          {"fraction", d.fraction},
          {"var_mult", d.var_mult},
          {"with_outliers", d.with_outliers},
          {"outlier_readout_ids", r.outlier_readout_ids}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"coreks: undersampled k-space reconstruction with readout-outlier rejection"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json_meta = false;
  app.add_flag("--json-meta", json_meta, "write a .json sidecar next to every output");
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: CORE_RECON_THREADS or all)");

  // phantom
  auto* cmd_ph = app.add_subcommand("phantom", "rasterize a digital phantom");
  std::string ph_kind = "shepp_logan_128", ph_state = "static", ph_out;
  int ph_shift = 12;
  cmd_ph->add_option("--kind", ph_kind, "shepp_logan_128|dynamic_256");
  cmd_ph->add_option("--state", ph_state, "static|expiratory|inspiratory");
  cmd_ph->add_option("--shift", ph_shift, "diaphragm shift in pixels (dynamic)");
  cmd_ph->add_option("--out", ph_out, "output grid file")->required();

  // mask
  auto* cmd_mask = app.add_subcommand("mask", "generate a golden-ratio sampling mask");
  int mk_ny = 128, mk_nt = 1;
  double mk_r = 2.2;
  uint64_t mk_seed = 0;
  std::string mk_out;
  cmd_mask->add_option("--ny", mk_ny, "phase-encode lines");
  cmd_mask->add_option("--nt", mk_nt, "frames");
  cmd_mask->add_option("--accel", mk_r, "target acceleration R");
  cmd_mask->add_option("--seed", mk_seed, "pattern seed");
  cmd_mask->add_option("--out", mk_out, "output mask file")->required();

  // simulate
  auto* cmd_sim = app.add_subcommand("simulate", "emit one study realization");
  std::string sim_study = "I", sim_prefix;
  double sim_sigma = 0.0, sim_fraction = -1.0, sim_var = -1.0;
  uint64_t sim_seed = 1000;
  bool sim_clean = false;
  cmd_sim->add_option("--study", sim_study, "I|II");
  cmd_sim->add_option("--sigma", sim_sigma, "noise std (default: study default)");
  cmd_sim->add_option("--seed", sim_seed, "realization seed");
  cmd_sim->add_option("--fraction", sim_fraction, "study I outlier fraction (default: drawn)");
  cmd_sim->add_option("--var-mult", sim_var, "study I outlier variance multiple (default: drawn)");
  cmd_sim->add_flag("--clean", sim_clean, "no contamination");
  cmd_sim->add_option("--out-prefix", sim_prefix, "writes PREFIX.{y,mask,truth}.coreks + meta")
      ->required();

  // recon
  auto* cmd_rec = app.add_subcommand("recon", "reconstruct a container file");
  ReconArgs ra;
  cmd_rec->add_option("--method", ra.method, "cs|rr|so|core")->required();
  cmd_rec->add_option("--input", ra.input, "measured k-space container")->required();
  cmd_rec->add_option("--mask", ra.mask_path, "sampling mask container")->required();
  cmd_rec->add_option("--out", ra.out, "output image container")->required();
  cmd_rec->add_option("--out-v", ra.out_v, "output outlier-estimate container (so/core)");
  cmd_rec->add_option("--sigma", ra.sigma, "noise std");
  cmd_rec->add_option("--lambda1", ra.lambda1, "sparsity weight");
  cmd_rec->add_option("--lambda2", ra.lambda2, "outlier weight (so/core)");
  cmd_rec->add_option("--lambda0", ra.lambda0, "rr data weight (0 = auto)");
  cmd_rec->add_option("--mu1", ra.mu1, "split penalty 1");
  cmd_rec->add_option("--mu2", ra.mu2, "split penalty 2");
  cmd_rec->add_option("--iters", ra.iters, "outer iterations");
  cmd_rec->add_option("--inner", ra.inner, "gradient sub-iterations");
  cmd_rec->add_option("--wavelet", ra.family, "haar|db2");
  cmd_rec->add_option("--levels-space", ra.levels_space, "spatial wavelet levels");
  cmd_rec->add_option("--levels-time", ra.levels_time, "temporal wavelet levels (-1 auto)");
  cmd_rec->add_option("--trace", ra.trace_path, "write per-iteration trace CSV");
  cmd_rec->add_option("--seed", ra.seed, "spectral-norm seed");
  cmd_rec->add_flag("--f32", ra.f32, "write complex64 output");

  // metrics
  auto* cmd_met = app.add_subcommand("metrics", "score a reconstruction against the truth");
  std::string met_recon, met_truth, met_csv, met_method = "";
  uint64_t met_seed = 0;
  cmd_met->add_option("--recon", met_recon, "reconstructed grid")->required();
  cmd_met->add_option("--truth", met_truth, "reference grid")->required();
  cmd_met->add_option("--csv", met_csv, "append a CSV row here");
  cmd_met->add_option("--method", met_method, "method label for the CSV row");
  cmd_met->add_option("--seed", met_seed, "seed label for the CSV row");

  // calibrate
  auto* cmd_cal = app.add_subcommand("calibrate", "grid-search solver weights for a study");
  std::string cal_config, cal_out = "calibrated.json";
  cmd_cal->add_option("--config", cal_config, "study config JSON (default: study defaults)");
  std::string cal_study = "I";
  cmd_cal->add_option("--study", cal_study, "I|II (when no config given)");
  cmd_cal->add_option("--out", cal_out, "output tuned-solvers JSON");

  // study
  auto* cmd_study = app.add_subcommand("study", "run a full simulation study");
  std::string st_config, st_study = "I", st_out;
  bool st_no_cal = false;
  cmd_study->add_option("--config", st_config, "study config JSON");
  cmd_study->add_option("--study", st_study, "I|II (when no config given)");
  cmd_study->add_option("--out", st_out, "output directory (overrides config)");
  cmd_study->add_flag("--no-calibrate", st_no_cal, "use the solver configs as given");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_ph->parsed()) {
      PhantomSpec spec;
      if (ph_kind == "shepp_logan_128") spec.kind = PhantomKind::shepp_logan_128;
      else if (ph_kind == "dynamic_256") spec.kind = PhantomKind::dynamic_256;
      else throw config_error("unknown phantom kind '" + ph_kind + "'");
      if (ph_state == "static") spec.state = MotionState::statik;
      else if (ph_state == "expiratory") spec.state = MotionState::expiratory;
      else if (ph_state == "inspiratory") spec.state = MotionState::inspiratory;
      else throw config_error("unknown state '" + ph_state + "'");
      if (spec.kind == PhantomKind::dynamic_256 && ph_state == "static")
        spec.state = MotionState::expiratory;
      spec.diaphragm_shift_px = ph_shift;
      save_grid(ph_out, make_phantom(spec));
      maybe_meta(json_meta, ph_out,
                 {{"subcommand", "phantom"}, {"kind", ph_kind}, {"state", ph_state},
                  {"shift", ph_shift}});
      return 0;
    }

    if (cmd_mask->parsed()) {
      SamplingMask m = make_gro_mask(mk_ny, mk_nt, mk_r, mk_seed);
      save_mask(mk_out, m);
      maybe_meta(json_meta, mk_out,
                 {{"subcommand", "mask"}, {"ny", mk_ny}, {"nt", mk_nt}, {"accel", mk_r},
                  {"seed", mk_seed}, {"achieved", m.r_achieved()}});
      return 0;
    }

    if (cmd_sim->parsed()) {
      StudyConfig cfg = default_study_config(study_from_name(sim_study));
      if (sim_sigma > 0.0) cfg.sigma = sim_sigma;
      DrawSpec d;
      d.seed = sim_seed;
      d.with_outliers = !sim_clean;
      d.sigma = cfg.sigma;
      if (cfg.study == StudyId::I && d.with_outliers) {
        CounterRng sev(d.seed, 7);
        d.fraction = sev.uniform(0.01, 0.20);
        d.var_mult = sev.uniform(1.0, 10.0);
        if (sim_fraction >= 0.0) d.fraction = sim_fraction;
        if (sim_var >= 0.0) d.var_mult = sim_var;
      } else if (cfg.study == StudyId::II) {
        d.fraction = d.with_outliers ? cfg.study2.replaced_fraction : 0.0;
      }
      Realization r = make_realization(cfg, d);
      save_kspace(sim_prefix + ".y.coreks", r.y, r.mask.ny, r.mask.nt);
      save_mask(sim_prefix + ".mask.coreks", r.mask);
      save_grid(sim_prefix + ".truth.coreks", r.truth);
      json meta = meta_for_draw(d, r);
      meta["subcommand"] = "simulate";
      meta["study"] = sim_study;
      write_json(sim_prefix + ".meta.json", meta);
      return 0;
    }

    if (cmd_rec->parsed()) return do_recon(ra, json_meta);

    if (cmd_met->parsed()) {
      ComplexGrid xr = load_grid(met_recon);
      ComplexGrid xt = load_grid(met_truth);
      const double nm = nmse_db(xr, xt);
      const double ss = ssim(xr, xt);
      std::printf("nmse_db=%.6f ssim=%.6f\n", nm, ss);
      if (!met_csv.empty()) {
        const bool fresh = !std::filesystem::exists(met_csv);
        std::ofstream out(met_csv, std::ios::app);
        if (!out) throw io_error("cannot write '" + met_csv + "'");
        if (fresh) out << "seed,method,nmse_db,ssim\n";
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%llu,%s,%.17g,%.17g\n",
                      static_cast<unsigned long long>(met_seed), met_method.c_str(), nm, ss);
        out << buf;
      }
      return 0;
    }

    if (cmd_cal->parsed()) {
      StudyConfig cfg = cal_config.empty() ? default_study_config(study_from_name(cal_study))
                                           : load_study_config(cal_config);
      if (threads > 0) cfg.threads = threads;
      CalibrationResult cal = calibrate(cfg);
      json j;
      j["seed_with_outliers"] = cal.seed_with_outliers;
      j["seed_clean"] = cal.seed_clean;
      for (const auto& [m, sc] : cal.tuned) {
        j["solvers"][method_name(m)]["lambda1"] = sc.lambda1;
        if (!std::isinf(sc.lambda2)) j["solvers"][method_name(m)]["lambda2"] = sc.lambda2;
        json prof = json::array();
        for (const CalibrationPoint& p : cal.profile.at(m))
          prof.push_back({{"lambda1", p.lambda1}, {"lambda2", p.lambda2},
                          {"summed_nmse_db", p.summed_nmse_db}});
        j["profiles"][method_name(m)] = prof;
      }
      write_json(cal_out, j);
      std::fprintf(stderr, "calibration written to %s\n", cal_out.c_str());
      return 0;
    }

    if (cmd_study->parsed()) {
      StudyConfig cfg = st_config.empty() ? default_study_config(study_from_name(st_study))
                                          : load_study_config(st_config);
      if (!st_out.empty()) cfg.output_dir = st_out;
      if (threads > 0) cfg.threads = threads;
      std::map<Method, SolverConfig> tuned;
      if (st_no_cal) {
        tuned = cfg.solvers;
      } else {
        std::fprintf(stderr, "calibrating...\n");
        tuned = calibrate(cfg).tuned;
      }
      std::fprintf(stderr, "running %d realizations...\n", cfg.total_draws());
      StudySummary summary = run_study(cfg, tuned);
      emit_report(summary, cfg, tuned);
      std::fprintf(stderr, "report written to %s\n", cfg.output_dir.c_str());
      for (const auto& [m, v] : summary.mean_nmse_db)
        std::printf("%s: mean nmse_db=%.3f mean ssim=%.4f\n", method_name(m).c_str(), v,
                    summary.mean_ssim.at(m));
      return 0;
    }
  } catch (const config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}

}  // namespace coreks
