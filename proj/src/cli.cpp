#include "swarmlab/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "swarmlab/config.hpp"
#include "swarmlab/errors.hpp"
#include "swarmlab/experiments.hpp"
#include "swarmlab/reports.hpp"
#include "swarmlab/runlog.hpp"
#include "swarmlab/svg.hpp"

namespace swarmlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SimFlags {
  std::string config_file;
  std::optional<std::string> objective, init, velocity, out;
  std::optional<int> particles, dims, stagnating, dstar, n0, threads;
  std::optional<long> scale, iters, delta_t, runs, tm, te, coarse, cut, initial_bits, guard_bits, quantum, phi_bits;
  std::optional<std::uint64_t> seed;
  std::optional<double> c0, cs, box;
  std::vector<long> taus;
  bool desk = false, no_traces = false, phi_sidecar = false, quiet = false;
};

void add_sim_flags(CLI::App* app, SimFlags& f) {
  app->add_option("--config", f.config_file, "JSON config file");
  app->add_option("--objective", f.objective, "sphere | hce | schwefel | diagonal");
  app->add_option("--particles,-N", f.particles, "swarm size N");
  app->add_option("--dims,-D", f.dims, "dimension D");
  app->add_option("--init", f.init, "usual | special");
  app->add_option("--stagnating,-L", f.stagnating, "number of compressed dimensions (implies special init)");
  app->add_option("--dstar", f.dstar, "first compressed dimension (1-based)");
  app->add_option("--scale,-S", f.scale, "compression exponent S");
  app->add_option("--velocity", f.velocity, "zero | uniform");
  app->add_option("--box", f.box, "half width of the initialization box");
  app->add_option("--iters,-T", f.iters, "iterations");
  app->add_option("--delta-t", f.delta_t, "sampling step");
  app->add_option("--runs,-R", f.runs, "repetitions");
  app->add_option("--seed", f.seed, "base seed (run: the run seed)");
  app->add_option("--tm", f.tm, "T_m");
  app->add_option("--te", f.te, "T_e");
  app->add_option("--tau", f.taus, "extra tau values")->delimiter(',');
  app->add_option("--coarse-step", f.coarse, "coarse tau step for sigma2_max");
  app->add_option("--early-cut", f.cut, "early cut for sigma2_min");
  app->add_option("--n0", f.n0, "stagnation N0");
  app->add_option("--c0", f.c0, "stagnation start threshold");
  app->add_option("--cs", f.cs, "stagnation stay threshold");
  app->add_option("--initial-bits", f.initial_bits, "initial mantissa bits");
  app->add_option("--guard-bits", f.guard_bits, "guard bits");
  app->add_option("--quantum", f.quantum, "precision growth quantum");
  app->add_option("--phi-bits", f.phi_bits, "round stored Phi to this width");
  app->add_option("--out,-o", f.out, "output directory");
  app->add_option("--threads,-j", f.threads, "worker threads (default: SWARMLAB_THREADS or all cores)");
  app->add_flag("--desk", f.desk, "desk scale: R <= 50, T / 5");
  app->add_flag("--no-traces", f.no_traces, "do not store trace.csv");
  app->add_flag("--phi-sidecar", f.phi_sidecar, "store full-precision Phi in phi.bin");
  app->add_flag("--quiet,-q", f.quiet, "no progress output");
}

ExperimentConfig build_config(ExperimentKind kind, const SimFlags& f) {
  ExperimentConfig cfg = preset(kind);
  if (!f.config_file.empty()) {
    json j;
    try {
      j = json::parse(read_file(f.config_file));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ConfigError, "config file: " + std::string(e.what()));
    }
    if (j.contains("experiment") && j.at("experiment").is_string() &&
        parse_experiment(j.at("experiment").get<std::string>()) != kind) {
      throw Error(ErrorKind::ConfigError, "config file is for experiment '" +
                                              j.at("experiment").get<std::string>() + "'");
    }
    cfg.merge_json(j);
  }
  if (f.objective) {
    try {
      cfg.objective = parse_objective(*f.objective);
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, e.what());
    }
  }
  if (f.particles) cfg.N = *f.particles;
  if (f.dims) cfg.D = *f.dims;
  if (f.init) {
    if (*f.init == "usual") cfg.init.kind = InitKind::Usual;
    else if (*f.init == "special") cfg.init.kind = InitKind::Special;
    else throw Error(ErrorKind::ConfigError, "--init must be usual or special");
  }
  if (f.stagnating) {
    cfg.init.stagnating = *f.stagnating;
    if (!f.init) cfg.init.kind = InitKind::Special;
  }
  if (f.dstar) cfg.init.dstar = *f.dstar;
  if (f.scale) cfg.init.scale = *f.scale;
  if (f.velocity) {
    if (*f.velocity == "zero") cfg.init.velocity = VelocityInit::Zero;
    else if (*f.velocity == "uniform") cfg.init.velocity = VelocityInit::Uniform;
    else throw Error(ErrorKind::ConfigError, "--velocity must be zero or uniform");
  }
  if (f.box) cfg.init.box_halfwidth = *f.box;
  if (f.iters) {
    cfg.T = *f.iters;
    // horizons follow T unless given explicitly
    if (!f.tm) cfg.estimators.t_m = kAuto;
    if (!f.te) cfg.estimators.t_e = kAuto;
  }
  if (f.delta_t) cfg.delta_t = *f.delta_t;
  if (f.runs) cfg.R = *f.runs;
  if (f.seed) cfg.base_seed = *f.seed;
  if (f.tm) cfg.estimators.t_m = *f.tm;
  if (f.te) cfg.estimators.t_e = *f.te;
  if (!f.taus.empty()) cfg.estimators.tau_grid = f.taus;
  if (f.coarse) cfg.estimators.coarse_step = *f.coarse;
  if (f.cut) cfg.estimators.early_cut = *f.cut;
  if (f.n0) cfg.stagnation.n0 = *f.n0;
  if (f.c0) cfg.stagnation.c0 = *f.c0;
  if (f.cs) cfg.stagnation.cs = *f.cs;
  if (f.initial_bits) cfg.precision.initial_bits = *f.initial_bits;
  if (f.guard_bits) cfg.precision.guard_bits = *f.guard_bits;
  if (f.quantum) cfg.precision.growth_quantum = *f.quantum;
  if (f.phi_bits) cfg.persist.phi_bits = *f.phi_bits;
  if (f.no_traces) cfg.persist.traces = false;
  if (f.phi_sidecar) cfg.persist.phi_sidecar = true;
  if (f.out) cfg.output_dir = *f.out;
  if (f.threads) cfg.threads = *f.threads;
  if (f.desk) apply_desk(cfg);
  cfg.resolve();
  cfg.validate();
  return cfg;
}

void echo_config(const ExperimentConfig& cfg) {
  json j = cfg.to_json();
  j["fingerprint"] = cfg.fingerprint();
  write_file(fs::path(cfg.output_dir) / "config.json", j.dump(1) + "\n");
}

ProgressFn progress_to(std::ostream& err, bool quiet) {
  if (quiet) return {};
  return [&err](long done, long total) { err << "run " << done << "/" << total << "\n" << std::flush; };
}

int do_run(const SimFlags& f, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = build_config(ExperimentKind::SingleRun, f);
  cfg.R = 1;
  echo_config(cfg);
  const RunLog log = simulate_run(cfg, 0);
  const fs::path dir = run_directory(cfg.output_dir, log.seed);
  persist_runlog(log, dir);
  (void)err;
  out << "seed=" << log.seed << " iterations=" << log.final_state.iterations
      << " samples=" << log.trace.samples() << " max_precision=" << log.final_state.max_precision
      << " fG_exponent=" << log.final_state.fG_exponent << " phases=" << log.phases.size()
      << " runlog=" << (dir / "runlog.json").string() << "\n";
  return kExitOk;
}

int do_experiment(ExperimentKind kind, const SimFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = build_config(kind, f);
  fs::create_directories(cfg.output_dir);
  echo_config(cfg);
  const auto runs = run_ensemble(cfg, cfg.effective_threads(), true, progress_to(err, f.quiet));
  const EnsembleReport rep = build_report(cfg, runs);
  write_report(rep, runs, cfg.output_dir);
  if (rep.drift) out << report_csv(rep);
  if (kind == ExperimentKind::Exp3) out << appendix_b_header() << "\n" << appendix_b_row(rep) << "\n";
  return kExitOk;
}

int do_analyze(const std::string& dir, const std::optional<std::string>& out_dir, std::ostream& out) {
  ExperimentConfig cfg;
  const auto runs = load_ensemble(dir, cfg);
  const fs::path target = out_dir ? fs::path(*out_dir) : fs::path(dir) / "analysis";
  fs::create_directories(target);
  const EnsembleReport rep = build_report(cfg, runs);
  const auto names = write_report(rep, runs, target);
  for (const auto& n : names) out << (target / n).string() << "\n";
  return kExitOk;
}

struct LemmaFlags {
  std::string distribution = "gaussian";
  double mu = -0.5, variance = 1.0, width = 1.0;
  long samples = 1000000;
  std::uint64_t seed = 1;
  std::vector<long> checkpoints = kTailCheckpoints;
  std::vector<long> horizons = {100, 500, 1000};
  std::string out = "lemmas";
  std::optional<int> threads;
};

int do_lemmas(const LemmaFlags& f, std::ostream& out) {
  LemmaConfig lc;
  lc.distribution = f.distribution;
  lc.mu = f.mu;
  lc.variance = f.variance;
  lc.width = f.width;
  lc.samples = f.samples;
  lc.seed = f.seed;
  lc.checkpoints = f.checkpoints;
  lc.horizons = f.horizons;
  ExperimentConfig cfg = preset(ExperimentKind::LemmaCheck);
  cfg.lemma = lc;
  cfg.output_dir = f.out;
  if (f.threads) cfg.threads = *f.threads;
  cfg.validate();
  const SyntheticIncrementSpec spec = lemma_spec(lc);
  const int threads = cfg.effective_threads();
  const auto rows = tail_bound_check(spec, lc.checkpoints, threads);
  const auto stay = stay_negative_probability(spec, lc.horizons, threads);
  fs::create_directories(f.out);
  echo_config(cfg);
  const std::string tail = lemma_csv(spec.name(), rows);
  write_file(fs::path(f.out) / "lemma.csv", tail);
  write_file(fs::path(f.out) / "stay_negative.csv", stay_negative_csv(spec.name(), stay));
  out << tail;
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.ok;
  return ok ? kExitOk : kExitRuntime;
}

int do_tables(const std::string& experiment, const std::vector<std::string>& dirs,
              const std::optional<std::string>& out_file, std::ostream& out) {
  const ExperimentKind kind = parse_experiment(experiment);
  if (kind != ExperimentKind::Exp1 && kind != ExperimentKind::Exp2 && kind != ExperimentKind::Exp3) {
    throw Error(ErrorKind::ConfigError, "tables supports exp1, exp2 and exp3");
  }
  std::string text = kind == ExperimentKind::Exp3 ? appendix_b_header() + "\n" : std::string(kReportHeader) + "\n";
  for (const auto& d : dirs) {
    ExperimentConfig cfg;
    const auto runs = load_ensemble(d, cfg);
    if (cfg.experiment != kind) {
      throw Error(ErrorKind::ConfigError, d + " holds " + std::string(experiment_name(cfg.experiment)) + " runs");
    }
    const EnsembleReport rep = build_report(cfg, runs);
    text += kind == ExperimentKind::Exp3 ? appendix_b_row(rep) + "\n" : report_csv_row(cfg, *rep.drift) + "\n";
  }
  if (out_file) write_file(*out_file, text);
  else out << text;
  return kExitOk;
}

int do_plotdata(const std::string& dir, const std::optional<std::uint64_t>& seed,
                const std::optional<std::string>& out_dir, std::ostream& out) {
  const fs::path target = out_dir ? fs::path(*out_dir) : fs::path(dir) / "plots";
  fs::create_directories(target);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    write_file(target / name, body);
    written.push_back((target / name).string());
  };
  if (seed) {
    const RunLog log = load_runlog(run_directory(dir, *seed), true);
    if (!log.has_trace) throw Error(ErrorKind::IoError, "run " + std::to_string(*seed) + " has no stored trace");
    const std::string stem = "psi_run_" + std::to_string(*seed);
    emit(stem + ".csv", psi_series_csv(log.trace));
    SvgOptions opt;
    opt.title = "Psi(t, d), seed " + std::to_string(*seed);
    emit(stem + ".svg", psi_chart_svg(log.trace, opt));
  } else {
    ExperimentConfig cfg;
    const auto runs = load_ensemble(dir, cfg);
    const EnsembleReport rep = build_report(cfg, runs);
    if (rep.drift) {
      const auto& s = *rep.drift;
      std::string bars = "quantity,mu,sigma\n";
      bars += "U," + fmt(s.mu_U) + "," + fmt(s.sigma_U) + "\n";
      bars += "M," + fmt(s.mu_M) + "," + fmt(s.sigma_M) + "\n";
      bars += "D," + fmt(s.mu_D) + "," + fmt(s.sigma_D) + "\n";
      bars += "L," + fmt(s.mu_L) + "," + fmt(s.sigma_L) + "\n";
      emit("estimator_bars.csv", bars);
    }
    if (rep.bounds) {
      emit("cdf_emp.csv", step_csv(rep.f_emp));
      emit("cdf_overlay.csv", cdf_overlay_csv(rep));
    }
    if (cfg.experiment == ExperimentKind::Exp3) {
      std::vector<StoppingTimes> times;
      std::vector<std::vector<double>> psi;
      for (const auto& r : runs) {
        times.push_back(r.times);
        if (!r.final_psi.empty()) psi.push_back(r.final_psi);
      }
      for (int i = 0; i < 4; ++i) {
        emit("cdf_alpha_" + std::to_string(i) + ".csv", step_csv(f_alpha(times, i)));
        emit("cdf_beta_" + std::to_string(i) + ".csv", step_csv(f_beta(times, i)));
      }
      for (int d = 1; d <= cfg.D && !psi.empty(); ++d) {
        emit("cdf_psi_" + std::to_string(d) + ".csv", step_csv(f_psi_curve(psi, d)));
      }
    }
  }
  for (const auto& w : written) out << w << "\n";
  return kExitOk;
}

int fail(std::ostream& err, std::string_view kind, const std::string& message, int code) {
  std::string flat = message;
  for (char& c : flat)
    if (c == '\n') c = ' ';
  err << "swarmlab: error kind=" << kind << " message=" << flat << "\n";
  return code;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"swarmlab: arbitrary-precision PSO stagnation experiments"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SimFlags run_f, e1, e2, e3;
  auto* run = app.add_subcommand("run", "simulate one seed and write its run log");
  add_sim_flags(run, run_f);
  auto* exp1 = app.add_subcommand("exp1", "drift estimators under special initialization");
  add_sim_flags(exp1, e1);
  auto* exp2 = app.add_subcommand("exp2", "increment statistics and Brownian bounds");
  add_sim_flags(exp2, e2);
  auto* exp3 = app.add_subcommand("exp3", "stagnation phases under usual initialization");
  add_sim_flags(exp3, e3);

  std::string an_dir;
  std::optional<std::string> an_out;
  auto* analyze = app.add_subcommand("analyze", "recompute reports from stored run logs");
  analyze->add_option("--dir", an_dir, "experiment output directory")->required();
  analyze->add_option("--out,-o", an_out, "report directory (default <dir>/analysis)");

  LemmaFlags lf;
  auto* lemmas = app.add_subcommand("lemmas", "Monte Carlo check of the increment tail bound");
  lemmas->add_option("--distribution", lf.distribution, "gaussian | rademacher_shifted | uniform_shifted");
  lemmas->add_option("--mu", lf.mu);
  lemmas->add_option("--variance", lf.variance);
  lemmas->add_option("--width", lf.width);
  lemmas->add_option("--samples", lf.samples);
  lemmas->add_option("--seed", lf.seed);
  lemmas->add_option("--checkpoints", lf.checkpoints)->delimiter(',');
  lemmas->add_option("--horizons", lf.horizons)->delimiter(',');
  lemmas->add_option("--out,-o", lf.out);
  lemmas->add_option("--threads,-j", lf.threads);

  std::string tb_exp;
  std::vector<std::string> tb_dirs;
  std::optional<std::string> tb_out;
  auto* tables = app.add_subcommand("tables", "appendix-shaped CSV from stored run logs");
  tables->add_option("--experiment", tb_exp, "exp1 | exp2 | exp3")->required();
  tables->add_option("--dir", tb_dirs, "experiment output directories (one row each)")->required();
  tables->add_option("--out,-o", tb_out, "CSV file (default stdout)");

  std::string pd_dir;
  std::optional<std::uint64_t> pd_seed;
  std::optional<std::string> pd_out;
  auto* plotdata = app.add_subcommand("plotdata", "CSV series and SVG for figures");
  plotdata->add_option("--dir", pd_dir, "experiment output directory")->required();
  plotdata->add_option("--seed", pd_seed, "Psi-vs-t series of this run");
  plotdata->add_option("--out,-o", pd_out, "target directory (default <dir>/plots)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, "ConfigError", e.what(), kExitConfig);
  }

  try {
    if (*run) return do_run(run_f, out, err);
    if (*exp1) return do_experiment(ExperimentKind::Exp1, e1, out, err);
    if (*exp2) return do_experiment(ExperimentKind::Exp2, e2, out, err);
    if (*exp3) return do_experiment(ExperimentKind::Exp3, e3, out, err);
    if (*analyze) return do_analyze(an_dir, an_out, out);
    if (*lemmas) return do_lemmas(lf, out);
    if (*tables) return do_tables(tb_exp, tb_dirs, tb_out, out);
    if (*plotdata) return do_plotdata(pd_dir, pd_seed, pd_out, out);
  } catch (const Error& e) {
    const int code = e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitRuntime;
    return fail(err, to_string(e.kind()), e.what(), code);
  } catch (const json::exception& e) {
    return fail(err, "ConfigError", e.what(), kExitConfig);
  } catch (const fs::filesystem_error& e) {
    return fail(err, "IoError", e.what(), kExitRuntime);
  } catch (const std::exception& e) {
    return fail(err, "Internal", e.what(), kExitRuntime);
  }
  return kExitOk;
}

}  // namespace swarmlab
