#include "swarmlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "swarmlab/errors.hpp"
#include "swarmlab/pso.hpp"

namespace swarmlab {

namespace fs = std::filesystem;

namespace {

bool wants_increments(const ExperimentConfig& cfg) {
  return (cfg.experiment == ExperimentKind::Exp1 || cfg.experiment == ExperimentKind::Exp2) &&
         !cfg.stagnating_set().empty();
}

RunReduction reduce_trace(const ExperimentConfig& cfg, const PotentialTrace& trace) {
  RunReduction r;
  const long tm = cfg.estimators.t_m;
  const long te = cfg.estimators.t_e;
  if (trace.empty() || trace.row_of_index(tm / cfg.delta_t) < 0 || trace.row_of_index(te / cfg.delta_t) < 0) {
    return r;  // a run that lost its trace early is left out of the drift estimators
  }
  r.covers_horizon = true;
  r.endpoints = endpoint_sample(trace, tm, te);
  if (wants_increments(cfg)) r.sums = increment_sums(trace, cfg.stagnating_set(), tm, te, tau_grid(cfg));
  return r;
}

}  // namespace

std::vector<long> tau_grid(const ExperimentConfig& cfg) {
  const long H = (cfg.estimators.t_e - cfg.estimators.t_m) / cfg.delta_t;
  return sigma_grid(cfg.estimators.coarse_step, cfg.estimators.early_cut, H, cfg.estimators.tau_grid);
}

SyntheticIncrementSpec lemma_spec(const LemmaConfig& c) {
  SyntheticIncrementSpec s;
  if (c.distribution == "gaussian") s = SyntheticIncrementSpec::gaussian(c.mu, c.variance);
  else if (c.distribution == "rademacher_shifted") s = SyntheticIncrementSpec::rademacher_shifted(c.mu);
  else if (c.distribution == "uniform_shifted") s = SyntheticIncrementSpec::uniform_shifted(c.mu, c.width);
  else throw Error(ErrorKind::ConfigError, "unknown lemma distribution '" + c.distribution + "'");
  s.samples = c.samples;
  s.seed = c.seed;
  return s;
}

RunLog simulate_run(const ExperimentConfig& cfg, long run_index) {
  const std::uint64_t seed = cfg.run_seed(run_index);
  Swarm swarm(SwarmParams::standard(cfg.N, cfg.D, cfg.precision.initial_bits), cfg.objective, cfg.precision);
  RngStream rng(seed);
  SwarmState state = cfg.init.kind == InitKind::Special
                         ? swarm.init_special(cfg.init.box_halfwidth, cfg.init.scale, cfg.init.stagnating,
                                              cfg.init.dstar, rng, cfg.init.velocity)
                         : swarm.init_usual(cfg.init.box_halfwidth, rng, cfg.init.velocity);

  TraceRecorder recorder(swarm.objective(), cfg.precision, cfg.delta_t, cfg.persist.phi_sidecar,
                         cfg.persist.phi_bits);
  StateObserver observer = [&recorder](const SwarmState& s) { recorder(s); };
  const RunSummary summary = swarm.run(state, rng, cfg.T, cfg.delta_t, observer);

  RunLog log;
  log.config = cfg.to_json();
  // where and how fast a run executes does not change its content
  log.config.erase("output_dir");
  log.config.erase("threads");
  log.fingerprint = fingerprint_of(log.config);
  log.run_index = run_index;
  log.seed = seed;
  log.diagnostics = recorder.diagnostics();
  log.trace = recorder.take();
  log.has_trace = true;

  log.times = detect_stopping_times(log.trace, cfg.stagnation_config());
  const long trace_end = log.trace.empty() ? 0 : log.trace.time_of(log.trace.samples() - 1);
  const PhasePartition part = partition_phases(log.times, trace_end);
  for (const auto& rec : part.phases) {
    PhaseEntry e;
    e.record = rec;
    if (rec.kind != PhaseKind::X) {
      try {
        e.classification = classify_phase(log.trace, rec, cfg.classify.mu, cfg.classify.m, cfg.classify.p0);
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::InsufficientData) throw;
      }
    }
    log.phases.push_back(std::move(e));
  }

  auto& f = log.final_state;
  f.iterations = summary.iterations;
  f.trace_end = trace_end;
  f.draws = summary.draws;
  f.max_precision = summary.max_precision;
  if (!log.trace.empty()) {
    const std::size_t last = log.trace.samples() - 1;
    for (int d = 0; d < log.trace.dims; ++d) f.final_psi.push_back(log.trace.psi_at(last, d));
  }
  f.G = state.G;
  f.fG = state.fG;
  f.fG_exponent = state.fG.is_zero() ? 0 : state.fG.exponent();

  log.reduction = reduce_trace(cfg, log.trace);
  if (cfg.persist.traces) log.trace_file = "trace.csv";
  if (cfg.persist.phi_sidecar) log.phi_file = "phi.bin";
  return log;
}

RunResult reduce_run(const ExperimentConfig& cfg, const RunLog& log) {
  RunResult r;
  r.run_index = log.run_index;
  r.seed = log.seed;
  const RunReduction red = log.has_trace ? reduce_trace(cfg, log.trace) : log.reduction;
  r.covers_horizon = red.covers_horizon;
  r.endpoints = red.endpoints;
  r.sums = red.sums;
  r.times = log.times;
  r.partition = partition_phases(log.times, log.final_state.trace_end);
  r.phases = log.phases;
  r.final_psi = log.final_state.final_psi;
  r.diagnostics = log.diagnostics;
  r.max_precision = log.final_state.max_precision;
  return r;
}

std::vector<RunResult> run_ensemble(const ExperimentConfig& cfg, int threads, bool persist,
                                    const ProgressFn& progress) {
  const long R = cfg.R;
  std::vector<RunResult> results(static_cast<std::size_t>(R));
  std::atomic<long> next{0};
  std::atomic<long> done{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= R) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      try {
        RunLog log = simulate_run(cfg, i);
        if (persist && cfg.persist.runlogs) persist_runlog(log, run_directory(cfg.output_dir, log.seed));
        results[static_cast<std::size_t>(i)] = reduce_run(cfg, log);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      const long d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(mu);
        progress(d, R);
      }
    }
  };

  const int n = static_cast<int>(std::min<long>(std::max(1, threads), R));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<RunResult> load_ensemble(const fs::path& dir, ExperimentConfig& cfg) {
  const auto dirs = list_run_directories(dir);
  if (dirs.empty()) throw Error(ErrorKind::IoError, "no stored runs under " + dir.string());
  std::vector<RunResult> out;
  std::string fingerprint;
  for (const auto& d : dirs) {
    RunLog log = load_runlog(d, true);
    if (fingerprint.empty()) {
      fingerprint = log.fingerprint;
      cfg = ExperimentConfig::from_json(log.config);
      cfg.resolve();
    } else if (log.fingerprint != fingerprint) {
      throw Error(ErrorKind::CorruptLog, "runs under " + dir.string() + " come from different configs");
    }
    out.push_back(reduce_run(cfg, log));
  }
  std::sort(out.begin(), out.end(), [](const RunResult& a, const RunResult& b) { return a.run_index < b.run_index; });
  return out;
}

}  // namespace swarmlab
