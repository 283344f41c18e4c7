#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "swarmlab/config.hpp"
#include "swarmlab/estimators.hpp"
#include "swarmlab/lemma_checks.hpp"
#include "swarmlab/runlog.hpp"

namespace swarmlab {

/// What the ensemble estimators keep from one run once its trace is gone.
struct RunResult {
  long run_index = 0;
  std::uint64_t seed = 0;
  bool covers_horizon = false;
  EndpointSample endpoints;
  IncrementSums sums;
  StoppingTimes times;
  PhasePartition partition;
  std::vector<PhaseEntry> phases;
  std::vector<double> final_psi;
  TraceDiagnostics diagnostics;
  long max_precision = 0;
};

/// Taus evaluated for the increment statistics: the sigma-bound grid plus estimators.tau_grid.
std::vector<long> tau_grid(const ExperimentConfig& cfg);

/// One seeded run. The returned log holds the in-memory trace and its reduction; nothing is written.
RunLog simulate_run(const ExperimentConfig& cfg, long run_index);

/// Reduces a log to a RunResult, from its trace when loaded, else from the stored reduction.
RunResult reduce_run(const ExperimentConfig& cfg, const RunLog& log);

using ProgressFn = std::function<void(long done, long total)>;

/// Runs seeds base_seed .. base_seed + R - 1 on `threads` workers. Results come back in seed order.
/// When `persist` is set each worker writes its run directory under cfg.output_dir.
std::vector<RunResult> run_ensemble(const ExperimentConfig& cfg, int threads, bool persist,
                                    const ProgressFn& progress = {});

/// Loads every stored run under `dir` and reduces it. `cfg` receives the effective config of the logs,
/// which must all share one fingerprint.
std::vector<RunResult> load_ensemble(const std::filesystem::path& dir, ExperimentConfig& cfg);

/// Lemma spec from the config block. Throws ConfigError on an unknown distribution.
SyntheticIncrementSpec lemma_spec(const LemmaConfig& cfg);

}  // namespace swarmlab
