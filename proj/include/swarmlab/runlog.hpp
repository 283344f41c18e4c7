#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmlab/big_real.hpp"
#include "swarmlab/estimators.hpp"
#include "swarmlab/potential.hpp"
#include "swarmlab/stagnation.hpp"

namespace swarmlab {

inline constexpr int kRunLogFormatVersion = 1;

struct PhaseEntry {
  PhaseRecord record;
  std::optional<PhaseClassification> classification;  // empty for PH_X or too few increments
};

struct FinalState {
  long iterations = 0;
  long trace_end = 0;  // iteration of the last sample
  std::uint64_t draws = 0;
  long max_precision = 0;
  std::vector<double> final_psi;  // last sampled row, empty when nothing was sampled
  std::vector<BigReal> G;
  BigReal fG;
  long fG_exponent = 0;  // binary exponent of f(G), 0 when f(G) == 0
};

/// Per-run data the ensemble estimators need, kept so `analyze` works without the trace.
struct RunReduction {
  bool covers_horizon = false;  // trace reaches T_e with rows at T_m and T_e
  EndpointSample endpoints;
  IncrementSums sums;
};

struct RunLog {
  int format_version = kRunLogFormatVersion;
  std::string fingerprint;
  nlohmann::json config;  // effective config
  long run_index = 0;
  std::uint64_t seed = 0;
  TraceDiagnostics diagnostics;
  StoppingTimes times;
  std::vector<PhaseEntry> phases;
  FinalState final_state;
  RunReduction reduction;
  std::string trace_file;  // relative name, empty when the trace was not stored
  std::string phi_file;

  // not part of runlog.json
  PotentialTrace trace;
  bool has_trace = false;
};

std::filesystem::path run_directory(const std::filesystem::path& output_dir, std::uint64_t seed);

/// Canonical runlog.json text.
std::string runlog_json_text(const RunLog& log);
RunLog parse_runlog_json(std::string_view text);

/// trace CSV: t,d,log2_phi,psi,increment (one row per sample and dimension, d 1-based).
std::string trace_csv_text(const PotentialTrace& trace);
PotentialTrace parse_trace_csv(std::string_view text, long delta_t);

/// Binary sidecar holding the full-precision Phi of every sample.
std::vector<std::uint8_t> phi_sidecar_bytes(const PotentialTrace& trace);
std::vector<std::vector<BigReal>> parse_phi_sidecar(std::span<const std::uint8_t> bytes);

/// Writes runlog.json (plus trace.csv / phi.bin when named in the log) into `dir`. Returns the json path.
std::filesystem::path persist_runlog(const RunLog& log, const std::filesystem::path& dir);
/// Accepts a run directory or a runlog.json path. Throws CorruptLog, VersionMismatch or IoError.
RunLog load_runlog(const std::filesystem::path& path, bool load_trace = true);

/// run directories under output_dir/runs, ordered by seed.
std::vector<std::filesystem::path> list_run_directories(const std::filesystem::path& output_dir);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view bytes);

}  // namespace swarmlab
