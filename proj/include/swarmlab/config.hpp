#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmlab/big_real.hpp"
#include "swarmlab/objectives.hpp"
#include "swarmlab/pso.hpp"
#include "swarmlab/stagnation.hpp"

namespace swarmlab {

enum class ExperimentKind { Exp1, Exp2, Exp3, SingleRun, LemmaCheck };
ExperimentKind parse_experiment(std::string_view name);
std::string_view experiment_name(ExperimentKind kind);

enum class InitKind { Usual, Special };

inline constexpr long kAuto = -1;

struct InitConfig {
  InitKind kind = InitKind::Usual;
  long scale = kAuto;  // S; auto: ceil(T/4) + 128 for exp1, 500 otherwise
  int stagnating = 0;  // L
  int dstar = 1;
  VelocityInit velocity = VelocityInit::Zero;
  double box_halfwidth = 100.0;
};

/// Horizons in iterations; tau values count increments. kAuto fields are filled by resolve().
struct EstimatorConfig {
  long t_m = kAuto;          // T_e / 2
  long t_e = kAuto;          // T
  std::vector<long> tau_grid;
  long coarse_step = kAuto;  // (T_e - T_m) / 1000 samples, at least 1
  long early_cut = kAuto;    // (T_e - T_m) / 10 samples
};

struct ClassifyConfig {
  double mu = -0.01;
  double m = 1e5;
  double p0 = 0.1;
};

struct LemmaConfig {
  std::string distribution = "gaussian";  // gaussian | rademacher_shifted | uniform_shifted
  double mu = -0.5;
  double variance = 1.0;
  double width = 1.0;
  long samples = 1000000;
  std::vector<long> checkpoints = {1, 2, 5, 10, 20, 50, 100};
  std::vector<long> horizons = {100, 500, 1000};
  std::uint64_t seed = 1;
};

struct PersistConfig {
  bool runlogs = true;
  bool traces = true;        // trace.csv next to each runlog
  bool phi_sidecar = false;  // phi.bin with full-precision Phi
  long phi_bits = 0;         // round stored Phi to this width (0 keeps full width)
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::SingleRun;
  ObjectiveId objective = ObjectiveId::Sphere;
  int N = 3;
  int D = 10;
  InitConfig init;
  long T = 1000;
  long delta_t = 1;
  long R = 1;
  std::uint64_t base_seed = 1;
  StagnationConfig stagnation;
  PrecisionPolicy precision;
  EstimatorConfig estimators;
  ClassifyConfig classify;
  LemmaConfig lemma;
  PersistConfig persist;
  std::string output_dir = "out";
  int threads = 0;  // 0: SWARMLAB_THREADS or hardware concurrency

  std::uint64_t run_seed(long index) const { return base_seed + static_cast<std::uint64_t>(index); }
  /// Stagnating set D_S = {dstar, .., dstar + L - 1} for special initialization, else empty.
  std::vector<int> stagnating_set() const;
  StagnationConfig stagnation_config() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Overlays the fields present in `j` onto this config.
  void merge_json(const nlohmann::json& j);

  /// Fills every kAuto field. Idempotent.
  void resolve();
  /// Throws Error(ConfigError) on any violated invariant. Call after resolve().
  void validate() const;
  /// FNV-1a 64 of the canonical JSON without output_dir and threads, as 16 hex digits.
  std::string fingerprint() const;
  int effective_threads() const;
};

ExperimentConfig preset(ExperimentKind kind);

/// R = 50, T / 5 and explicit horizons / 5.
void apply_desk(ExperimentConfig& cfg);

std::string fingerprint_of(const nlohmann::json& config_json);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace swarmlab
