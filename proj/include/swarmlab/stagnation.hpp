#pragma once

#include <string_view>
#include <vector>

#include "swarmlab/potential.hpp"

namespace swarmlab {

/// Marks a stopping time or phase end that lies beyond the observed trace.
inline constexpr long kOpen = -1;

struct StagnationConfig {
  long delta_t = 100;
  int n0 = 1;
  double c0 = -40.0;
  double cs = -20.0;

  /// Throws Error(ConfigError) unless c0 <= cs < 0, delta_t >= 1 and 1 <= n0 (< D when D > 0).
  void validate(int D = 0) const;
};

/// alpha[i] and beta[i] in iterations. beta[i] == kOpen for a phase still running at trace end.
/// sets[i] lists the (1-based) dimensions with Psi <= c0 at alpha[i].
struct StoppingTimes {
  std::vector<long> alpha;
  std::vector<long> beta;
  std::vector<std::vector<int>> sets;
};

StoppingTimes detect_stopping_times(const PotentialTrace& trace, const StagnationConfig& cfg);

/// Incremental form: feed Psi rows in sample order and read the stopping times found so far.
class StoppingTimeDetector {
 public:
  explicit StoppingTimeDetector(const StagnationConfig& cfg);

  /// `sample_index` counts delta_t blocks; rows must arrive with consecutive indices.
  void push(long sample_index, std::span<const double> psi_row);
  const StoppingTimes& times() const { return times_; }

 private:
  StagnationConfig cfg_;
  StoppingTimes times_;
  bool in_phase_ = false;
  std::vector<int> frozen_;        // 0-based dims of the running phase
  std::vector<double> running_max_;
};

enum class PhaseKind { X, Y, F };
std::string_view phase_kind_name(PhaseKind kind);  // "PH_X", "PH_Y", "PH_F"

struct PhaseRecord {
  PhaseKind kind = PhaseKind::X;
  int index = 0;        // i of PH_X_i / PH_Y_i
  long start = 0;
  long end = kOpen;
  std::vector<int> stagnating_set;  // empty for PH_X
};

struct PhasePartition {
  std::vector<PhaseRecord> phases;
  std::vector<long> x_durations;  // X_i for every phase PH_X_i that ended (alpha_i observed)
  std::vector<long> y_durations;  // Y_i for every finite stagnation phase
  long t_f = kOpen;               // start of the final (open) stagnation phase
  long trace_end = 0;
  std::vector<long> alpha;        // copies of the stopping times
  std::vector<long> beta;
};

/// PH_X and PH_Y alternate from time 0. A stagnation phase still open at trace end is
/// reported as PH_F (a candidate, since a finite trace cannot prove it never ends).
PhasePartition partition_phases(const StoppingTimes& times, long trace_end);

enum class PhaseVerdict { Good, NotGood };

struct PhaseClassification {
  PhaseVerdict verdict = PhaseVerdict::NotGood;
  double mu_hat = 0.0;
  double m6_hat = 0.0;
  double p0_hat = 0.0;
  double p_base = 0.0;      // frequency of B <= mu/2
  double p_residual = 0.0;  // frequency of J <= -mu/2
  long samples = 0;
};

inline constexpr long kMinClassificationSamples = 30;

/// Empirical check of a stagnation phase against (mu, M, p0) from its own increments.
/// Throws InsufficientData below 30 increments, EmptyStagnatingSet for phases without a set.
PhaseClassification classify_phase(const PotentialTrace& trace, const PhaseRecord& phase,
                                   double mu_threshold, double m_threshold, double p0_threshold);

}  // namespace swarmlab
