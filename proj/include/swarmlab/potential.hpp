#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swarmlab/big_real.hpp"
#include "swarmlab/objectives.hpp"
#include "swarmlab/pso.hpp"

namespace swarmlab {

/// Phi(t, d) = max_n |f(X^n) - f(X^n + V^n_d e_d)| for every d.
/// Throws ZeroPotentialError naming the (1-based) dimensions where the max is 0.
std::vector<BigReal> phi(const SwarmState& state, const Objective& f, const PrecisionPolicy& policy = {});
std::vector<BigReal> phi(const SwarmState& state, ObjectiveId f, const PrecisionPolicy& policy = {});

/// Non-throwing form. Returns false and lists zero dimensions (1-based) if any.
bool try_phi(const SwarmState& state, const Objective& f, const PrecisionPolicy& policy,
             std::vector<BigReal>& out, std::vector<int>& zero_dims);

/// Reference path that evaluates f at both positions and subtracts.
std::vector<BigReal> phi_by_evaluation(const SwarmState& state, const Objective& f,
                                       const PrecisionPolicy& policy = {});

/// log2 Phi(d) - max_d log2 Phi(d). Throws Error(NonPositiveLog) for any entry <= 0.
std::vector<double> psi(std::span<const BigReal> phi_vec);
std::vector<double> psi_from_log2(std::span<const double> log2_phi);

/// Samples taken every delta_t iterations. Row r holds sample index first_index + r,
/// i.e. iteration (first_index + r) * delta_t.
struct PotentialTrace {
  long delta_t = 1;
  long first_index = 0;
  int dims = 0;
  std::vector<double> log2_phi;  // row-major
  std::vector<double> psi;       // row-major
  std::vector<std::vector<BigReal>> phi;  // optional full-precision copy

  std::size_t samples() const { return dims == 0 ? 0 : psi.size() / static_cast<std::size_t>(dims); }
  std::size_t increments() const { return samples() == 0 ? 0 : samples() - 1; }
  bool empty() const { return samples() == 0; }

  double psi_at(std::size_t row, int d) const { return psi[row * static_cast<std::size_t>(dims) + d]; }
  double log2_phi_at(std::size_t row, int d) const {
    return log2_phi[row * static_cast<std::size_t>(dims) + d];
  }
  /// I = Psi(row + 1, d) - Psi(row, d).
  double increment(std::size_t row, int d) const { return psi_at(row + 1, d) - psi_at(row, d); }
  long sample_index(std::size_t row) const { return first_index + static_cast<long>(row); }
  long time_of(std::size_t row) const { return sample_index(row) * delta_t; }
  /// Row holding sample index k, or -1 when outside the trace.
  long row_of_index(long k) const;

  void append(std::span<const double> log2_row);
};

/// Assembles a trace from per-sample Phi vectors (sample k at iteration k * delta_t).
/// Leading samples with a zero entry are skipped; a zero afterwards throws ZeroPotentialError.
PotentialTrace build_trace(const std::vector<std::vector<BigReal>>& phi_samples, long delta_t,
                           bool keep_phi = false);

struct TraceDiagnostics {
  long skipped_leading = 0;     // samples before the first all-positive one
  long zero_after_start = 0;    // zero Phi seen once the trace had started
  long nonfinite = 0;
  long truncated_at = -1;       // iteration where recording stopped, -1 if never
  long max_phi_precision = 0;
};

/// Observer that turns sampled states into a PotentialTrace while the run progresses.
class TraceRecorder {
 public:
  TraceRecorder(const Objective& f, PrecisionPolicy policy, long delta_t, bool keep_phi = false,
                long keep_phi_bits = 0);

  void operator()(const SwarmState& state);

  const PotentialTrace& trace() const { return trace_; }
  PotentialTrace take() { return std::move(trace_); }
  const TraceDiagnostics& diagnostics() const { return diag_; }

 private:
  const Objective* f_;
  PrecisionPolicy policy_;
  bool keep_phi_;
  long keep_bits_;
  PotentialTrace trace_;
  TraceDiagnostics diag_;
  std::vector<BigReal> phi_;
  std::vector<int> zero_;
  std::vector<double> row_;
  bool stopped_ = false;
};

}  // namespace swarmlab
