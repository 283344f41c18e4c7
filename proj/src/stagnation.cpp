#include "swarmlab/stagnation.hpp"

#include <algorithm>
#include <cmath>

#include "swarmlab/errors.hpp"

namespace swarmlab {

void StagnationConfig::validate(int D) const {
  if (delta_t < 1) throw Error(ErrorKind::ConfigError, "stagnation.delta_t must be >= 1");
  if (n0 < 1) throw Error(ErrorKind::ConfigError, "stagnation.n0 must be >= 1");
  if (D > 0 && n0 >= D) throw Error(ErrorKind::ConfigError, "stagnation.n0 must be < D");
  if (!(c0 <= cs && cs < 0.0)) throw Error(ErrorKind::ConfigError, "need c0 <= cs < 0");
}

StoppingTimeDetector::StoppingTimeDetector(const StagnationConfig& cfg) : cfg_(cfg) {}

void StoppingTimeDetector::push(long sample_index, std::span<const double> psi_row) {
  const long t = sample_index * cfg_.delta_t;
  if (in_phase_) {
    int still = 0;
    for (std::size_t k = 0; k < frozen_.size(); ++k) {
      running_max_[k] = std::max(running_max_[k], psi_row[static_cast<std::size_t>(frozen_[k])]);
      if (running_max_[k] <= cfg_.cs) ++still;
    }
    if (still >= cfg_.n0) return;
    times_.beta.back() = t;
    in_phase_ = false;
    // a new phase may start at the very sample that ended the previous one
  }
  std::vector<int> low;
  for (std::size_t d = 0; d < psi_row.size(); ++d) {
    if (psi_row[d] <= cfg_.c0) low.push_back(static_cast<int>(d));
  }
  if (static_cast<int>(low.size()) < cfg_.n0) return;
  in_phase_ = true;
  frozen_ = low;
  running_max_.assign(low.size(), 0.0);
  for (std::size_t k = 0; k < low.size(); ++k) running_max_[k] = psi_row[static_cast<std::size_t>(low[k])];
  times_.alpha.push_back(t);
  times_.beta.push_back(kOpen);
  std::vector<int> set;
  for (int d : low) set.push_back(d + 1);
  times_.sets.push_back(std::move(set));
}

StoppingTimes detect_stopping_times(const PotentialTrace& trace, const StagnationConfig& cfg) {
  cfg.validate();
  StoppingTimeDetector det(cfg);
  for (std::size_t row = 0; row < trace.samples(); ++row) {
    std::span<const double> psi_row(trace.psi.data() + row * static_cast<std::size_t>(trace.dims),
                                    static_cast<std::size_t>(trace.dims));
    det.push(trace.sample_index(row), psi_row);
  }
  return det.times();
}

std::string_view phase_kind_name(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::X: return "PH_X";
    case PhaseKind::Y: return "PH_Y";
    case PhaseKind::F: return "PH_F";
  }
  return "?";
}

PhasePartition partition_phases(const StoppingTimes& times, long trace_end) {
  PhasePartition out;
  out.trace_end = trace_end;
  out.alpha = times.alpha;
  out.beta = times.beta;
  long prev_beta = 0;
  const std::size_t n = times.alpha.size();
  for (std::size_t i = 0; i < n; ++i) {
    const long a = times.alpha[i];
    const long b = times.beta[i];
    out.phases.push_back({PhaseKind::X, static_cast<int>(i), prev_beta, a, {}});
    out.x_durations.push_back(a - prev_beta);
    PhaseRecord stag{b == kOpen ? PhaseKind::F : PhaseKind::Y, static_cast<int>(i), a, b,
                     i < times.sets.size() ? times.sets[i] : std::vector<int>{}};
    out.phases.push_back(std::move(stag));
    if (b == kOpen) {
      out.t_f = a;
      return out;
    }
    out.y_durations.push_back(b - a);
    prev_beta = b;
  }
  out.phases.push_back({PhaseKind::X, static_cast<int>(n), prev_beta, kOpen, {}});
  return out;
}

PhaseClassification classify_phase(const PotentialTrace& trace, const PhaseRecord& phase,
                                   double mu_threshold, double m_threshold, double p0_threshold) {
  if (phase.stagnating_set.empty()) {
    throw Error(ErrorKind::EmptyStagnatingSet, "phase has no stagnating dimensions");
  }
  const long dt = trace.delta_t;
  const long first = trace.row_of_index(phase.start / dt);
  long last = phase.end == kOpen ? static_cast<long>(trace.samples()) - 1 : trace.row_of_index(phase.end / dt);
  if (first < 0 || last < 0) throw Error(ErrorKind::IndexOutOfRange, "phase lies outside the trace");
  const long steps = last - first;
  if (steps < kMinClassificationSamples) {
    throw Error(ErrorKind::InsufficientData,
                "phase has " + std::to_string(std::max(steps, 0L)) + " increments, need 30");
  }
  std::vector<int> dims;
  for (int d : phase.stagnating_set) {
    if (d < 1 || d > trace.dims) throw Error(ErrorKind::IndexOutOfRange, "stagnating dimension");
    dims.push_back(d - 1);
  }
  const double k = static_cast<double>(dims.size());

  std::vector<double> base(static_cast<std::size_t>(steps));
  for (long s = 0; s < steps; ++s) {
    double sum = 0.0;
    for (int d : dims) sum += trace.increment(static_cast<std::size_t>(first + s), d);
    base[static_cast<std::size_t>(s)] = sum / k;
  }
  double mu = 0.0;
  for (double b : base) mu += b;
  mu /= static_cast<double>(steps);

  double m6 = 0.0;
  long below_base = 0;
  long below_residual = 0;
  for (long s = 0; s < steps; ++s) {
    const double b = base[static_cast<std::size_t>(s)];
    if (b <= mu_threshold / 2.0) ++below_base;
    for (int d : dims) {
      const double inc = trace.increment(static_cast<std::size_t>(first + s), d);
      m6 += std::pow(inc - mu, 6);
      if (inc - b <= -mu_threshold / 2.0) ++below_residual;
    }
  }
  const double cells = static_cast<double>(steps) * k;
  PhaseClassification out;
  out.samples = steps;
  out.mu_hat = mu;
  out.m6_hat = m6 / cells;
  out.p_base = static_cast<double>(below_base) / static_cast<double>(steps);
  out.p_residual = static_cast<double>(below_residual) / cells;
  out.p0_hat = std::min(out.p_base, out.p_residual);
  const bool good = mu_threshold < 0.0 && out.mu_hat <= mu_threshold && out.m6_hat <= m_threshold &&
                    out.p0_hat >= p0_threshold;
  out.verdict = good ? PhaseVerdict::Good : PhaseVerdict::NotGood;
  return out;
}

}  // namespace swarmlab
