#include "swarmlab/potential.hpp"

#include <algorithm>
#include <cmath>

#include "swarmlab/errors.hpp"

namespace swarmlab {

bool try_phi(const SwarmState& state, const Objective& f, const PrecisionPolicy& policy,
             std::vector<BigReal>& out, std::vector<int>& zero_dims) {
  const int D = f.dimension();
  if (state.dims() != D) throw Error(ErrorKind::DimensionMismatch, "state and objective dimensions differ");
  out.assign(static_cast<std::size_t>(D), BigReal());
  zero_dims.clear();
  std::vector<BigReal> grad;
  BigReal delta, term;
  // f(x + v e_d) - f(x) = v * (2 (A x)_d + A_dd v) for the quadratic objectives.
  for (int n = 0; n < state.particles(); ++n) {
    f.half_gradient(state.X[n], grad, policy);
    for (int d = 0; d < D; ++d) {
      const BigReal& v = state.V[n][d];
      if (v.is_zero()) continue;
      mul_into(term, f.diagonal(d), v);
      mpfr_mul_2ui(grad[d].get(), grad[d].get(), 1, MPFR_RNDN);
      add_into(delta, grad[d], term, policy);
      mul_into(delta, delta, v);
      mpfr_abs(delta.get(), delta.get(), MPFR_RNDN);
      if (delta > out[d]) out[d] = delta;
    }
  }
  for (int d = 0; d < D; ++d) {
    if (out[d].is_zero()) zero_dims.push_back(d + 1);
  }
  return zero_dims.empty();
}

std::vector<BigReal> phi(const SwarmState& state, const Objective& f, const PrecisionPolicy& policy) {
  std::vector<BigReal> out;
  std::vector<int> zero;
  if (!try_phi(state, f, policy, out, zero)) throw ZeroPotentialError(zero);
  return out;
}

std::vector<BigReal> phi(const SwarmState& state, ObjectiveId f, const PrecisionPolicy& policy) {
  return phi(state, Objective(f, state.dims(), policy.initial_bits), policy);
}

std::vector<BigReal> phi_by_evaluation(const SwarmState& state, const Objective& f,
                                       const PrecisionPolicy& policy) {
  const int D = f.dimension();
  if (state.dims() != D) throw Error(ErrorKind::DimensionMismatch, "state and objective dimensions differ");
  // Widen every coordinate so that squares and sums below are exact; otherwise a step many binary
  // orders below the position would vanish from f(x + v e_d) - f(x).
  long hi = 0, lo = 0, prec = policy.initial_bits;
  bool any = false;
  auto note = [&](const BigReal& v) {
    prec = std::max(prec, v.precision());
    if (v.is_zero()) return;
    hi = any ? std::max(hi, v.exponent()) : v.exponent();
    lo = any ? std::min(lo, v.exponent()) : v.exponent();
    any = true;
  };
  for (int n = 0; n < state.particles(); ++n) {
    for (int d = 0; d < D; ++d) {
      note(state.X[n][d]);
      note(state.V[n][d]);
    }
  }
  const long span = (hi - lo) + prec + 2;
  const long wide = (2 * span + 1024 + 63) / 64 * 64;
  PrecisionPolicy exact = policy;
  exact.initial_bits = std::max(policy.initial_bits, wide);

  std::vector<BigReal> out(static_cast<std::size_t>(D));
  std::vector<int> zero;
  for (int n = 0; n < state.particles(); ++n) {
    std::vector<BigReal> x = state.X[n];
    for (auto& c : x) c.grow_precision(wide);
    const BigReal fx = f.evaluate(x, exact);
    for (int d = 0; d < D; ++d) {
      std::vector<BigReal> moved = x;
      BigReal v = state.V[n][d];
      v.grow_precision(wide);
      moved[d] = add(moved[d], v, exact);
      BigReal diff = abs(sub(f.evaluate(moved, exact), fx, exact));
      if (diff > out[d]) out[d] = diff;
    }
  }
  for (int d = 0; d < D; ++d) {
    if (out[d].is_zero()) zero.push_back(d + 1);
  }
  if (!zero.empty()) throw ZeroPotentialError(zero);
  return out;
}

std::vector<double> psi_from_log2(std::span<const double> log2_phi) {
  if (log2_phi.empty()) return {};
  const double top = *std::max_element(log2_phi.begin(), log2_phi.end());
  std::vector<double> out;
  out.reserve(log2_phi.size());
  for (double v : log2_phi) out.push_back(v - top);
  return out;
}

std::vector<double> psi(std::span<const BigReal> phi_vec) {
  std::vector<double> logs;
  logs.reserve(phi_vec.size());
  for (const auto& p : phi_vec) logs.push_back(log2_magnitude(p));
  return psi_from_log2(logs);
}

long PotentialTrace::row_of_index(long k) const {
  const long row = k - first_index;
  if (row < 0 || row >= static_cast<long>(samples())) return -1;
  return row;
}

void PotentialTrace::append(std::span<const double> log2_row) {
  if (dims == 0) dims = static_cast<int>(log2_row.size());
  if (static_cast<int>(log2_row.size()) != dims) throw Error(ErrorKind::DimensionMismatch, "trace row width");
  log2_phi.insert(log2_phi.end(), log2_row.begin(), log2_row.end());
  auto p = psi_from_log2(log2_row);
  psi.insert(psi.end(), p.begin(), p.end());
}

PotentialTrace build_trace(const std::vector<std::vector<BigReal>>& phi_samples, long delta_t, bool keep_phi) {
  if (delta_t < 1) throw Error(ErrorKind::ConfigError, "delta_t must be >= 1");
  PotentialTrace tr;
  tr.delta_t = delta_t;
  bool started = false;
  std::vector<double> row;
  for (std::size_t k = 0; k < phi_samples.size(); ++k) {
    const auto& sample = phi_samples[k];
    std::vector<int> zero;
    for (std::size_t d = 0; d < sample.size(); ++d) {
      if (sample[d].sign() <= 0) zero.push_back(static_cast<int>(d) + 1);
    }
    if (!zero.empty()) {
      if (!started) continue;
      throw ZeroPotentialError(zero);
    }
    if (!started) {
      started = true;
      tr.first_index = static_cast<long>(k);
    }
    row.clear();
    for (const auto& p : sample) row.push_back(log2_magnitude(p));
    tr.append(row);
    if (keep_phi) tr.phi.push_back(sample);
  }
  return tr;
}

TraceRecorder::TraceRecorder(const Objective& f, PrecisionPolicy policy, long delta_t, bool keep_phi,
                             long keep_phi_bits)
    : f_(&f), policy_(policy), keep_phi_(keep_phi), keep_bits_(keep_phi_bits) {
  if (delta_t < 1) throw Error(ErrorKind::ConfigError, "delta_t must be >= 1");
  trace_.delta_t = delta_t;
}

void TraceRecorder::operator()(const SwarmState& state) {
  if (stopped_) return;
  const bool positive = try_phi(state, *f_, policy_, phi_, zero_);
  if (!positive) {
    if (trace_.empty()) {
      ++diag_.skipped_leading;
    } else {
      ++diag_.zero_after_start;
      diag_.truncated_at = state.t;
      stopped_ = true;
    }
    return;
  }
  row_.clear();
  for (const auto& p : phi_) {
    diag_.max_phi_precision = std::max(diag_.max_phi_precision, p.precision());
    const double l = log2_magnitude(p);
    if (!std::isfinite(l)) ++diag_.nonfinite;
    row_.push_back(l);
  }
  if (trace_.empty()) trace_.first_index = state.t / trace_.delta_t;
  trace_.append(row_);
  if (keep_phi_) {
    if (keep_bits_ > 0) {
      for (auto& p : phi_) p.set_precision(keep_bits_);
    }
    trace_.phi.push_back(phi_);
  }
}

}  // namespace swarmlab
