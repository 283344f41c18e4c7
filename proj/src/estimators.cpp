#include "swarmlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace {

long row_at(const PotentialTrace& trace, long iteration, const char* what) {
  if (iteration % trace.delta_t != 0) {
    throw Error(ErrorKind::HorizonTooShort, std::string(what) + " is not a multiple of delta_t");
  }
  const long row = trace.row_of_index(iteration / trace.delta_t);
  if (row < 0) {
    throw Error(ErrorKind::HorizonTooShort, std::string(what) + "=" + std::to_string(iteration) +
                                                " is not covered by the trace");
  }
  return row;
}

std::vector<int> zero_based(const std::vector<int>& dims, int D) {
  std::vector<int> out;
  out.reserve(dims.size());
  for (int d : dims) {
    if (d < 1 || d > D) throw Error(ErrorKind::IndexOutOfRange, "dimension " + std::to_string(d));
    out.push_back(d - 1);
  }
  return out;
}

double sq(double v) { return v * v; }

template <typename T>
T pow6(T v) {
  const T s = v * v * v;
  return s * s;
}

}  // namespace

std::vector<int> stagnating_range(int L, int d_star) {
  std::vector<int> out;
  for (int d = d_star; d < d_star + L; ++d) out.push_back(d);
  return out;
}

// ---------------------------------------------------------------- drift

EndpointSample endpoint_sample(const PotentialTrace& trace, long T_m, long T_e) {
  const long m = row_at(trace, T_m, "T_m");
  const long e = row_at(trace, T_e, "T_e");
  EndpointSample s;
  for (int d = 0; d < trace.dims; ++d) {
    s.log2_phi_m.push_back(trace.log2_phi_at(static_cast<std::size_t>(m), d));
    s.log2_phi_e.push_back(trace.log2_phi_at(static_cast<std::size_t>(e), d));
  }
  return s;
}

DriftStats exp1_drift(const std::vector<EndpointSample>& runs, const std::vector<int>& D_S, long T_m, long T_e) {
  if (runs.empty()) throw Error(ErrorKind::InsufficientData, "no runs");
  if (D_S.empty()) throw Error(ErrorKind::EmptyStagnatingSet, "D_S is empty");
  if (!(T_m < T_e)) throw Error(ErrorKind::HorizonTooShort, "need T_m < T_e");
  const int D = static_cast<int>(runs.front().log2_phi_m.size());
  const auto stag = zero_based(D_S, D);
  std::vector<bool> in_s(static_cast<std::size_t>(D), false);
  for (int d : stag) in_s[static_cast<std::size_t>(d)] = true;
  std::vector<int> rest;
  for (int d = 0; d < D; ++d) {
    if (!in_s[static_cast<std::size_t>(d)]) rest.push_back(d);
  }
  if (rest.empty()) throw Error(ErrorKind::EmptyRemainder, "every dimension is in D_S");

  const double H = static_cast<double>(T_e - T_m);
  const double R = static_cast<double>(runs.size());
  const double K = static_cast<double>(stag.size());
  std::vector<double> u, m;
  std::vector<double> dd, ll;
  for (const auto& r : runs) {
    if (static_cast<int>(r.log2_phi_m.size()) != D || static_cast<int>(r.log2_phi_e.size()) != D) {
      throw Error(ErrorKind::DimensionMismatch, "endpoint rows differ in width");
    }
    double max_m = -std::numeric_limits<double>::infinity(), max_e = max_m;
    double min_m = std::numeric_limits<double>::infinity(), min_e = min_m;
    for (int d : rest) {
      max_m = std::max(max_m, r.log2_phi_m[d]);
      max_e = std::max(max_e, r.log2_phi_e[d]);
      min_m = std::min(min_m, r.log2_phi_m[d]);
      min_e = std::min(min_e, r.log2_phi_e[d]);
    }
    u.push_back(max_e - max_m);
    m.push_back(min_e - min_m);
    const auto psi_m = psi_from_log2(r.log2_phi_m);
    const auto psi_e = psi_from_log2(r.log2_phi_e);
    for (int d : stag) {
      dd.push_back(r.log2_phi_e[d] - r.log2_phi_m[d]);
      ll.push_back(psi_e[d] - psi_m[d]);
    }
  }
  DriftStats s;
  s.runs = static_cast<long>(runs.size());
  auto sum = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  };
  s.mu_U = sum(u) / (R * H);
  s.mu_M = sum(m) / (R * H);
  s.mu_D = sum(dd) / (R * K * H);
  s.mu_L = s.mu_D - s.mu_U;
  auto spread = [H](const std::vector<double>& v, double mu, double denom) {
    double acc = 0.0;
    for (double x : v) acc += sq(x - H * mu);
    return acc / (denom * H * H);
  };
  s.var_U = spread(u, s.mu_U, R);
  s.var_M = spread(m, s.mu_M, R);
  s.var_D = spread(dd, s.mu_D, R * K);
  s.var_L = spread(ll, s.mu_L, R * K);
  s.sigma_U = std::sqrt(s.var_U);
  s.sigma_M = std::sqrt(s.var_M);
  s.sigma_D = std::sqrt(s.var_D);
  s.sigma_L = std::sqrt(s.var_L);
  return s;
}

DriftStats exp1_drift(const std::vector<PotentialTrace>& runs, const std::vector<int>& D_S, long T_m, long T_e) {
  std::vector<EndpointSample> samples;
  samples.reserve(runs.size());
  for (const auto& tr : runs) samples.push_back(endpoint_sample(tr, T_m, T_e));
  return exp1_drift(samples, D_S, T_m, T_e);
}

// ---------------------------------------------------------------- B/J split

void bj_split(std::span<const double> increments, double& base, std::vector<double>& residual) {
  if (increments.empty()) throw Error(ErrorKind::EmptyStagnatingSet, "D_S is empty");
  double sum = 0.0;
  for (double v : increments) sum += v;
  base = sum / static_cast<double>(increments.size());
  residual.resize(increments.size());
  for (std::size_t k = 0; k < increments.size(); ++k) residual[k] = increments[k] - base;
}

BJSeries bj_decompose(const PotentialTrace& trace, const std::vector<int>& D_S) {
  if (D_S.empty()) throw Error(ErrorKind::EmptyStagnatingSet, "D_S is empty");
  const auto stag = zero_based(D_S, trace.dims);
  BJSeries out;
  std::vector<double> row(stag.size());
  std::vector<double> res;
  for (std::size_t t = 0; t < trace.increments(); ++t) {
    for (std::size_t k = 0; k < stag.size(); ++k) row[k] = trace.increment(t, stag[k]);
    double b = 0.0;
    bj_split(row, b, res);
    out.base.push_back(b);
    out.residual.push_back(res);
  }
  return out;
}

// ---------------------------------------------------------------- increments ensemble

IncrementSums increment_sums(const PotentialTrace& trace, const std::vector<int>& D_S, long T_m, long T_e,
                             std::vector<long> taus) {
  if (D_S.empty()) throw Error(ErrorKind::EmptyStagnatingSet, "D_S is empty");
  if (!(T_m < T_e)) throw Error(ErrorKind::HorizonTooShort, "need T_m < T_e");
  const auto stag = zero_based(D_S, trace.dims);
  const long m = row_at(trace, T_m, "T_m");
  const long e = row_at(trace, T_e, "T_e");
  const long H = e - m;
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  for (long tau : taus) {
    if (tau < 1 || tau > H) {
      throw Error(ErrorKind::TauOutOfRange, "tau=" + std::to_string(tau) + " outside [1, " + std::to_string(H) + "]");
    }
  }
  const std::size_t K = stag.size();
  const long double k = static_cast<long double>(K);
  IncrementSums s;
  s.taus = taus;
  s.horizon = H;
  s.b_partial.reserve(taus.size());
  std::vector<long double> isum(K, 0.0L), jsum(K, 0.0L), inc(K);
  std::vector<long double> prefix(K, 0.0L);
  s.i_max.assign(K, 0.0);
  long double bsum = 0.0L;
  std::size_t next = 0;
  for (long t = m; t < e; ++t) {
    long double total = 0.0L;
    for (std::size_t j = 0; j < K; ++j) {
      const auto row = static_cast<std::size_t>(t);
      inc[j] = static_cast<long double>(trace.psi_at(row + 1, stag[j])) -
               static_cast<long double>(trace.psi_at(row, stag[j]));
      total += inc[j];
    }
    const long double b = total / k;
    bsum += b;
    for (std::size_t j = 0; j < K; ++j) {
      const long double jv = inc[j] - b;
      isum[j] += inc[j];
      jsum[j] += jv;
      s.j_total += jv;
      prefix[j] += inc[j];
      s.i_max[j] = std::max(s.i_max[j], static_cast<double>(prefix[j]));
    }
    const long count = t - m + 1;
    if (next < taus.size() && taus[next] == count) {
      s.b_partial.push_back(bsum);
      s.i_partial.push_back(isum);
      s.j_partial.push_back(jsum);
      ++next;
    }
  }
  s.b_total = bsum;
  for (int d = 0; d < trace.dims; ++d) s.final_psi.push_back(trace.psi_at(static_cast<std::size_t>(e), d));
  return s;
}

const IncrementRow& IncrementStats::at(long tau) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), tau,
                             [](const IncrementRow& r, long v) { return r.tau < v; });
  if (it == rows.end() || it->tau != tau) {
    throw Error(ErrorKind::TauOutOfRange, "tau=" + std::to_string(tau) + " not on the grid");
  }
  return *it;
}

IncrementStats exp2_stats(const std::vector<IncrementSums>& runs) {
  if (runs.empty()) throw Error(ErrorKind::InsufficientData, "no runs");
  const auto& first = runs.front();
  const std::size_t K = first.i_max.size();
  if (K == 0) throw Error(ErrorKind::EmptyStagnatingSet, "D_S is empty");
  for (const auto& r : runs) {
    if (r.taus != first.taus || r.horizon != first.horizon || r.i_max.size() != K) {
      throw Error(ErrorKind::DimensionMismatch, "runs disagree on tau grid, horizon or D_S");
    }
  }
  const long double R = static_cast<long double>(runs.size());
  const long double k = static_cast<long double>(K);
  const long double H = static_cast<long double>(first.horizon);
  long double btot = 0.0L, jtot = 0.0L;
  for (const auto& r : runs) {
    btot += r.b_total;
    jtot += r.j_total;
  }
  IncrementStats out;
  out.runs = static_cast<long>(runs.size());
  const long double mu = btot / (R * H);
  out.mu_B = static_cast<double>(mu);
  out.mu_I = out.mu_B;
  out.mu_J = static_cast<double>(jtot / (R * k * H));
  for (std::size_t g = 0; g < first.taus.size(); ++g) {
    const long double tau = static_cast<long double>(first.taus[g]);
    long double s2i = 0, s2b = 0, s2j = 0, m6i = 0, m6b = 0, m6j = 0, cov = 0;
    for (const auto& r : runs) {
      const long double bc = r.b_partial[g] - tau * mu;
      s2b += bc * bc;
      m6b += pow6(bc);
      for (std::size_t j = 0; j < K; ++j) {
        const long double ic = r.i_partial[g][j] - tau * mu;
        const long double jv = r.j_partial[g][j];
        s2i += ic * ic;
        m6i += pow6(ic);
        s2j += jv * jv;
        m6j += pow6(jv);
        cov += bc * jv;
      }
    }
    IncrementRow row;
    row.tau = first.taus[g];
    row.sigma2_I = static_cast<double>(s2i / (R * k));
    row.sigma2_B = static_cast<double>(s2b / R);
    row.sigma2_J = static_cast<double>(s2j / (R * k));
    row.m6_I = static_cast<double>(m6i / (R * k));
    row.m6_B = static_cast<double>(m6b / R);
    row.m6_J = static_cast<double>(m6j / (R * k));
    row.cov_BJ = static_cast<double>(cov / (R * k));
    out.rows.push_back(row);
  }
  return out;
}

IncrementStats exp2_stats(const std::vector<PotentialTrace>& runs, const std::vector<int>& D_S, long T_m,
                          long T_e, const std::vector<long>& taus) {
  std::vector<IncrementSums> sums;
  sums.reserve(runs.size());
  for (const auto& tr : runs) sums.push_back(increment_sums(tr, D_S, T_m, T_e, taus));
  return exp2_stats(sums);
}

// ---------------------------------------------------------------- moments

double moment_expansion_oracle(long t, double m2, double m3, double m4, double m6) {
  if (t < 1) throw Error(ErrorKind::DomainError, "t must be >= 1");
  const double n = static_cast<double>(t);
  return n * m6 + 10.0 * n * (n - 1.0) * m3 * m3 + 15.0 * n * (n - 1.0) * m4 * m2 +
         15.0 * n * (n - 1.0) * (n - 2.0) * m2 * m2 * m2;
}

// ---------------------------------------------------------------- Brownian approximation

double i_max(std::span<const double> increments) {
  double best = 0.0, run = 0.0;
  for (double v : increments) {
    run += v;
    best = std::max(best, run);
  }
  return best;
}

double i_max(const PotentialTrace& trace, int d, long T_m, long T_e) {
  if (d < 1 || d > trace.dims) throw Error(ErrorKind::IndexOutOfRange, "dimension " + std::to_string(d));
  const long m = row_at(trace, T_m, "T_m");
  const long e = row_at(trace, T_e, "T_e");
  std::vector<double> inc;
  for (long t = m; t < e; ++t) inc.push_back(trace.increment(static_cast<std::size_t>(t), d - 1));
  return i_max(inc);
}

SigmaBounds sigma_bounds(const std::function<double(long)>& sigma2_I, long coarse_step, long early_cut,
                         long horizon) {
  if (coarse_step < 1 || coarse_step > horizon) {
    throw Error(ErrorKind::HorizonTooShort, "coarse_step must lie in [1, horizon]");
  }
  if (early_cut < 0 || early_cut >= horizon) {
    throw Error(ErrorKind::HorizonTooShort, "early_cut must lie in [0, horizon)");
  }
  SigmaBounds b;
  b.sigma2_max = -std::numeric_limits<double>::infinity();
  for (long tau = coarse_step; tau <= horizon; tau += coarse_step) {
    const double v = sigma2_I(tau) / static_cast<double>(tau);
    if (v > b.sigma2_max) {
      b.sigma2_max = v;
      b.argmax_tau = tau;
    }
  }
  const double low = early_cut == 0 ? 0.0 : sigma2_I(early_cut);
  b.sigma2_min = (sigma2_I(horizon) - low) / static_cast<double>(horizon - early_cut);
  b.ordered = b.sigma2_max >= b.sigma2_min;
  return b;
}

SigmaBounds sigma_bounds(const IncrementStats& stats, long coarse_step, long early_cut, long horizon) {
  return sigma_bounds([&stats](long tau) { return stats.at(tau).sigma2_I; }, coarse_step, early_cut, horizon);
}

std::vector<long> sigma_grid(long coarse_step, long early_cut, long horizon, const std::vector<long>& extra) {
  if (coarse_step < 1) throw Error(ErrorKind::HorizonTooShort, "coarse_step must be >= 1");
  std::vector<long> g;
  for (long tau = coarse_step; tau <= horizon; tau += coarse_step) g.push_back(tau);
  if (early_cut > 0) g.push_back(early_cut);
  g.push_back(horizon);
  for (long tau : extra) g.push_back(tau);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double brownian_cdf(double x, double mu, double sigma2) {
  if (x < 0.0) return 0.0;
  return 1.0 - std::exp(2.0 * x * mu / sigma2);
}

double brownian_no_end_probability(double gap, double mu, double sigma2, int n0) {
  if (!(gap > 0.0)) throw Error(ErrorKind::DomainError, "gap must be positive");
  if (!(mu < 0.0)) throw Error(ErrorKind::DomainError, "mu must be negative");
  if (!(sigma2 > 0.0)) throw Error(ErrorKind::DomainError, "sigma2 must be positive");
  if (n0 < 1) throw Error(ErrorKind::DomainError, "n0 must be >= 1");
  return std::pow(-std::expm1(2.0 * gap * mu / sigma2), n0);
}

// ---------------------------------------------------------------- empirical distributions

double StepFunction::operator()(double q) const {
  auto it = std::upper_bound(x.begin(), x.end(), q);
  if (it == x.begin()) return 0.0;
  return F[static_cast<std::size_t>(it - x.begin()) - 1];
}

double StepFunction::quantile(double p) const {
  for (std::size_t k = 0; k < F.size(); ++k) {
    if (F[k] >= p) return x[k];
  }
  return std::numeric_limits<double>::infinity();
}

StepFunction empirical_cdf(std::vector<double> values, double denominator) {
  if (!(denominator > 0.0)) throw Error(ErrorKind::EmptyCohort, "empty sample");
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }),
               values.end());
  std::sort(values.begin(), values.end());
  StepFunction f;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k + 1 < values.size() && values[k + 1] == values[k]) continue;
    f.x.push_back(values[k]);
    f.F.push_back(static_cast<double>(k + 1) / denominator);
  }
  return f;
}

StepFunction f_emp(const std::vector<IncrementSums>& runs) {
  std::vector<double> v;
  for (const auto& r : runs) v.insert(v.end(), r.i_max.begin(), r.i_max.end());
  return empirical_cdf(v, static_cast<double>(v.size()));
}

namespace {

bool in_x_cohort(const PhasePartition& p, int i, long T_e) {
  if (i == 0) return true;
  const auto prev = static_cast<std::size_t>(i - 1);
  return prev < p.beta.size() && p.beta[prev] != kOpen && p.beta[prev] <= T_e;
}

StepFunction stopping_cdf(const std::vector<StoppingTimes>& runs, int i, bool alpha) {
  if (runs.empty()) throw Error(ErrorKind::EmptyCohort, "no runs");
  std::vector<double> v;
  for (const auto& r : runs) {
    const auto& times = alpha ? r.alpha : r.beta;
    if (i >= 0 && static_cast<std::size_t>(i) < times.size() && times[static_cast<std::size_t>(i)] != kOpen) {
      v.push_back(static_cast<double>(times[static_cast<std::size_t>(i)]));
    }
  }
  return empirical_cdf(v, static_cast<double>(runs.size()));
}

}  // namespace

long x_cohort_size(const std::vector<PhasePartition>& runs, int i, long T_e) {
  long n = 0;
  for (const auto& p : runs) n += in_x_cohort(p, i, T_e);
  return n;
}

StepFunction f_x(const std::vector<PhasePartition>& runs, int i, long T_e) {
  std::vector<double> v;
  long cohort = 0;
  for (const auto& p : runs) {
    if (!in_x_cohort(p, i, T_e)) continue;
    ++cohort;
    const auto k = static_cast<std::size_t>(i);
    if (k < p.x_durations.size() && p.alpha[k] <= T_e) v.push_back(static_cast<double>(p.x_durations[k]));
  }
  if (cohort == 0) throw Error(ErrorKind::EmptyCohort, "no run started PH_X " + std::to_string(i));
  return empirical_cdf(v, static_cast<double>(cohort));
}

StepFunction f_alpha(const std::vector<StoppingTimes>& runs, int i) { return stopping_cdf(runs, i, true); }
StepFunction f_beta(const std::vector<StoppingTimes>& runs, int i) { return stopping_cdf(runs, i, false); }

double f_psi(const std::vector<std::vector<double>>& final_psi, int d, double x) {
  if (final_psi.empty()) throw Error(ErrorKind::EmptyCohort, "no runs");
  long hits = 0;
  for (const auto& run : final_psi) {
    long count = 0;
    for (double p : run) count += (p <= x);
    hits += (count >= d);
  }
  return static_cast<double>(hits) / static_cast<double>(final_psi.size());
}

StepFunction f_psi_curve(const std::vector<std::vector<double>>& final_psi, int d) {
  std::vector<double> xs;
  for (const auto& run : final_psi) xs.insert(xs.end(), run.begin(), run.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  StepFunction f;
  double last = 0.0;
  for (double x : xs) {
    const double v = f_psi(final_psi, d, x);
    if (v != last) {
      f.x.push_back(x);
      f.F.push_back(v);
      last = v;
    }
  }
  return f;
}

PhaseSummary appendix_summary(const std::vector<PhasePartition>& runs, int i, long T_e) {
  PhaseSummary s;
  std::vector<double> v;
  for (const auto& p : runs) {
    if (!in_x_cohort(p, i, T_e)) continue;
    ++s.cohort;
    const auto k = static_cast<std::size_t>(i);
    if (k < p.x_durations.size() && p.alpha[k] <= T_e) {
      v.push_back(static_cast<double>(p.x_durations[k]));
    } else {
      ++s.censored;
    }
  }
  if (v.empty()) throw Error(ErrorKind::EmptyCohort, "no finite X_" + std::to_string(i));
  s.observed = static_cast<long>(v.size());
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += sq(x - s.mean);
  s.variance = acc / static_cast<double>(v.size());
  return s;
}

}  // namespace swarmlab
