#pragma once

#include <functional>
#include <span>
#include <vector>

#include "swarmlab/potential.hpp"
#include "swarmlab/stagnation.hpp"

namespace swarmlab {

/// Dimensions d_star .. d_star + L - 1 (1-based).
std::vector<int> stagnating_range(int L, int d_star);

// ---------------------------------------------------------------- drift

/// The two endpoint samples of one run that the drift estimators need.
struct EndpointSample {
  std::vector<double> log2_phi_m;
  std::vector<double> log2_phi_e;
};

/// Extracts rows at iterations T_m and T_e; both must be sampled.
EndpointSample endpoint_sample(const PotentialTrace& trace, long T_m, long T_e);

struct DriftStats {
  double mu_U = 0, mu_M = 0, mu_D = 0, mu_L = 0;
  double var_U = 0, var_M = 0, var_D = 0, var_L = 0;
  double sigma_U = 0, sigma_M = 0, sigma_D = 0, sigma_L = 0;
  long runs = 0;
};

/// Per-iteration drift of log2 Phi between T_m and T_e over an ensemble.
/// D_S is 1-based. Throws EmptyStagnatingSet for D_S empty, EmptyRemainder when D_S covers every dimension.
DriftStats exp1_drift(const std::vector<EndpointSample>& runs, const std::vector<int>& D_S, long T_m, long T_e);
DriftStats exp1_drift(const std::vector<PotentialTrace>& runs, const std::vector<int>& D_S, long T_m, long T_e);

// ---------------------------------------------------------------- B/J split

struct BJSeries {
  std::vector<double> base;                   // B_t
  std::vector<std::vector<double>> residual;  // J_{t,k}, k indexing D_S in order
};

/// B_t = mean of I_{t,d} over D_S, J_{t,d} = I_{t,d} - B_t, for every increment row of the trace.
BJSeries bj_decompose(const PotentialTrace& trace, const std::vector<int>& D_S);
/// Same split for a single row of increments over D_S.
void bj_split(std::span<const double> increments, double& base, std::vector<double>& residual);

// ---------------------------------------------------------------- increments ensemble

/// Everything one run contributes to the increment estimators, so traces can be dropped early.
/// Times are sample indices counted from T_m (tau = number of summed increments).
struct IncrementSums {
  std::vector<long> taus;
  std::vector<long double> b_partial;               // B'_tau
  std::vector<std::vector<long double>> i_partial;  // [tau][k] I'_{tau,d}
  std::vector<std::vector<long double>> j_partial;  // [tau][k] J'_{tau,d}
  long double b_total = 0;  // sum of B_t over the second half
  long double j_total = 0;  // sum of J_{t,d} over d and the second half
  std::vector<double> i_max;  // per k
  long horizon = 0;           // T_e - T_m in samples
  std::vector<double> final_psi;  // Psi at T_e for every dimension
};

/// T_m, T_e in iterations (multiples of delta_t). taus are increments counts, each <= horizon.
/// Throws TauOutOfRange for taus outside [1, horizon].
IncrementSums increment_sums(const PotentialTrace& trace, const std::vector<int>& D_S, long T_m, long T_e,
                             std::vector<long> taus);

struct IncrementRow {
  long tau = 0;
  double sigma2_I = 0, sigma2_B = 0, sigma2_J = 0;
  double m6_I = 0, m6_B = 0, m6_J = 0;
  double cov_BJ = 0;
};

struct IncrementStats {
  double mu_I = 0, mu_B = 0, mu_J = 0;
  std::vector<IncrementRow> rows;
  long runs = 0;

  /// Row for tau; throws TauOutOfRange if tau was not on the grid.
  const IncrementRow& at(long tau) const;
};

/// Ensemble estimators; all runs must share the same tau grid and horizon.
IncrementStats exp2_stats(const std::vector<IncrementSums>& runs);
IncrementStats exp2_stats(const std::vector<PotentialTrace>& runs, const std::vector<int>& D_S, long T_m,
                          long T_e, const std::vector<long>& taus);

// ---------------------------------------------------------------- moments

/// E[(sum of t i.i.d. centered terms)^6] from the central moments of one term.
double moment_expansion_oracle(long t, double m2, double m3, double m4, double m6);

// ---------------------------------------------------------------- Brownian approximation

/// Maximum of prefix sums including the empty one, hence >= 0.
double i_max(std::span<const double> increments);
/// Same over trace rows T_m .. T_e (iterations) of dimension d (1-based).
double i_max(const PotentialTrace& trace, int d, long T_m, long T_e);

struct SigmaBounds {
  double sigma2_max = 0;
  double sigma2_min = 0;
  long argmax_tau = 0;
  bool ordered = true;  // sigma2_max >= sigma2_min
};

/// sigma2_max = max_k s(k c)/(k c) for k c <= H; sigma2_min = (s(H) - s(cut)) / (H - cut).
SigmaBounds sigma_bounds(const std::function<double(long)>& sigma2_I, long coarse_step, long early_cut,
                         long horizon);
SigmaBounds sigma_bounds(const IncrementStats& stats, long coarse_step, long early_cut, long horizon);

/// Taus needed by sigma_bounds plus `extra`, sorted and unique.
std::vector<long> sigma_grid(long coarse_step, long early_cut, long horizon, const std::vector<long>& extra = {});

/// 1 - exp(2 x mu / sigma2) for x >= 0, 0 below.
double brownian_cdf(double x, double mu, double sigma2);
/// (1 - exp(2 gap mu / sigma2))^n0. Throws DomainError unless gap > 0, mu < 0, sigma2 > 0, n0 >= 1.
double brownian_no_end_probability(double gap, double mu, double sigma2, int n0);

// ---------------------------------------------------------------- empirical distributions

/// Right-continuous step function: F(q) = F[k] for the last x[k] <= q, 0 before x[0].
struct StepFunction {
  std::vector<double> x;
  std::vector<double> F;

  double operator()(double q) const;
  /// Smallest jump point where F reaches p.
  double quantile(double p) const;
};

/// Finite values only contribute jumps; the normalization counts all of `denominator` entries.
StepFunction empirical_cdf(std::vector<double> values, double denominator);

StepFunction f_emp(const std::vector<IncrementSums>& runs);
/// Runs where PH_X_i started by T_e. Throws EmptyCohort when there are none.
StepFunction f_x(const std::vector<PhasePartition>& runs, int i, long T_e);
StepFunction f_alpha(const std::vector<StoppingTimes>& runs, int i);
StepFunction f_beta(const std::vector<StoppingTimes>& runs, int i);
/// Fraction of runs whose count of dimensions with final Psi <= x is at least d.
double f_psi(const std::vector<std::vector<double>>& final_psi, int d, double x);
StepFunction f_psi_curve(const std::vector<std::vector<double>>& final_psi, int d);

struct PhaseSummary {
  long cohort = 0;    // |D_X,i|
  long observed = 0;  // cohort runs where X_i ended inside the trace
  long censored = 0;
  double min = 0, max = 0, mean = 0, variance = 0;
};

/// Statistics of X_i over the cohort. Throws EmptyCohort when no run has a finite X_i.
PhaseSummary appendix_summary(const std::vector<PhasePartition>& runs, int i, long T_e);
/// Cohort size alone (never throws).
long x_cohort_size(const std::vector<PhasePartition>& runs, int i, long T_e);

}  // namespace swarmlab
