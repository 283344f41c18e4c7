#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace swarmlab {

enum class IncrementDistribution { Gaussian, RademacherShifted, UniformShifted };

/// i.i.d. increments: gaussian(mu, variance), mu +/- 1, or mu + U(-width/2, width/2).
struct SyntheticIncrementSpec {
  IncrementDistribution distribution = IncrementDistribution::Gaussian;
  double mu = -0.5;
  double variance = 1.0;  // gaussian only; 0 gives the constant increment mu
  double width = 1.0;     // uniform only
  long horizon = 100;
  long samples = 1000000;
  std::uint64_t seed = 1;

  static SyntheticIncrementSpec gaussian(double mu, double variance);
  static SyntheticIncrementSpec rademacher_shifted(double mu);
  static SyntheticIncrementSpec uniform_shifted(double mu, double width);

  /// e.g. "gaussian(-0.5,1)"
  std::string name() const;
  void validate() const;
};

/// E|I - mu|^k for k = 1..6, in closed form.
std::array<double, 6> absolute_central_moments(const SyntheticIncrementSpec& spec);

/// C = (M + 25 M^2 + 15 M^3) / mu^6 with M the largest of the six absolute central moments.
double tail_constant(const SyntheticIncrementSpec& spec);

struct TailRow {
  long t = 0;
  double empirical_p = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;  // C / t^3
  bool ok = true;      // empirical_p <= bound + 3 SE
};

inline const std::vector<long> kTailCheckpoints = {1, 2, 5, 10, 20, 50, 100};

/// Monte Carlo estimate of P(sum of the first t increments > 0) at each checkpoint.
std::vector<TailRow> tail_bound_check(const SyntheticIncrementSpec& spec,
                                      const std::vector<long>& checkpoints = kTailCheckpoints, int threads = 1);

struct StayNegativeRow {
  long horizon = 0;
  double probability = 0.0;
  double standard_error = 0.0;
};

/// P(every partial sum up to T stays <= 0) for each T in `horizons`, estimated on shared paths.
std::vector<StayNegativeRow> stay_negative_probability(const SyntheticIncrementSpec& spec,
                                                       const std::vector<long>& horizons, int threads = 1);
/// Single horizon spec.horizon.
double stay_negative_probability(const SyntheticIncrementSpec& spec);

/// Closed-form P(N(mean, variance) > 0).
double normal_exceedance(double mean, double variance);

}  // namespace swarmlab
