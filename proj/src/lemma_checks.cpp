#include "swarmlab/lemma_checks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "swarmlab/errors.hpp"
#include "swarmlab/rng.hpp"

namespace swarmlab {

namespace {

std::string short_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class IncrementSampler {
 public:
  IncrementSampler(const SyntheticIncrementSpec& spec, std::uint64_t seed)
      : spec_(spec), gen_(seed), normal_(spec.mu, std::sqrt(spec.variance)), unit_(0.0, 1.0) {}

  double next() {
    switch (spec_.distribution) {
      case IncrementDistribution::Gaussian:
        return spec_.variance == 0.0 ? spec_.mu : normal_(gen_);
      case IncrementDistribution::RademacherShifted:
        return spec_.mu + ((gen_() >> 63) ? 1.0 : -1.0);
      case IncrementDistribution::UniformShifted:
        return spec_.mu + spec_.width * (unit_(gen_) - 0.5);
    }
    return spec_.mu;
  }

 private:
  const SyntheticIncrementSpec& spec_;
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> unit_;
};

constexpr long kChunk = 1 << 16;

// Paths are split into fixed-size chunks with their own generator, so counts do not
// depend on the thread count.
struct PathCounts {
  std::vector<long> positive;  // per step t (1-based index t-1): sum > 0
  std::vector<long> negative;  // per step: every partial sum so far <= 0
};

PathCounts simulate(const SyntheticIncrementSpec& spec, long length, int threads) {
  const long chunks = (spec.samples + kChunk - 1) / kChunk;
  std::vector<PathCounts> per(static_cast<std::size_t>(chunks));
  auto work = [&](long c) {
    PathCounts pc;
    pc.positive.assign(static_cast<std::size_t>(length), 0);
    pc.negative.assign(static_cast<std::size_t>(length), 0);
    IncrementSampler sampler(spec, mix64(spec.seed ^ (0xA5A5A5A5ULL + static_cast<std::uint64_t>(c))));
    const long begin = c * kChunk;
    const long end = std::min(spec.samples, begin + kChunk);
    for (long p = begin; p < end; ++p) {
      double sum = 0.0;
      bool alive = true;
      for (long t = 0; t < length; ++t) {
        sum += sampler.next();
        if (sum > 0.0) {
          ++pc.positive[static_cast<std::size_t>(t)];
          alive = false;
        }
        if (alive) ++pc.negative[static_cast<std::size_t>(t)];
      }
    }
    per[static_cast<std::size_t>(c)] = std::move(pc);
  };
  const int n = std::max(1, threads);
  if (n == 1) {
    for (long c = 0; c < chunks; ++c) work(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) {
      pool.emplace_back([&, w] {
        for (long c = w; c < chunks; c += n) work(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  PathCounts total;
  total.positive.assign(static_cast<std::size_t>(length), 0);
  total.negative.assign(static_cast<std::size_t>(length), 0);
  for (const auto& pc : per) {
    for (long t = 0; t < length; ++t) {
      total.positive[static_cast<std::size_t>(t)] += pc.positive[static_cast<std::size_t>(t)];
      total.negative[static_cast<std::size_t>(t)] += pc.negative[static_cast<std::size_t>(t)];
    }
  }
  return total;
}

double standard_error(double p, long n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

}  // namespace

SyntheticIncrementSpec SyntheticIncrementSpec::gaussian(double mu, double variance) {
  SyntheticIncrementSpec s;
  s.distribution = IncrementDistribution::Gaussian;
  s.mu = mu;
  s.variance = variance;
  return s;
}

SyntheticIncrementSpec SyntheticIncrementSpec::rademacher_shifted(double mu) {
  SyntheticIncrementSpec s;
  s.distribution = IncrementDistribution::RademacherShifted;
  s.mu = mu;
  return s;
}

SyntheticIncrementSpec SyntheticIncrementSpec::uniform_shifted(double mu, double width) {
  SyntheticIncrementSpec s;
  s.distribution = IncrementDistribution::UniformShifted;
  s.mu = mu;
  s.width = width;
  return s;
}

std::string SyntheticIncrementSpec::name() const {
  switch (distribution) {
    case IncrementDistribution::Gaussian:
      return "gaussian(" + short_double(mu) + "," + short_double(variance) + ")";
    case IncrementDistribution::RademacherShifted:
      return "rademacher_shifted(" + short_double(mu) + ")";
    case IncrementDistribution::UniformShifted:
      return "uniform_shifted(" + short_double(mu) + "," + short_double(width) + ")";
  }
  return "?";
}

void SyntheticIncrementSpec::validate() const {
  if (!std::isfinite(mu)) throw Error(ErrorKind::ConfigError, "mu must be finite");
  if (variance < 0.0) throw Error(ErrorKind::ConfigError, "variance must be >= 0");
  if (!(width > 0.0)) throw Error(ErrorKind::ConfigError, "width must be positive");
  if (horizon < 1) throw Error(ErrorKind::ConfigError, "horizon must be >= 1");
  if (samples < 1) throw Error(ErrorKind::ConfigError, "samples must be >= 1");
}

std::array<double, 6> absolute_central_moments(const SyntheticIncrementSpec& spec) {
  std::array<double, 6> m{};
  switch (spec.distribution) {
    case IncrementDistribution::Gaussian: {
      // E|Z|^k: sqrt(2/pi), 1, 2 sqrt(2/pi), 3, 8 sqrt(2/pi), 15
      const double r = std::sqrt(2.0 / std::numbers::pi);
      const std::array<double, 6> z = {r, 1.0, 2.0 * r, 3.0, 8.0 * r, 15.0};
      const double s = std::sqrt(spec.variance);
      for (int k = 0; k < 6; ++k) m[k] = z[k] * std::pow(s, k + 1);
      break;
    }
    case IncrementDistribution::RademacherShifted:
      m.fill(1.0);
      break;
    case IncrementDistribution::UniformShifted: {
      const double a = spec.width / 2.0;
      for (int k = 0; k < 6; ++k) m[k] = std::pow(a, k + 1) / static_cast<double>(k + 2);
      break;
    }
  }
  return m;
}

double tail_constant(const SyntheticIncrementSpec& spec) {
  if (!(spec.mu < 0.0)) throw Error(ErrorKind::DomainError, "tail bound needs mu < 0");
  const auto m = absolute_central_moments(spec);
  const double M = *std::max_element(m.begin(), m.end());
  return (M + 25.0 * M * M + 15.0 * M * M * M) / std::pow(spec.mu, 6);
}

std::vector<TailRow> tail_bound_check(const SyntheticIncrementSpec& spec, const std::vector<long>& checkpoints,
                                      int threads) {
  spec.validate();
  if (checkpoints.empty()) return {};
  for (long t : checkpoints) {
    if (t < 1) throw Error(ErrorKind::ConfigError, "checkpoints must be >= 1");
  }
  const double C = tail_constant(spec);
  const long length = *std::max_element(checkpoints.begin(), checkpoints.end());
  const auto counts = simulate(spec, length, threads);
  std::vector<TailRow> rows;
  for (long t : checkpoints) {
    TailRow r;
    r.t = t;
    r.empirical_p = static_cast<double>(counts.positive[static_cast<std::size_t>(t - 1)]) /
                    static_cast<double>(spec.samples);
    r.standard_error = standard_error(r.empirical_p, spec.samples);
    r.bound = C / std::pow(static_cast<double>(t), 3);
    r.ok = r.empirical_p <= r.bound + 3.0 * r.standard_error;
    rows.push_back(r);
  }
  return rows;
}

std::vector<StayNegativeRow> stay_negative_probability(const SyntheticIncrementSpec& spec,
                                                       const std::vector<long>& horizons, int threads) {
  spec.validate();
  if (horizons.empty()) return {};
  for (long T : horizons) {
    if (T < 1) throw Error(ErrorKind::ConfigError, "horizons must be >= 1");
  }
  const long length = *std::max_element(horizons.begin(), horizons.end());
  const auto counts = simulate(spec, length, threads);
  std::vector<StayNegativeRow> rows;
  for (long T : horizons) {
    StayNegativeRow r;
    r.horizon = T;
    r.probability = static_cast<double>(counts.negative[static_cast<std::size_t>(T - 1)]) /
                    static_cast<double>(spec.samples);
    r.standard_error = standard_error(r.probability, spec.samples);
    rows.push_back(r);
  }
  return rows;
}

double stay_negative_probability(const SyntheticIncrementSpec& spec) {
  return stay_negative_probability(spec, {spec.horizon}).front().probability;
}

double normal_exceedance(double mean, double variance) {
  if (variance == 0.0) return mean > 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-mean / std::sqrt(2.0 * variance));
}

}  // namespace swarmlab
