#include "swarmlab/pso.hpp"

#include <algorithm>
#include <string>

#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace {

constexpr long kDrawBits = 64;

// (2u - 1) is exact in binary64 for u = k * 2^-53.
BigReal box_value(double u, double h, long bits) {
  BigReal r(2.0 * u - 1.0, bits);
  mul_into(r, r, BigReal(h, bits));
  return r;
}

}  // namespace

SwarmParams SwarmParams::standard(int N, int D, long bits) {
  SwarmParams p;
  p.N = N;
  p.D = D;
  p.chi = BigReal::from_string("0.72984", bits);
  p.c1 = BigReal::from_string("1.496172", bits);
  p.c2 = BigReal::from_string("1.496172", bits);
  return p;
}

void SwarmParams::validate() const {
  if (N < 1) throw Error(ErrorKind::ConfigError, "N must be >= 1");
  if (D < 1) throw Error(ErrorKind::ConfigError, "D must be >= 1");
  if (chi.sign() <= 0 || c1.sign() <= 0 || c2.sign() <= 0) {
    throw Error(ErrorKind::ConfigError, "chi, c1, c2 must be positive");
  }
}

long SwarmState::max_precision() const {
  long bits = 0;
  auto scan = [&bits](const std::vector<std::vector<BigReal>>& m) {
    for (const auto& row : m) {
      for (const auto& v : row) bits = std::max(bits, v.precision());
    }
  };
  scan(X);
  scan(V);
  scan(L);
  for (const auto& v : G) bits = std::max(bits, v.precision());
  return bits;
}

Swarm::Swarm(SwarmParams params, ObjectiveId f, PrecisionPolicy policy)
    : params_(std::move(params)), objective_(f, params_.D, policy.initial_bits), policy_(policy) {
  params_.validate();
  policy_.validate();
}

SwarmState Swarm::init_usual(double box_halfwidth, RngStream& rng, VelocityInit velocity) const {
  return init_special(box_halfwidth, 0, 0, 1, rng, velocity);
}

SwarmState Swarm::init_special(double box_halfwidth, long S, int L_count, int d_star, RngStream& rng,
                               VelocityInit velocity) const {
  const int N = params_.N;
  const int D = params_.D;
  if (!(box_halfwidth > 0.0)) throw Error(ErrorKind::ConfigError, "box half-width must be positive");
  if (L_count < 0 || L_count > D) throw Error(ErrorKind::IndexOutOfRange, "L must lie in [0, D]");
  if (d_star < 1 || d_star > D - L_count + 1) {
    throw Error(ErrorKind::IndexOutOfRange, "d* must lie in [1, D - L + 1]");
  }
  if (S < 0) throw Error(ErrorKind::IndexOutOfRange, "scale S must be >= 0");

  const long bits = policy_.initial_bits;
  std::vector<std::vector<BigReal>> X(static_cast<std::size_t>(N), std::vector<BigReal>(static_cast<std::size_t>(D)));
  for (int d = 0; d < D; ++d) {
    for (int n = 0; n < N; ++n) X[n][d] = box_value(rng.next_uniform(), box_halfwidth, bits);
  }
  for (int d = d_star - 1; d < d_star - 1 + L_count; ++d) {
    BigReal Y = box_value(rng.next_uniform(), box_halfwidth, bits);
    for (int n = 0; n < N; ++n) X[n][d] = add(ldexp(X[n][d], -S), Y, policy_);
  }
  return finish_init(std::move(X), box_halfwidth, rng, velocity);
}

SwarmState Swarm::finish_init(std::vector<std::vector<BigReal>> X, double box_halfwidth, RngStream& rng,
                              VelocityInit velocity) const {
  const int N = params_.N;
  const int D = params_.D;
  const long bits = policy_.initial_bits;
  SwarmState s;
  s.t = 0;
  s.V.assign(static_cast<std::size_t>(N), std::vector<BigReal>(static_cast<std::size_t>(D), BigReal(bits)));
  if (velocity == VelocityInit::Uniform) {
    for (int d = 0; d < D; ++d) {
      for (int n = 0; n < N; ++n) s.V[n][d] = box_value(rng.next_uniform(), box_halfwidth, bits);
    }
  }
  s.X = std::move(X);
  s.L = s.X;
  s.fL.reserve(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) s.fL.push_back(objective_.evaluate(s.L[n], policy_));
  int best = 0;
  for (int n = 1; n < N; ++n) {
    if (s.fL[n] < s.fL[best]) best = n;
  }
  s.G = s.L[best];
  s.fG = s.fL[best];
  return s;
}

void Swarm::step_particle(SwarmState& state, int n, RngStream& rng) {
  const int D = params_.D;
  if (n < 0 || n >= static_cast<int>(state.X.size())) {
    throw Error(ErrorKind::IndexOutOfRange, "particle index " + std::to_string(n));
  }
  auto& x = state.X[n];
  auto& v = state.V[n];
  auto& l = state.L[n];
  for (int d = 0; d < D; ++d) {
    const double r = rng.next_uniform();
    const double s = rng.next_uniform();
    // v = chi*v + (c1*r)*(l - x) + (c2*s)*(g - x)
    mul_into(v[d], v[d], params_.chi);
    sub_into(a_, l[d], x[d], policy_);
    r_.assign_double(r, kDrawBits);
    mul_into(coef_, params_.c1, r_);
    mul_into(a_, a_, coef_);
    sub_into(b_, state.G[d], x[d], policy_);
    r_.assign_double(s, kDrawBits);
    mul_into(coef_, params_.c2, r_);
    mul_into(b_, b_, coef_);
    add_into(a_, a_, b_, policy_);
    add_into(v[d], v[d], a_, policy_);
  }
  for (int d = 0; d < D; ++d) add_into(x[d], x[d], v[d], policy_);

  objective_.evaluate_into(fx_, x, policy_, eval_scratch_);
  if (fx_ < state.fL[n]) {
    for (int d = 0; d < D; ++d) l[d] = x[d];
    state.fL[n] = fx_;
    if (fx_ < state.fG) {
      for (int d = 0; d < D; ++d) state.G[d] = x[d];
      state.fG = fx_;
    }
  }
}

void Swarm::iterate(SwarmState& state, RngStream& rng) {
  for (int n = 0; n < params_.N; ++n) step_particle(state, n, rng);
  ++state.t;
}

RunSummary Swarm::run(SwarmState& state, RngStream& rng, long T, long sample_every,
                      const StateObserver& observer) {
  if (T < 1) throw Error(ErrorKind::ConfigError, "T must be >= 1");
  if (sample_every < 1) throw Error(ErrorKind::ConfigError, "sample_every must be >= 1");
  if (observer && state.t % sample_every == 0) observer(state);
  for (long i = 0; i < T; ++i) {
    iterate(state, rng);
    if (observer && state.t % sample_every == 0) observer(state);
  }
  RunSummary out;
  out.iterations = state.t;
  out.draws = rng.draws();
  out.max_precision = state.max_precision();
  return out;
}

}  // namespace swarmlab
