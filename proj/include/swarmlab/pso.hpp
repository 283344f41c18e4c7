#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "swarmlab/big_real.hpp"
#include "swarmlab/objectives.hpp"
#include "swarmlab/rng.hpp"

namespace swarmlab {

struct SwarmParams {
  int N = 3;
  int D = 10;
  BigReal chi;
  BigReal c1;
  BigReal c2;

  /// chi = 0.72984, c1 = c2 = 1.496172, rounded to `bits`.
  static SwarmParams standard(int N, int D, long bits = 512);
  void validate() const;
};

enum class VelocityInit { Zero, Uniform };

/// Rows are particles, columns dimensions (both 0-based).
struct SwarmState {
  long t = 0;
  std::vector<std::vector<BigReal>> X;
  std::vector<std::vector<BigReal>> V;
  std::vector<std::vector<BigReal>> L;
  std::vector<BigReal> fL;
  std::vector<BigReal> G;
  BigReal fG;

  int particles() const { return static_cast<int>(X.size()); }
  int dims() const { return G.empty() ? 0 : static_cast<int>(G.size()); }
  /// Widest mantissa among positions, velocities and attractors.
  long max_precision() const;
};

struct RunSummary {
  long iterations = 0;
  std::uint64_t draws = 0;
  long max_precision = 0;
};

using StateObserver = std::function<void(const SwarmState&)>;

/// The classical swarm bound to one objective and precision policy.
/// A Swarm holds scratch buffers, so one instance must not be shared between threads.
class Swarm {
 public:
  Swarm(SwarmParams params, ObjectiveId f, PrecisionPolicy policy = {});

  const SwarmParams& params() const { return params_; }
  const Objective& objective() const { return objective_; }
  const PrecisionPolicy& policy() const { return policy_; }

  /// Positions uniform in [-h, h]^D, drawn dimension-major (for d, for n).
  SwarmState init_usual(double box_halfwidth, RngStream& rng, VelocityInit velocity = VelocityInit::Zero) const;
  /// Compresses dimensions d_star..d_star+L_count-1 (1-based) by 2^-S around a shared random center.
  SwarmState init_special(double box_halfwidth, long S, int L_count, int d_star, RngStream& rng,
                          VelocityInit velocity = VelocityInit::Zero) const;

  /// Moves particle n (0-based) and updates its local attractor and the global attractor.
  void step_particle(SwarmState& state, int n, RngStream& rng);
  /// One iteration: every particle in index order, then t += 1.
  void iterate(SwarmState& state, RngStream& rng);
  /// Runs T iterations; `observer` sees the state whenever t is a multiple of sample_every (t = 0 included).
  RunSummary run(SwarmState& state, RngStream& rng, long T, long sample_every, const StateObserver& observer);

 private:
  SwarmState finish_init(std::vector<std::vector<BigReal>> X, double box_halfwidth, RngStream& rng,
                         VelocityInit velocity) const;

  SwarmParams params_;
  Objective objective_;
  PrecisionPolicy policy_;
  // scratch
  BigReal a_, b_, coef_, r_, fx_;
  std::vector<BigReal> eval_scratch_;
};

}  // namespace swarmlab
