#pragma once

#include <cstdint>
#include <vector>

namespace swarmlab {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Counter-based uniform stream: draw k of seed s is a pure function of (s, k).
/// A scripted stream replays a fixed list of values (cycling) for fixtures.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  static RngStream scripted(std::vector<double> values);

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_uniform();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
  std::vector<double> script_;
};

}  // namespace swarmlab
