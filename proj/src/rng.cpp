#include "swarmlab/rng.hpp"

#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {}

RngStream RngStream::scripted(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::ConfigError, "scripted stream needs at least one value");
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::DomainError, "scripted draw outside [0,1]");
  }
  RngStream s(0);
  s.script_ = std::move(values);
  return s;
}

double RngStream::next_uniform() {
  const std::uint64_t k = counter_++;
  if (!script_.empty()) return script_[k % script_.size()];
  const std::uint64_t out = mix64(seed_ + (k + 1) * kGolden);
  return static_cast<double>(out >> 11) * kTwoPowMinus53;
}

}  // namespace swarmlab
