#include <random>

#include "doctest.h"
#include "swarmlab/errors.hpp"
#include "swarmlab/stagnation.hpp"

using namespace swarmlab;

namespace {

PotentialTrace rows_trace(long dt, long first, const std::vector<std::vector<double>>& rows) {
  PotentialTrace t;
  t.delta_t = dt;
  t.first_index = first;
  t.dims = static_cast<int>(rows.front().size());
  for (const auto& r : rows) t.append(r);
  return t;
}

StagnationConfig cfg(long dt = 1, int n0 = 1) {
  StagnationConfig c;
  c.delta_t = dt;
  c.n0 = n0;
  c.c0 = -40;
  c.cs = -20;
  return c;
}

// Dimension 2 follows a walk of i.i.d. increments far below the leader.
PotentialTrace walk_trace(const std::vector<double>& inc) {
  PotentialTrace t;
  t.dims = 2;
  double y = -1e6;
  t.append(std::vector<double>{0.0, y});
  for (double v : inc) {
    y += v;
    t.append(std::vector<double>{0.0, y});
  }
  return t;
}

PhaseRecord open_phase() {
  PhaseRecord p;
  p.kind = PhaseKind::F;
  p.start = 0;
  p.end = kOpen;
  p.stagnating_set = {2};
  return p;
}

}  // namespace

TEST_CASE("stopping times on the hand-traced fixture") {
  const auto t = rows_trace(1, 0, {{0, -50}, {0, -41}, {0, -19}, {0, -30}});
  const auto st = detect_stopping_times(t, cfg());
  CHECK(st.alpha == std::vector<long>{0});
  CHECK(st.beta == std::vector<long>{2});
  CHECK(st.sets == std::vector<std::vector<int>>{{2}});
}

TEST_CASE("no stagnation when every Psi stays above c0") {
  const auto t = rows_trace(1, 0, {{0, -10}, {0, -39}, {-5, 0}});
  const auto st = detect_stopping_times(t, cfg());
  CHECK(st.alpha.empty());
  CHECK(st.beta.empty());
}

TEST_CASE("a phase can start where the previous one ended") {
  const auto t = rows_trace(1, 0, {{0, 0, 0}, {0, -50, 0}, {0, -50, 0}, {0, -10, -45}, {0, -10, -45}});
  const auto st = detect_stopping_times(t, cfg());
  CHECK(st.alpha == std::vector<long>{1, 3});
  CHECK(st.beta == std::vector<long>{3, kOpen});
  CHECK(st.sets[1] == std::vector<int>{3});
}

TEST_CASE("the stagnating set is frozen at the phase start") {
  // dimension 3 drops below c0 after the start and later rises above cs: no effect
  const auto t = rows_trace(1, 0, {{0, 0, 0}, {0, -50, 0}, {0, -50, -45}, {0, -50, -10}, {0, -5, -10}});
  const auto st = detect_stopping_times(t, cfg());
  CHECK(st.alpha == std::vector<long>{1});
  CHECK(st.beta == std::vector<long>{4});
}

TEST_CASE("incremental detector equals the batch detector") {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> step(0.0, 6.0);
  for (int rep = 0; rep < 20; ++rep) {
    PotentialTrace t;
    t.dims = 4;
    t.delta_t = 10;
    std::vector<double> l2(4, 0.0);
    for (int k = 0; k < 300; ++k) {
      for (auto& v : l2) v += step(gen);
      t.append(l2);
    }
    const auto batch = detect_stopping_times(t, cfg(10, 1));
    StoppingTimeDetector det(cfg(10, 1));
    for (std::size_t r = 0; r < t.samples(); ++r) {
      std::vector<double> row(t.psi.begin() + static_cast<long>(r) * 4, t.psi.begin() + static_cast<long>(r + 1) * 4);
      det.push(t.sample_index(r), row);
    }
    CHECK(det.times().alpha == batch.alpha);
    CHECK(det.times().beta == batch.beta);
    // ordering invariants
    for (std::size_t i = 0; i < batch.alpha.size(); ++i) {
      if (batch.beta[i] != kOpen) CHECK(batch.alpha[i] < batch.beta[i]);
      if (i > 0) CHECK(batch.beta[i - 1] <= batch.alpha[i]);
      CHECK(batch.alpha[i] % 10 == 0);
    }
  }
}

TEST_CASE("partition with a single open phase") {
  StoppingTimes st;
  st.alpha = {300};
  st.beta = {kOpen};
  const auto p = partition_phases(st, 100000);
  CHECK(p.x_durations == std::vector<long>{300});
  CHECK(p.t_f == 300);
  REQUIRE(p.phases.size() == 2);
  CHECK(p.phases[1].kind == PhaseKind::F);
  CHECK(p.phases[1].start == 300);
}

TEST_CASE("partition without phases") {
  const auto p = partition_phases(StoppingTimes{}, 5000);
  REQUIRE(p.phases.size() == 1);
  CHECK(p.phases[0].kind == PhaseKind::X);
  CHECK(p.phases[0].end == kOpen);
  CHECK(p.t_f == kOpen);
  CHECK(p.x_durations.empty());
}

TEST_CASE("partition with a zero-length PH_X") {
  StoppingTimes st;
  st.alpha = {200, 500};
  st.beta = {500, kOpen};
  const auto p = partition_phases(st, 100000);
  CHECK(p.x_durations == std::vector<long>{200, 0});
  CHECK(p.y_durations == std::vector<long>{300});
  CHECK(p.t_f == 500);
  CHECK(phase_kind_name(PhaseKind::Y) == "PH_Y");
}

TEST_CASE("classification of synthetic phases") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> g(-0.05, 1.0);
  std::vector<double> inc(10000);
  for (auto& v : inc) v = g(gen);
  const auto c = classify_phase(walk_trace(inc), open_phase(), -0.01, 1e5, 0.1);
  CHECK(c.verdict == PhaseVerdict::Good);
  CHECK(c.mu_hat == doctest::Approx(-0.05).epsilon(0.6));
  CHECK(c.m6_hat == doctest::Approx(15.0).epsilon(0.2));
  CHECK(c.samples == 10000);

  const auto up = classify_phase(walk_trace(std::vector<double>(100, 0.1)), open_phase(), -0.01, 1e5, 0.1);
  CHECK(up.verdict == PhaseVerdict::NotGood);
  CHECK(up.mu_hat > 0);

  try {
    classify_phase(walk_trace(std::vector<double>(10, -1.0)), open_phase(), -0.01, 1e5, 0.1);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }

  PhaseRecord x;
  x.kind = PhaseKind::X;
  CHECK_THROWS_AS(classify_phase(walk_trace(inc), x, -0.01, 1e5, 0.1), Error);
}

TEST_CASE("stagnation config validation") {
  StagnationConfig c = cfg();
  CHECK_NOTHROW(c.validate(10));
  c.c0 = -10;  // above cs
  CHECK_THROWS_AS(c.validate(10), Error);
  c = cfg();
  c.n0 = 10;
  CHECK_THROWS_AS(c.validate(10), Error);
}
