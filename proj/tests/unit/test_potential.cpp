#include <cmath>
#include <random>

#include "doctest.h"
#include "swarmlab/errors.hpp"
#include "swarmlab/potential.hpp"

using namespace swarmlab;

namespace {

SwarmState one_dim(std::vector<std::pair<double, double>> xv) {
  SwarmState s;
  for (auto [x, v] : xv) {
    s.X.push_back({BigReal(x, 512)});
    s.V.push_back({BigReal(v, 512)});
  }
  s.L = s.X;
  s.G = s.X[0];
  return s;
}

std::vector<BigReal> big(std::initializer_list<double> v) {
  std::vector<BigReal> out;
  for (double x : v) out.emplace_back(x, 512);
  return out;
}

}  // namespace

TEST_CASE("phi on hand-computed states") {
  const Objective sph(ObjectiveId::Sphere, 1);
  CHECK(phi(one_dim({{3, 4}}), sph)[0].to_double() == 40.0);
  CHECK(phi(one_dim({{1, 1}, {2, -1}}), sph)[0].to_double() == 3.0);
}

TEST_CASE("zero velocity gives ZeroPotential for every dimension") {
  SwarmState s;
  s.X = {big({1, 2, 3})};
  s.V = {big({0, 0, 0})};
  s.L = s.X;
  s.G = s.X[0];
  try {
    phi(s, ObjectiveId::Sphere);
    FAIL("expected ZeroPotential");
  } catch (const ZeroPotentialError& e) {
    CHECK(e.kind() == ErrorKind::ZeroPotential);
    CHECK(e.dims() == std::vector<int>{1, 2, 3});
  }
  std::vector<BigReal> out;
  std::vector<int> zero;
  const Objective sph(ObjectiveId::Sphere, 3);
  CHECK_FALSE(try_phi(s, sph, {}, out, zero));
  CHECK(zero.size() == 3);
}

TEST_CASE("delta formula equals evaluate-and-subtract") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(-50, 50);
  std::uniform_int_distribution<int> sc(0, 3000);
  PrecisionPolicy pol;
  for (ObjectiveId id : {ObjectiveId::Sphere, ObjectiveId::HighConditionedElliptic, ObjectiveId::Schwefel,
                         ObjectiveId::Diagonal}) {
    const int D = 5;
    const Objective f(id, D);
    for (int k = 0; k < 20; ++k) {
      SwarmState s;
      for (int n = 0; n < 3; ++n) {
        std::vector<BigReal> x, v;
        for (int d = 0; d < D; ++d) {
          x.push_back(ldexp(BigReal(u(gen), 512), -sc(gen)));
          v.push_back(ldexp(BigReal(u(gen), 512), -sc(gen)));
        }
        s.X.push_back(x);
        s.V.push_back(v);
      }
      s.L = s.X;
      s.G = s.X[0];
      const auto fast = phi(s, f, pol);
      const auto ref = phi_by_evaluation(s, f, pol);
      for (int d = 0; d < D; ++d) {
        const double rel = std::abs(div(sub(fast[d], ref[d], pol), ref[d]).to_double());
        CHECK(rel <= std::ldexp(1.0, -400));
      }
    }
  }
}

TEST_CASE("psi examples") {
  CHECK(psi(big({8, 2})) == std::vector<double>{0, -2});
  CHECK(psi(big({5, 5, 5})) == std::vector<double>{0, 0, 0});
  std::vector<BigReal> deep{ldexp(BigReal(1.0, 512), -100), ldexp(BigReal(1.0, 512), -140)};
  CHECK(psi(deep) == std::vector<double>{0, -40});
  CHECK_THROWS_AS(psi(big({1, 0})), Error);
}

TEST_CASE("psi is non-positive with a zero maximum") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-3000, 3000);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> l2(7);
    for (auto& v : l2) v = u(gen);
    const auto p = psi_from_log2(l2);
    double mx = -1e300;
    for (double v : p) {
      CHECK(v <= 0.0);
      mx = std::max(mx, v);
    }
    CHECK(mx == 0.0);
  }
}

TEST_CASE("build_trace lengths and increments") {
  auto sample = [](double a, double b) { return big({a, b}); };
  const auto t1 = build_trace({sample(1, 1), sample(1, 2), sample(4, 1)}, 1);
  CHECK(t1.samples() == 3);
  CHECK(t1.increments() == 2);

  std::vector<std::vector<BigReal>> five;
  for (int k = 1; k <= 5; ++k) five.push_back(sample(k, 1));
  PotentialTrace t100 = build_trace(five, 100);
  CHECK(t100.samples() == 5);
  CHECK(t100.increments() == 4);

  // Psi rows (0,-1) then (0,-3)
  const auto t2 = build_trace({sample(2, 1), sample(8, 1)}, 1);
  CHECK(t2.increment(0, 1) == -2.0);
}

TEST_CASE("leading zero samples are skipped, later zeros throw") {
  const auto t = build_trace({big({0, 1}), big({2, 1}), big({4, 2})}, 10);
  CHECK(t.first_index == 1);
  CHECK(t.time_of(0) == 10);
  CHECK(t.row_of_index(2) == 1);
  CHECK(t.row_of_index(0) == -1);
  CHECK_THROWS_AS(build_trace({big({1, 1}), big({0, 1})}, 1), ZeroPotentialError);
}

TEST_CASE("increments telescope") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-5, 1);
  PotentialTrace t;
  t.dims = 3;
  std::vector<double> row(3, 0.0);
  for (int k = 0; k < 500; ++k) {
    for (auto& v : row) v += u(gen);
    t.append(row);
  }
  for (int d = 0; d < 3; ++d) {
    double s = 0;
    for (std::size_t r = 0; r < t.increments(); ++r) s += t.increment(r, d);
    CHECK(s == doctest::Approx(t.psi_at(t.samples() - 1, d) - t.psi_at(0, d)).epsilon(1e-9));
  }
}

TEST_CASE("recorder follows a live run") {
  Swarm s(SwarmParams::standard(3, 4), ObjectiveId::Sphere);
  RngStream r(6);
  auto st = s.init_usual(100.0, r, VelocityInit::Uniform);
  TraceRecorder rec(s.objective(), s.policy(), 10, true);
  s.run(st, r, 200, 10, std::ref(rec));
  const auto& tr = rec.trace();
  CHECK(tr.samples() == 21);
  CHECK(tr.first_index == 0);
  CHECK(tr.phi.size() == tr.samples());
  CHECK(rec.diagnostics().zero_after_start == 0);
  for (std::size_t k = 0; k < tr.samples(); ++k) {
    const auto p = psi(tr.phi[k]);
    for (int d = 0; d < 4; ++d) CHECK(p[d] == doctest::Approx(tr.psi_at(k, d)));
  }
}
