#include <cmath>
#include <random>

#include "doctest.h"
#include "swarmlab/errors.hpp"
#include "swarmlab/objectives.hpp"

using namespace swarmlab;

namespace {

std::vector<BigReal> vec(std::initializer_list<double> v, long bits = 512) {
  std::vector<BigReal> out;
  for (double x : v) out.emplace_back(x, bits);
  return out;
}

double f_of(ObjectiveId id, std::initializer_list<double> v) { return evaluate(id, vec(v)).to_double(); }

// independent double-precision oracle of x^T A x from the textbook formulas
double textbook(ObjectiveId id, const std::vector<double>& x) {
  const std::size_t D = x.size();
  double s = 0;
  switch (id) {
    case ObjectiveId::Sphere:
      for (double v : x) s += v * v;
      return s;
    case ObjectiveId::HighConditionedElliptic:
      for (std::size_t i = 0; i < D; ++i) {
        const double w = D == 1 ? 1.0 : std::pow(1e6, double(i) / double(D - 1));
        s += w * x[i] * x[i];
      }
      return s;
    case ObjectiveId::Schwefel: {
      double prefix = 0;
      for (double v : x) {
        prefix += v;
        s += prefix * prefix;
      }
      return s;
    }
    case ObjectiveId::Diagonal: {
      double sum = 0;
      for (double v : x) {
        s += v * v;
        sum += v;
      }
      return s + 1e6 * sum * sum;
    }
  }
  return 0;
}

}  // namespace

TEST_CASE("objective values") {
  CHECK(f_of(ObjectiveId::Sphere, {1, 2, 3}) == 14.0);
  CHECK(f_of(ObjectiveId::Schwefel, {1, 1}) == 5.0);
  CHECK(f_of(ObjectiveId::Diagonal, {1, -1}) == 2.0);
  CHECK(f_of(ObjectiveId::HighConditionedElliptic, {1, 1}) == 1.0 + 1e6);
}

TEST_CASE("matrix forms") {
  const auto s = matrix_form(ObjectiveId::Schwefel, 2);
  CHECK(s.at(0, 0).to_double() == 2);
  CHECK(s.at(0, 1).to_double() == 1);
  CHECK(s.at(1, 0).to_double() == 1);
  CHECK(s.at(1, 1).to_double() == 1);

  const auto sph = matrix_form(ObjectiveId::Sphere, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(sph.at(i, j).to_double() == (i == j ? 1.0 : 0.0));

  const auto dia = matrix_form(ObjectiveId::Diagonal, 2);
  CHECK(dia.at(0, 0).to_double() == 1e6 + 1);
  CHECK(dia.at(0, 1).to_double() == 1e6);
  CHECK(dia.at(1, 1).to_double() == 1e6 + 1);
}

TEST_CASE("reduced Schwefel matrices") {
  const auto full = matrix_form(ObjectiveId::Schwefel, 10);
  std::vector<int> head;
  for (int d = 1; d <= 8; ++d) head.push_back(d);
  CHECK(reduced_matrix(full, head) == matrix_form(ObjectiveId::Schwefel, 2));

  std::vector<int> tail;
  for (int d = 3; d <= 10; ++d) tail.push_back(d);
  const auto r = reduced_matrix(full, tail);
  REQUIRE(r.dimension() == 2);
  CHECK(r.at(0, 0).to_double() == 10);
  CHECK(r.at(0, 1).to_double() == 9);
  CHECK(r.at(1, 1).to_double() == 9);

  CHECK(reduced_matrix(full, {}) == full);

  std::vector<int> all;
  for (int d = 1; d <= 10; ++d) all.push_back(d);
  try {
    reduced_matrix(full, all);
    FAIL("expected EmptyRemainder");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyRemainder);
  }
}

TEST_CASE("composite objectives") {
  CHECK(is_composite(ObjectiveId::Sphere));
  CHECK(is_composite(ObjectiveId::HighConditionedElliptic));
  CHECK_FALSE(is_composite(ObjectiveId::Schwefel));
  CHECK_FALSE(is_composite(ObjectiveId::Diagonal));
  // additive separability fails for the diagonal function
  CHECK(f_of(ObjectiveId::Diagonal, {1, 1}) + f_of(ObjectiveId::Diagonal, {0, 0}) !=
        f_of(ObjectiveId::Diagonal, {1, 0}) + f_of(ObjectiveId::Diagonal, {0, 1}));
}

TEST_CASE("evaluate agrees with the matrix and with a textbook oracle") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-100, 100);
  for (ObjectiveId id : {ObjectiveId::Sphere, ObjectiveId::HighConditionedElliptic, ObjectiveId::Schwefel,
                         ObjectiveId::Diagonal}) {
    for (int D : {2, 3, 10}) {
      const auto A = matrix_form(id, D);
      const Objective obj(id, D);
      for (int k = 0; k < 100; ++k) {
        std::vector<double> xd(static_cast<std::size_t>(D));
        std::vector<BigReal> x;
        for (auto& v : xd) {
          v = u(gen);
          x.emplace_back(v, 512);
        }
        const BigReal direct = evaluate(id, x);
        const BigReal quad = A.apply(x);
        const double rel = std::abs(sub(direct, quad, {}).to_double()) / direct.to_double();
        CHECK(rel <= std::ldexp(1.0, -512 + 16));
        CHECK(obj.evaluate(x) == direct);
        CHECK(direct.to_double() == doctest::Approx(textbook(id, xd)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("half gradient is A x") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-5, 5);
  for (ObjectiveId id : {ObjectiveId::Sphere, ObjectiveId::HighConditionedElliptic, ObjectiveId::Schwefel,
                         ObjectiveId::Diagonal}) {
    const int D = 6;
    const auto A = matrix_form(id, D);
    const Objective obj(id, D);
    std::vector<BigReal> x;
    for (int d = 0; d < D; ++d) x.emplace_back(u(gen), 512);
    std::vector<BigReal> g;
    obj.half_gradient(x, g, {});
    REQUIRE(g.size() == static_cast<std::size_t>(D));
    for (int i = 0; i < D; ++i) {
      BigReal s(512);
      for (int j = 0; j < D; ++j) s = add(s, mul(A.at(i, j), x[j]), {});
      CHECK(std::abs(sub(g[i], s, {}).to_double()) <= 1e-100);
      CHECK(obj.diagonal(i) == A.at(i, i));
    }
  }
}

TEST_CASE("objective names") {
  CHECK(parse_objective("hce") == ObjectiveId::HighConditionedElliptic);
  CHECK(objective_name(ObjectiveId::Schwefel) == "schwefel");
  CHECK_THROWS_AS(parse_objective("rosenbrock"), Error);
}

TEST_CASE("comparisons near a non-zero optimum match a widened reference") {
  // The free coordinate sits next to the optimum fixed by the others, so f is
  // O(1e10) while the compared differences are ~2^-560.
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-100, 100);
  std::uniform_int_distribution<int> k(-20, 20);
  PrecisionPolicy pol;
  for (ObjectiveId id : {ObjectiveId::Diagonal, ObjectiveId::Schwefel, ObjectiveId::Sphere}) {
    const Objective f(id, 3);
    int agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const BigReal y1(u(gen), 512), y2(u(gen), 512);
      BigReal z(512);
      if (id == ObjectiveId::Diagonal) {
        z = div(mul(neg(add(y1, y2, pol)), BigReal(1e6, 512)), BigReal(1e6 + 1, 512));
      } else if (id == ObjectiveId::Schwefel) {
        z = neg(add(y1, y2, pol));  // zeroes the last prefix sum
      } else {
        z = BigReal(u(gen), 512);
      }
      const BigReal h = ldexp(BigReal(1.0, 512), -300);
      const std::vector<BigReal> a{y1, y2, add(z, mul(BigReal(k(gen), 512), h), pol)};
      const std::vector<BigReal> b{y1, y2, add(z, mul(BigReal(k(gen), 512), h), pol)};
      std::vector<BigReal> wa, wb;
      for (const auto& v : a) { wa.push_back(v); wa.back().grow_precision(20000); }
      for (const auto& v : b) { wb.push_back(v); wb.back().grow_precision(20000); }
      const bool fast = f.evaluate(a, pol) < f.evaluate(b, pol);
      const bool ref = f.evaluate(wa, pol) < f.evaluate(wb, pol);
      agree += fast == ref;
    }
    CHECK(agree == 100);
  }
}
