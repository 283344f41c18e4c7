#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "swarmlab/big_real.hpp"

namespace swarmlab {

enum class ObjectiveId { Sphere, HighConditionedElliptic, Schwefel, Diagonal };

/// Config names: "sphere", "hce", "schwefel", "diagonal".
ObjectiveId parse_objective(std::string_view name);
std::string_view objective_name(ObjectiveId id);

/// True when f(x) = g(sum_i f_i(x_i)) with g strictly increasing.
bool is_composite(ObjectiveId id);

/// Dense symmetric D x D matrix; indices are 0-based here.
class QuadraticForm {
 public:
  QuadraticForm(int dimension, long precision_bits);

  int dimension() const { return dim_; }
  const BigReal& at(int i, int j) const { return entries_[index(i, j)]; }
  BigReal& at(int i, int j) { return entries_[index(i, j)]; }

  /// x^T A x with adaptive-precision accumulation.
  BigReal apply(std::span<const BigReal> x, const PrecisionPolicy& policy = {}) const;

  bool operator==(const QuadraticForm& other) const;

 private:
  std::size_t index(int i, int j) const;

  int dim_;
  std::vector<BigReal> entries_;
};

QuadraticForm matrix_form(ObjectiveId id, int D, long precision_bits = 512);

/// Principal submatrix on the indices not in `stagnating` (1-based dimension numbers).
QuadraticForm reduced_matrix(const QuadraticForm& form, const std::vector<int>& stagnating);

/// Objective with its per-dimension constants materialized once.
class Objective {
 public:
  Objective(ObjectiveId id, int D, long precision_bits = 512);

  ObjectiveId id() const { return id_; }
  int dimension() const { return dim_; }

  BigReal evaluate(std::span<const BigReal> x, const PrecisionPolicy& policy = {}) const;
  /// Same value as evaluate(); reuses `scratch` between calls.
  void evaluate_into(BigReal& out, std::span<const BigReal> x, const PrecisionPolicy& policy,
                     std::vector<BigReal>& scratch) const;

  /// (A x)_d for every d, where f(x) = x^T A x.
  void half_gradient(std::span<const BigReal> x, std::vector<BigReal>& out,
                     const PrecisionPolicy& policy) const;
  /// A_dd (0-based d).
  const BigReal& diagonal(int d) const { return diag_[static_cast<std::size_t>(d)]; }

 private:
  ObjectiveId id_;
  int dim_;
  std::vector<BigReal> weight_;  // hce weights
  std::vector<BigReal> diag_;
  BigReal million_;
};

/// Direct evaluation per the objective definitions.
BigReal evaluate(ObjectiveId id, std::span<const BigReal> x, const PrecisionPolicy& policy = {});

}  // namespace swarmlab
