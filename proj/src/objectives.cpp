#include "swarmlab/objectives.hpp"

#include <algorithm>
#include <string>

#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace {

constexpr long kMillion = 1000000;

void require_dimension(ObjectiveId id, int D) {
  if (D < 1) throw Error(ErrorKind::DimensionMismatch, "dimension must be >= 1");
  if (id == ObjectiveId::HighConditionedElliptic && D < 2) {
    throw Error(ErrorKind::DimensionMismatch, "hce needs D >= 2");
  }
}

// (10^6)^((d-1)/(D-1)) for d = 1..D, exact at both endpoints.
std::vector<BigReal> hce_weights(int D, long bits) {
  std::vector<BigReal> w;
  w.reserve(static_cast<std::size_t>(D));
  for (int d = 1; d <= D; ++d) {
    BigReal e(bits + 64);
    mpfr_set_ui(e.get(), 6UL * static_cast<unsigned long>(d - 1), MPFR_RNDN);
    mpfr_div_ui(e.get(), e.get(), static_cast<unsigned long>(D - 1), MPFR_RNDN);
    BigReal v(bits);
    mpfr_exp10(v.get(), e.get(), MPFR_RNDN);
    w.push_back(std::move(v));
  }
  return w;
}

long widest(std::span<const BigReal> x) {
  long bits = kMinPrecisionBits;
  for (const auto& v : x) bits = std::max(bits, v.precision());
  return bits;
}

}  // namespace

ObjectiveId parse_objective(std::string_view name) {
  if (name == "sphere") return ObjectiveId::Sphere;
  if (name == "hce") return ObjectiveId::HighConditionedElliptic;
  if (name == "schwefel") return ObjectiveId::Schwefel;
  if (name == "diagonal") return ObjectiveId::Diagonal;
  throw Error(ErrorKind::ConfigError, "unknown objective '" + std::string(name) + "'");
}

std::string_view objective_name(ObjectiveId id) {
  switch (id) {
    case ObjectiveId::Sphere: return "sphere";
    case ObjectiveId::HighConditionedElliptic: return "hce";
    case ObjectiveId::Schwefel: return "schwefel";
    case ObjectiveId::Diagonal: return "diagonal";
  }
  return "?";
}

bool is_composite(ObjectiveId id) {
  return id == ObjectiveId::Sphere || id == ObjectiveId::HighConditionedElliptic;
}

// ---- QuadraticForm

QuadraticForm::QuadraticForm(int dimension, long precision_bits) : dim_(dimension) {
  if (dimension < 1) throw Error(ErrorKind::DimensionMismatch, "quadratic form needs D >= 1");
  entries_.assign(static_cast<std::size_t>(dimension) * static_cast<std::size_t>(dimension),
                  BigReal(precision_bits));
}

std::size_t QuadraticForm::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_) {
    throw Error(ErrorKind::IndexOutOfRange, "matrix index out of range");
  }
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(j);
}

BigReal QuadraticForm::apply(std::span<const BigReal> x, const PrecisionPolicy& policy) const {
  if (static_cast<int>(x.size()) != dim_) throw Error(ErrorKind::DimensionMismatch, "vector length");
  BigReal acc;
  for (int i = 0; i < dim_; ++i) {
    BigReal row;
    for (int j = 0; j < dim_; ++j) row = add(row, mul(at(i, j), x[j]), policy);
    acc = add(acc, mul(x[i], row), policy);
  }
  return acc;
}

bool QuadraticForm::operator==(const QuadraticForm& other) const {
  return dim_ == other.dim_ && std::equal(entries_.begin(), entries_.end(), other.entries_.begin());
}

QuadraticForm matrix_form(ObjectiveId id, int D, long precision_bits) {
  require_dimension(id, D);
  QuadraticForm a(D, precision_bits);
  std::vector<BigReal> w;
  if (id == ObjectiveId::HighConditionedElliptic) w = hce_weights(D, precision_bits);
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) {
      long v = 0;
      switch (id) {
        case ObjectiveId::Sphere: v = (i == j); break;
        case ObjectiveId::HighConditionedElliptic: break;
        case ObjectiveId::Schwefel: v = D - std::max(i, j); break;  // D + 1 - max(i,j), 1-based
        case ObjectiveId::Diagonal: v = kMillion + (i == j); break;
      }
      if (id == ObjectiveId::HighConditionedElliptic) {
        a.at(i, j) = i == j ? w[static_cast<std::size_t>(i)] : BigReal(precision_bits);
      } else {
        a.at(i, j) = BigReal::from_int(v, precision_bits);
      }
    }
  }
  return a;
}

QuadraticForm reduced_matrix(const QuadraticForm& form, const std::vector<int>& stagnating) {
  const int D = form.dimension();
  std::vector<bool> drop(static_cast<std::size_t>(D), false);
  for (int d : stagnating) {
    if (d < 1 || d > D) throw Error(ErrorKind::IndexOutOfRange, "stagnating dimension out of range");
    drop[static_cast<std::size_t>(d - 1)] = true;
  }
  std::vector<int> keep;
  for (int i = 0; i < D; ++i) {
    if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  if (keep.empty()) throw Error(ErrorKind::EmptyRemainder, "every dimension is stagnating");
  const int k = static_cast<int>(keep.size());
  QuadraticForm out(k, form.at(0, 0).precision());
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) out.at(i, j) = form.at(keep[i], keep[j]);
  }
  return out;
}

// ---- Objective

Objective::Objective(ObjectiveId id, int D, long precision_bits)
    : id_(id), dim_(D), million_(BigReal::from_int(kMillion, 64)) {
  require_dimension(id, D);
  if (id == ObjectiveId::HighConditionedElliptic) weight_ = hce_weights(D, precision_bits);
  diag_.reserve(static_cast<std::size_t>(D));
  for (int d = 0; d < D; ++d) {
    switch (id) {
      case ObjectiveId::Sphere: diag_.push_back(BigReal::from_int(1, precision_bits)); break;
      case ObjectiveId::HighConditionedElliptic: diag_.push_back(weight_[static_cast<std::size_t>(d)]); break;
      case ObjectiveId::Schwefel: diag_.push_back(BigReal::from_int(D - d, precision_bits)); break;
      case ObjectiveId::Diagonal: diag_.push_back(BigReal::from_int(kMillion + 1, precision_bits)); break;
    }
  }
}

BigReal Objective::evaluate(std::span<const BigReal> x, const PrecisionPolicy& policy) const {
  BigReal out;
  std::vector<BigReal> scratch;
  evaluate_into(out, x, policy, scratch);
  return out;
}

// Products are exact. Near a non-zero optimum a rounded square of an O(100)
// coordinate is larger than the f differences the swarm has to compare.
void Objective::evaluate_into(BigReal& out, std::span<const BigReal> x, const PrecisionPolicy& policy,
                              std::vector<BigReal>& scratch) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(dim_) + " coordinates, got " + std::to_string(x.size()));
  }
  if (scratch.size() < 2) scratch.resize(2);
  BigReal& term = scratch[0];
  BigReal& run = scratch[1];
  out.assign_zero(kMinPrecisionBits);
  switch (id_) {
    case ObjectiveId::Sphere:
      for (const auto& xi : x) {
        sqr_exact_into(term, xi);
        add_into(out, out, term, policy);
      }
      break;
    case ObjectiveId::HighConditionedElliptic:
      for (int i = 0; i < dim_; ++i) {
        sqr_exact_into(term, x[i]);
        mul_exact_into(term, term, weight_[static_cast<std::size_t>(i)]);
        add_into(out, out, term, policy);
      }
      break;
    case ObjectiveId::Schwefel:
      run.assign_zero(kMinPrecisionBits);
      for (const auto& xi : x) {
        add_into(run, run, xi, policy);
        sqr_exact_into(term, run);
        add_into(out, out, term, policy);
      }
      break;
    case ObjectiveId::Diagonal:
      run.assign_zero(kMinPrecisionBits);
      for (const auto& xi : x) {
        add_into(run, run, xi, policy);
        sqr_exact_into(term, xi);
        add_into(out, out, term, policy);
      }
      sqr_exact_into(term, run);
      mul_exact_into(term, term, million_);
      add_into(out, out, term, policy);
      break;
  }
}

void Objective::half_gradient(std::span<const BigReal> x, std::vector<BigReal>& out,
                              const PrecisionPolicy& policy) const {
  if (static_cast<int>(x.size()) != dim_) throw Error(ErrorKind::DimensionMismatch, "vector length");
  out.resize(static_cast<std::size_t>(dim_));
  switch (id_) {
    case ObjectiveId::Sphere:
      for (int d = 0; d < dim_; ++d) out[d] = x[d];
      break;
    case ObjectiveId::HighConditionedElliptic:
      for (int d = 0; d < dim_; ++d) mul_exact_into(out[d], x[d], weight_[static_cast<std::size_t>(d)]);
      break;
    case ObjectiveId::Schwefel: {
      // out[d] = sum_{i >= d} P_i with P_i = x_0 + ... + x_i
      BigReal prefix;
      for (int d = 0; d < dim_; ++d) {
        add_into(prefix, prefix, x[d], policy);
        out[d] = prefix;
      }
      BigReal suffix;
      for (int d = dim_ - 1; d >= 0; --d) {
        add_into(suffix, suffix, out[d], policy);
        out[d] = suffix;
      }
      break;
    }
    case ObjectiveId::Diagonal: {
      BigReal sum;
      for (int d = 0; d < dim_; ++d) add_into(sum, sum, x[d], policy);
      mul_exact_into(sum, sum, million_);
      for (int d = 0; d < dim_; ++d) add_into(out[d], x[d], sum, policy);
      break;
    }
  }
}

BigReal evaluate(ObjectiveId id, std::span<const BigReal> x, const PrecisionPolicy& policy) {
  Objective obj(id, static_cast<int>(x.size()), std::max(widest(x), policy.initial_bits));
  return obj.evaluate(x, policy);
}

}  // namespace swarmlab
