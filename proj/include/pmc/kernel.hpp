#pragma once

// Finite objects and substochastic kernels: the concrete copy-discard
// category of subdistributions, with comparators.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pmc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Boundary objects of two morphisms do not match.
class CompositionError : public Error {
 public:
  using Error::Error;
};

/// Malformed weights, unknown labels, bad arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numeric failures: zero evidence, non-finite integrands.
class NumericError : public Error {
 public:
  using Error::Error;
};

class DivergenceUndefinedError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct Tolerances {
  double law_tol = 1e-9;
  double validation_slack = 1e-12;
  double zero_mass_tol = 1e-12;

  /// Throws ValidationError unless all are positive and zero_mass_tol <= law_tol.
  void validate() const;
};

inline constexpr double kDefaultSlack = 1e-12;

using Label = std::vector<std::string>;

/// A named atomic carrier set. Label order is the declaration order.
struct Atom {
  Atom(std::string name, std::vector<std::string> labels);

  std::string name;
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> index;

  bool operator==(const Atom& other) const {
    return name == other.name && labels == other.labels;
  }
};

/// A finite object: a (strict) tensor product of atoms. The unit I has no
/// atoms and a single empty label. Labels are enumerated in row-major order,
/// so the label of a tensor X*Y at index i*|Y|+j is label_X(i) ++ label_Y(j).
class FinObject {
 public:
  FinObject() = default;

  static FinObject unit() { return {}; }
  static FinObject atomic(std::string name, std::vector<std::string> labels);

  std::size_t size() const { return size_; }
  std::size_t factorCount() const { return atoms_.size(); }
  bool isUnit() const { return atoms_.empty(); }

  Label label(std::size_t index) const;
  /// "()" for the unit label, "a" for one factor, "(a,b)" otherwise.
  std::string labelString(std::size_t index) const;
  std::optional<std::size_t> find(const Label& label) const;
  std::optional<std::size_t> findString(std::string_view text) const;
  /// Like find, but throws ValidationError for unknown labels.
  std::size_t indexOf(const Label& label) const;

  /// "I", "Coin" or "Coin*Bit".
  std::string name() const;

  /// Splits after the first `k` factors. Throws ValidationError if k > factorCount().
  std::pair<FinObject, FinObject> split(std::size_t k) const;
  FinObject factor(std::size_t i) const;
  const std::vector<std::shared_ptr<const Atom>>& atoms() const { return atoms_; }

  friend FinObject tensor(const FinObject& a, const FinObject& b);
  bool operator==(const FinObject& other) const;

 private:
  std::vector<std::shared_ptr<const Atom>> atoms_;
  std::size_t size_ = 1;
};

FinObject tensor(const FinObject& a, const FinObject& b);

/// Weight table of a morphism dom -> cod in subStoch. Row `i` is the
/// subdistribution over cod given the i-th label of dom; the missing mass of
/// a row is its failure probability.
class SubKernel {
 public:
  /// Validates the weights: entries in [-slack, 0) are clamped to zero,
  /// row sums in (1, 1 + slack] are rescaled to exactly one. Anything
  /// beyond the slack throws ValidationError.
  SubKernel(FinObject dom, FinObject cod, std::vector<double> weights,
            double validation_slack = kDefaultSlack);

  static SubKernel zero(FinObject dom, FinObject cod);
  static SubKernel fromFunction(FinObject dom, FinObject cod,
                                const std::function<double(std::size_t, std::size_t)>& weight,
                                double validation_slack = kDefaultSlack);

  const FinObject& dom() const { return dom_; }
  const FinObject& cod() const { return cod_; }
  std::size_t rows() const { return dom_.size(); }
  std::size_t cols() const { return cod_.size(); }

  double operator()(std::size_t in, std::size_t out) const { return weights_[in * cols() + out]; }
  std::span<const double> row(std::size_t in) const {
    return {weights_.data() + in * cols(), cols()};
  }
  double rowSum(std::size_t in) const;
  double failure(std::size_t in) const;
  const std::vector<double>& weights() const { return weights_; }

  /// Value of a scalar kernel I -> I.
  double scalar() const;

 private:
  FinObject dom_;
  FinObject cod_;
  std::vector<double> weights_;
};

// Structural morphisms.
SubKernel identity(const FinObject& x);
SubKernel copy(const FinObject& x);
SubKernel discard(const FinObject& x);
SubKernel swap(const FinObject& x, const FinObject& y);
SubKernel compare(const FinObject& x);
/// The predicate X -> I that succeeds exactly on `label`.
SubKernel observe(const FinObject& x, const Label& label);
SubKernel observe(const FinObject& x, std::size_t index);
/// The deterministic state I -> X concentrated on `index`.
SubKernel point(const FinObject& x, std::size_t index);
SubKernel point(const FinObject& x, const Label& label);
SubKernel scalar(double value);
/// A deterministic kernel; `map` returns the output index, or nullopt to fail.
SubKernel deterministic(const FinObject& dom, const FinObject& cod,
                        const std::function<std::optional<std::size_t>(std::size_t)>& map);

// Composition and tensor.
SubKernel compose(const SubKernel& f, const SubKernel& g);
template <typename... Rest>
SubKernel compose(const SubKernel& f, const SubKernel& g, const Rest&... rest) {
  return compose(compose(f, g), rest...);
}
SubKernel tensor(const SubKernel& f, const SubKernel& g);

enum class Side { first = 1, second = 2 };

/// Marginal of f: X -> Y*Z where Y is the first `split` factors of the codomain.
SubKernel project(const SubKernel& f, std::size_t split, Side side);
/// copy(X) ; (id * f): X -> X*Y.
SubKernel graph(const SubKernel& f);
/// Conditional composition f: X -> A, g: X*A -> B giving X -> A*B with
/// weight f(a|x) g(b|x,a).
SubKernel condComp(const SubKernel& f, const SubKernel& g);

bool isTotal(const SubKernel& f, double tol = 1e-9);
bool isDeterministic(const SubKernel& f, double tol = 1e-9);
/// f ; discard: the per-input success probability.
SubKernel domainOfDefinition(const SubKernel& f);
bool hasDeterministicDomain(const SubKernel& f, double tol = 1e-9);

/// Entrywise max |f - g|. Throws CompositionError on differing boundaries.
double maxAbsDiff(const SubKernel& f, const SubKernel& g);
bool approxEqual(const SubKernel& f, const SubKernel& g, double tol);

/// Almost-sure equality: f: X -> A, g1, g2: A*X -> B are f-a.s. equal when
/// their conditional compositions with f agree.
bool asEqual(const SubKernel& f, const SubKernel& g1, const SubKernel& g2, double tol);

}  // namespace pmc
