#pragma once

// Finite Stoch and the maybe monad (- + 1) over it. Substochastic kernels
// X -> Y are the same data as total kernels X -> Y + 1; this module works on
// the total side and recovers conditionals of subStoch from conditionals of
// Stoch.

#include <optional>
#include <string_view>

#include "pmc/inference.hpp"
#include "pmc/kernel.hpp"

namespace pmc {

/// A row-stochastic kernel.
class TotalKernel {
 public:
  /// Throws ValidationError unless every row sums to one within `slack`;
  /// rows inside the slack are rescaled to sum to exactly one.
  explicit TotalKernel(const SubKernel& kernel, double slack = kDefaultSlack);

  const SubKernel& kernel() const { return kernel_; }
  const FinObject& dom() const { return kernel_.dom(); }
  const FinObject& cod() const { return kernel_.cod(); }
  double operator()(std::size_t in, std::size_t out) const { return kernel_(in, out); }

 private:
  SubKernel kernel_;
};

/// X + 1: an atomic object whose labels are the labels of X followed by ⊥.
class PointedObject {
 public:
  static constexpr std::string_view kBottom = "⊥";

  explicit PointedObject(FinObject base);

  const FinObject& base() const { return base_; }
  const FinObject& object() const { return object_; }
  std::size_t bottom() const { return base_.size(); }

 private:
  FinObject base_;
  FinObject object_;
};

/// Failure mass goes to ⊥.
TotalKernel toTotal(const SubKernel& f);
/// Drops the ⊥ column of g: X -> Y + 1.
SubKernel fromTotal(const TotalKernel& g, const PointedObject& y);

/// Functorial image of f: X -> Y under the maybe monad, X+1 -> Y+1, with ⊥ ↦ ⊥.
TotalKernel kleisliLift(const SubKernel& f);

/// l: (X+1)*(Y+1) -> (X*Y)+1; any pair containing ⊥ goes to ⊥.
TotalKernel laxator(const FinObject& x, const FinObject& y);
/// s = copy ; (F(π1) * F(π2)): (X*Y)+1 -> (X+1)*(Y+1).
TotalKernel oplaxator(const FinObject& x, const FinObject& y);

/// d_X(σ) = σ extended by zero on ⊥; d_X(⊥) = δ_⊥. `sigma` must be a total state on X.
TotalKernel distributiveLaw(const FinObject& x, const std::optional<SubKernel>& sigma);

/// g: X*Y -> Z, with X the first `split` domain factors, lifted to
/// g*: X*(Y+1) -> Z whose ⊥ rows fail with certainty.
SubKernel strongKleisliExtend(const SubKernel& g, std::size_t split);

/// Restriction of g: X*(Y+1) -> Z to the non-⊥ inputs, X*Y -> Z.
SubKernel splitConditional(const SubKernel& g, const FinObject& x, const PointedObject& y);

/// Conditional in finite Stoch, by row normalisation with uniform fill on
/// zero-mass rows. f: X -> Y*Z, Y the first `split` factors; returns X*Y -> Z.
TotalKernel stochConditional(const TotalKernel& f, std::size_t split, const Tolerances& tol = {});

/// Conditional of f: X -> Y*Z computed only through Stoch: postcompose the
/// oplaxator, take the Stoch conditional, restrict away the ⊥ inputs and drop
/// the ⊥ output.
SubKernel conditionalViaBase(const SubKernel& f, std::size_t split, const Tolerances& tol = {});

}  // namespace pmc
