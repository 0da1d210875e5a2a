#pragma once

// Conditionals, Bayesian inversion, normalisation and belief updates over
// substochastic kernels.

#include "pmc/kernel.hpp"

namespace pmc {

/// How a conditioning operation fills rows whose conditioning event has
/// (numerically) zero mass. These rows are only fixed up to almost-sure
/// equality, so any choice is a valid representative.
enum class ConditioningConvention { uniform_fill, zero_fill };

struct InferenceOptions {
  ConditioningConvention convention = ConditioningConvention::uniform_fill;
  Tolerances tol{};
};

/// Conditional of f: X -> Y*Z, where Y is the first `split` codomain factors.
/// Returns c: X*Y -> Z with c(z|x,y) = f(y,z|x) / sum_z' f(y,z'|x).
SubKernel conditional(const SubKernel& f, std::size_t split, const InferenceOptions& opts = {});

/// Bayesian inversion of g: X -> Y with respect to p: A -> X, computed as the
/// conditional of p ; copy ; (g * id). For a state p (A = I) the result is
/// Y -> X; in general it is the parametrised inversion A*Y -> X.
SubKernel bayesInvert(const SubKernel& g, const SubKernel& p, const InferenceOptions& opts = {});

/// Rowwise division by the success mass.
SubKernel normalize(const SubKernel& f, const InferenceOptions& opts = {});

/// Pearl's update p ◁ (f ; q). With `renorm` the resulting substate is
/// normalised; otherwise the raw reweighted prior is returned.
SubKernel pearlUpdate(const SubKernel& p, const SubKernel& f, const SubKernel& q, bool renorm,
                      const InferenceOptions& opts = {});

/// Jeffrey's update t ; f†(p).
SubKernel jeffreyUpdate(const SubKernel& p, const SubKernel& f, const SubKernel& t,
                        const InferenceOptions& opts = {});

/// Probability (p ; f ; q) of the predicate q under the prediction p ; f.
double validity(const SubKernel& p, const SubKernel& f, const SubKernel& q);

/// Kullback-Leibler divergence in nats. Both states must be total and the
/// support of s must be inside the support of t.
double klDivergence(const SubKernel& s, const SubKernel& t, const Tolerances& tol = {});

}  // namespace pmc
