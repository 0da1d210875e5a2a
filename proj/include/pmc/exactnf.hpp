#pragma once

// Normal forms for processes with exact observations. Every such process
// X -> Y is represented as (h ; z°) ◁ g: an evidence channel h: X -> W, an
// observed point z of W, and a result channel g: X -> Y, with h and g total.
// Its denotation is f(y|x) = h(z|x) g(y|x).

#include <vector>

#include "pmc/diagram.hpp"
#include "pmc/inference.hpp"
#include "pmc/maybecat.hpp"

namespace pmc {

class NonTotalGeneratorError : public Error {
 public:
  using Error::Error;
};

struct NormalForm {
  TotalKernel h;
  std::size_t z;
  TotalKernel g;

  const FinObject& dom() const { return g.dom(); }
  const FinObject& cod() const { return g.cod(); }
  const FinObject& evidence() const { return h.cod(); }
};

NormalForm nfOfTotal(const SubKernel& f);
NormalForm nfOfObserve(const FinObject& x, const Label& label);
NormalForm nfTensor(const NormalForm& a, const NormalForm& b);
/// Composite of a: X -> Y and b: Y -> Z. The new result channel is, per
/// input x, the inversion of b.h with respect to a.g(.|x) evaluated at b.z
/// and pushed through b.g.
NormalForm nfCompose(const NormalForm& a, const NormalForm& b, const Tolerances& tol = {});

/// Folds a term of the Markov-plus-observation fragment. Throws
/// NonTotalGeneratorError for generators (or comparators) that are not total.
NormalForm nfFromTerm(const TermPtr& t, const Model& model, const Tolerances& tol = {});

/// Success probability h(z|x) per input.
std::vector<double> successMass(const NormalForm& nf);
SubKernel nfDenote(const NormalForm& nf);
/// The result channel g, a normalisation of the denotation on inputs with
/// positive success mass.
TotalKernel nfNormalization(const NormalForm& nf);

}  // namespace pmc
