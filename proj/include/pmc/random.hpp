#pragma once

// Seeded generators for objects, kernels and diagram terms, used by the law
// suites and the tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pmc/diagram.hpp"
#include "pmc/kernel.hpp"

namespace pmc {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1), built from the top 53 bits so results do not depend
  /// on the standard library's distribution implementations.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [0, n).
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  bool chance(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

enum class KernelShape {
  total,
  /// Mix of total rows, all-fail rows and rows with arbitrary mass.
  substochastic,
  deterministic,
  /// Rows are either total or all-fail.
  deterministic_domain,
};

/// Atomic object with 1..maxSize labels named `name`_0, `name`_1, ...
FinObject randomAtom(Rng& rng, std::size_t maxSize, const std::string& name);
/// An atom, or occasionally the unit, drawn from `pool`.
FinObject pick(Rng& rng, const std::vector<FinObject>& pool);

SubKernel randomKernel(Rng& rng, const FinObject& dom, const FinObject& cod, KernelShape shape);
SubKernel randomState(Rng& rng, const FinObject& cod, KernelShape shape);

/// Builds random well-typed terms in the Markov-plus-observation fragment,
/// registering fresh total generators in `model` as it goes.
class RandomTermGenerator {
 public:
  RandomTermGenerator(Rng& rng, Model& model, std::vector<FinObject> atoms,
                      std::size_t maxLabels = 64);

  /// A term with domain `dom` of depth at most `depth`.
  TermPtr generate(const FinObject& dom, int depth);

 private:
  TermPtr leaf(const FinObject& dom);
  FinObject smallCodomain();
  TermPtr freshGenerator(const FinObject& dom, const FinObject& cod);
  Signature sig(const TermPtr& t) const { return typecheck(t, model_); }

  Rng& rng_;
  Model& model_;
  std::vector<FinObject> atoms_;
  std::size_t maxLabels_;
  std::size_t counter_ = 0;
};

}  // namespace pmc
