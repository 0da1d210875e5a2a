#pragma once

// Seeded, randomized checks of the algebraic laws every module promises.
// Each law reports the worst deviation it saw over its cases.

#include <cstdint>
#include <string>
#include <vector>

#include "pmc/diagram.hpp"
#include "pmc/inference.hpp"

namespace pmc {

struct LawResult {
  std::string module;
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string firstFailure;

  bool passed() const { return failures == 0 && cases > 0; }
};

struct LawConfig {
  std::uint64_t seed = 20240601;
  std::size_t cases = 200;
  std::size_t maxSize = 4;
  std::size_t nfTerms = 500;
  int nfDepth = 6;
  InferenceOptions options{};
};

std::vector<LawResult> kernelLaws(const LawConfig& cfg);
std::vector<LawResult> inferenceLaws(const LawConfig& cfg);
std::vector<LawResult> maybeLaws(const LawConfig& cfg);
std::vector<LawResult> diagramLaws(const LawConfig& cfg);
std::vector<LawResult> normalFormLaws(const LawConfig& cfg);
/// Laws instantiated on the objects, kernels, states and diagrams of a model.
std::vector<LawResult> modelLaws(const Model& model, const LawConfig& cfg);

/// All module suites, plus the model suite when a model is given.
std::vector<LawResult> runLawSuite(const LawConfig& cfg, const Model* model = nullptr);

}  // namespace pmc
