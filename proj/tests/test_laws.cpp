#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "pmc/laws.hpp"

using namespace pmc;

namespace {

LawConfig small() {
  LawConfig cfg;
  cfg.cases = 40;
  cfg.nfTerms = 60;
  return cfg;
}

}  // namespace

TEST_CASE("every law holds on a small sample") {
  for (const auto& r : runLawSuite(small())) {
    INFO(r.module << "." << r.name << ": " << r.firstFailure);
    CHECK(r.passed());
  }
}

TEST_CASE("law runs are reproducible and seed-dependent") {
  const auto a = inferenceLaws(small());
  const auto b = inferenceLaws(small());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].worst == b[i].worst);
    CHECK(a[i].cases == b[i].cases);
  }
  LawConfig other = small();
  other.seed += 1;
  const auto c = inferenceLaws(other);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].worst != c[i].worst;
  CHECK(differs);
}

TEST_CASE("a tolerance below rounding error is reported as a failure") {
  LawConfig cfg = small();
  cfg.options.tol.law_tol = 1e-300;
  cfg.options.tol.zero_mass_tol = 1e-300;
  std::size_t failing = 0;
  for (const auto& r : inferenceLaws(cfg)) {
    if (!r.passed()) {
      ++failing;
      CHECK(r.failures > 0);
      CHECK(r.worst > r.tolerance);
      CHECK_FALSE(r.firstFailure.empty());
    }
  }
  CHECK(failing > 0);
}

TEST_CASE("model laws cover declared generators") {
  const Model m = parse(std::string(fixtures::kCoinModel) +
                        "diagram saw0 : Bit -> I = observe[Bit = 0]\n");
  const auto results = modelLaws(m, small());
  bool sawInversion = false;
  bool sawValidity = false;
  for (const auto& r : results) {
    INFO(r.name << ": " << r.firstFailure);
    CHECK(r.passed());
    sawInversion = sawInversion || r.name == "inversion_identity";
    sawValidity = sawValidity || r.name == "pearl_increases_validity";
  }
  CHECK(sawInversion);
  CHECK(sawValidity);
  CHECK(modelLaws(Model{}, small()).empty());
}
