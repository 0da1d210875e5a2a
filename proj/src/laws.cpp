#include "pmc/laws.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "pmc/exactnf.hpp"
#include "pmc/maybecat.hpp"
#include "pmc/random.hpp"

namespace pmc {

namespace {

constexpr double kFail = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return seed ^ h;
}

class Law {
 public:
  Law(const LawConfig& cfg, std::string module, std::string name, double tol)
      : rng(mix(cfg.seed, module + "." + name)) {
    result_.module = std::move(module);
    result_.name = std::move(name);
    result_.tolerance = tol;
  }

  /// Records one case with deviation `d`; `describe` is only called for the first failure.
  void check(double d, const std::function<std::string()>& describe = {}) {
    ++result_.cases;
    if (std::isnan(d)) d = kFail;
    result_.worst = std::max(result_.worst, d);
    if (d > result_.tolerance) {
      if (result_.failures++ == 0) {
        std::ostringstream msg;
        msg << "deviation " << d;
        if (describe) msg << " on " << describe();
        result_.firstFailure = msg.str();
      }
    }
  }

  LawResult done() { return std::move(result_); }

  Rng rng;

 private:
  LawResult result_;
};

double rowDiff(const SubKernel& a, const SubKernel& b, std::size_t row) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(row, j) - b(row, j)));
  return d;
}

std::string kind(const FinObject& x) { return x.name() + "[" + std::to_string(x.size()) + "]"; }

FinObject obj(Rng& rng, std::size_t maxSize, const std::string& name, double unitChance = 0.1) {
  if (rng.chance(unitChance)) return FinObject::unit();
  return randomAtom(rng, maxSize, name);
}

KernelShape anyShape(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.6) return KernelShape::substochastic;
  if (u < 0.8) return KernelShape::total;
  if (u < 0.9) return KernelShape::deterministic_domain;
  return KernelShape::deterministic;
}

// ---------------------------------------------------------------------------
// Structural laws on a single object.

double coassociativity(const FinObject& x) {
  const SubKernel c = copy(x);
  const SubKernel i = identity(x);
  return maxAbsDiff(compose(c, tensor(c, i)), compose(c, tensor(i, c)));
}

double counitality(const FinObject& x) {
  const SubKernel c = copy(x);
  const SubKernel i = identity(x);
  return std::max(maxAbsDiff(compose(c, tensor(discard(x), i)), i),
                  maxAbsDiff(compose(c, tensor(i, discard(x))), i));
}

double cocommutativity(const FinObject& x) {
  return maxAbsDiff(compose(copy(x), swap(x, x)), copy(x));
}

double comparatorCommutative(const FinObject& x) {
  return maxAbsDiff(compose(swap(x, x), compare(x)), compare(x));
}

double comparatorAssociative(const FinObject& x) {
  const SubKernel m = compare(x);
  const SubKernel i = identity(x);
  return maxAbsDiff(compose(tensor(m, i), m), compose(tensor(i, m), m));
}

double comparatorSpecial(const FinObject& x) {
  return maxAbsDiff(compose(copy(x), compare(x)), identity(x));
}

double comparatorFrobenius(const FinObject& x) {
  const SubKernel m = compare(x);
  const SubKernel c = copy(x);
  const SubKernel i = identity(x);
  const SubKernel left = compose(tensor(i, c), tensor(m, i));
  const SubKernel middle = compose(m, c);
  const SubKernel right = compose(tensor(c, i), tensor(i, m));
  return std::max(maxAbsDiff(left, middle), maxAbsDiff(middle, right));
}

using ObjectLaw = double (*)(const FinObject&);

struct NamedObjectLaw {
  const char* name;
  ObjectLaw law;
};

constexpr NamedObjectLaw kComonoidLaws[] = {
    {"copy_coassociative", coassociativity},
    {"copy_counital", counitality},
    {"copy_cocommutative", cocommutativity},
};

constexpr NamedObjectLaw kComparatorLaws[] = {
    {"comparator_commutative", comparatorCommutative},
    {"comparator_associative", comparatorAssociative},
    {"comparator_special", comparatorSpecial},
    {"comparator_frobenius", comparatorFrobenius},
};

// ---------------------------------------------------------------------------
// Inference helpers shared by the random and model suites.

double factorizationDeviation(const SubKernel& f, std::size_t split, const InferenceOptions& o) {
  const SubKernel c = conditional(f, split, o);
  return maxAbsDiff(condComp(project(f, split, Side::first), c), f);
}

double inversionIdentity(const SubKernel& p, const SubKernel& g, const InferenceOptions& o) {
  const SubKernel inv = bayesInvert(g, p, o);
  const SubKernel joint = compose(p, copy(g.dom()), tensor(g, identity(g.dom())));
  return maxAbsDiff(condComp(compose(p, g), inv), joint);
}

double bayesUpToScalar(const SubKernel& p, const SubKernel& f, const InferenceOptions& o) {
  const SubKernel inv = bayesInvert(f, p, o);
  const SubKernel evidence = compose(p, f);
  const FinObject& x = f.dom();
  double d = 0.0;
  for (std::size_t y = 0; y < f.cols(); ++y) {
    const double e = evidence(0, y);
    if (e <= o.tol.zero_mass_tol) continue;
    const SubKernel observed =
        compose(p, copy(x), tensor(identity(x), compose(f, observe(f.cod(), y))));
    for (std::size_t i = 0; i < x.size(); ++i) {
      d = std::max(d, std::abs(observed(0, i) - e * inv(y, i)));
    }
  }
  return d;
}

double pearlJeffrey(const SubKernel& p, const SubKernel& f, const InferenceOptions& o) {
  const SubKernel evidence = compose(p, f);
  double d = 0.0;
  for (std::size_t y = 0; y < f.cols(); ++y) {
    if (evidence(0, y) <= o.tol.zero_mass_tol) continue;
    const SubKernel pearl = pearlUpdate(p, f, observe(f.cod(), y), true, o);
    const SubKernel jeffrey = jeffreyUpdate(p, f, point(f.cod(), y), o);
    d = std::max(d, maxAbsDiff(pearl, jeffrey));
  }
  return d;
}

double validityDrop(const SubKernel& p, const SubKernel& f, const SubKernel& q,
                    const InferenceOptions& o) {
  const double before = validity(p, f, q);
  if (before <= 1e-6) return 0.0;
  const double after = validity(pearlUpdate(p, f, q, true, o), f, q);
  return std::max(0.0, before - after);
}

double deterministicDomainCharacterization(const SubKernel& f, double tol) {
  const bool crisp = hasDeterministicDomain(f, tol);
  const bool ownNormalisation = approxEqual(condComp(domainOfDefinition(f), f), f, tol);
  return crisp == ownNormalisation ? 0.0 : kFail;
}

double normalisationLaw(const SubKernel& f, const InferenceOptions& o) {
  return maxAbsDiff(condComp(domainOfDefinition(f), normalize(f, o)), f);
}

double routesAgree(const SubKernel& f, std::size_t split, const InferenceOptions& o) {
  const SubKernel a = conditional(f, split, o);
  const SubKernel b = conditionalViaBase(f, split, o.tol);
  const SubKernel marginal = project(f, split, Side::first);
  double d = maxAbsDiff(condComp(marginal, b), f);
  for (std::size_t x = 0; x < marginal.rows(); ++x) {
    for (std::size_t y = 0; y < marginal.cols(); ++y) {
      if (marginal(x, y) > o.tol.zero_mass_tol) {
        d = std::max(d, rowDiff(a, b, x * marginal.cols() + y));
      }
    }
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<LawResult> kernelLaws(const LawConfig& cfg) {
  const double tol = cfg.options.tol.law_tol;
  const std::size_t n = cfg.cases;
  const std::size_t size = cfg.maxSize;
  std::vector<LawResult> out;

  for (const auto& [name, law] : kComonoidLaws) {
    Law l(cfg, "kernel", name, tol);
    for (std::size_t i = 0; i < n; ++i) {
      FinObject x = obj(l.rng, size, "X");
      if (l.rng.chance(0.3)) x = tensor(x, obj(l.rng, size, "Y"));
      l.check(law(x), [&] { return kind(x); });
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "kernel", "copy_discard_tensor_coherence", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const SubKernel shuffled = compose(tensor(copy(x), copy(y)),
                                         tensor(tensor(identity(x), swap(x, y)), identity(y)));
      const double d = std::max(maxAbsDiff(copy(tensor(x, y)), shuffled),
                                maxAbsDiff(discard(tensor(x, y)), tensor(discard(x), discard(y))));
      l.check(d, [&] { return kind(x) + " " + kind(y); });
    }
    out.push_back(l.done());
  }

  // Comparators: every object size 1..5 exhaustively, then random atoms.
  for (const auto& [name, law] : kComparatorLaws) {
    Law l(cfg, "kernel", name, tol);
    for (std::size_t s = 1; s <= 5; ++s) {
      std::vector<std::string> labels;
      for (std::size_t k = 0; k < s; ++k) labels.push_back("c" + std::to_string(k));
      const FinObject x = FinObject::atomic("C" + std::to_string(s), labels);
      l.check(law(x), [&] { return kind(x); });
    }
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      l.check(law(x), [&] { return kind(x); });
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "kernel", "deterministic_has_deterministic_domain", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      std::vector<SubKernel> ks{randomKernel(l.rng, x, y, KernelShape::deterministic), copy(x),
                                discard(x), swap(x, y), compare(x), identity(y)};
      double d = 0.0;
      for (const auto& k : ks) {
        if (!isDeterministic(k, tol) || !hasDeterministicDomain(k, tol)) d = kFail;
      }
      l.check(d, [&] { return kind(x) + " " + kind(y); });
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "kernel", "conditional_composition_associative", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject a = obj(l.rng, size, "A");
      const FinObject b = obj(l.rng, size, "B");
      const FinObject c = obj(l.rng, size, "C");
      const SubKernel f = randomKernel(l.rng, x, a, anyShape(l.rng));
      const SubKernel g = randomKernel(l.rng, tensor(x, a), b, anyShape(l.rng));
      const SubKernel h = randomKernel(l.rng, tensor(tensor(x, a), b), c, anyShape(l.rng));
      l.check(maxAbsDiff(condComp(condComp(f, g), h), condComp(f, condComp(g, h))));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "kernel", "conditional_composition_unital", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject a = obj(l.rng, size, "A");
      const SubKernel f = randomKernel(l.rng, x, a, anyShape(l.rng));
      l.check(std::max(maxAbsDiff(condComp(f, discard(tensor(x, a))), f),
                       maxAbsDiff(condComp(discard(x), f), f)));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "kernel", "graph_section_of_marginal", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      l.check(maxAbsDiff(project(graph(f), x.factorCount(), Side::second), f));
    }
    out.push_back(l.done());
  }

  {
    // The section is not a retraction: some random f: X -> X*Y is not the
    // graph of its own second marginal.
    Law l(cfg, "kernel", "graph_not_a_retraction_witness", tol);
    std::size_t witnesses = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = randomAtom(l.rng, size, "X");
      const FinObject y = randomAtom(l.rng, size, "Y");
      const SubKernel f = randomKernel(l.rng, x, tensor(x, y), KernelShape::substochastic);
      if (maxAbsDiff(graph(project(f, 1, Side::second)), f) > tol) ++witnesses;
    }
    l.check(witnesses > 0 ? 0.0 : kFail, [] { return std::string("no witness found"); });
    out.push_back(l.done());
  }
  return out;
}

std::vector<LawResult> inferenceLaws(const LawConfig& cfg) {
  const InferenceOptions& o = cfg.options;
  const double tol = o.tol.law_tol;
  const double zero = o.tol.zero_mass_tol;
  const std::size_t n = cfg.cases;
  const std::size_t size = cfg.maxSize;
  std::vector<LawResult> out;

  {
    Law l(cfg, "inference", "conditional_factorization", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const SubKernel f = randomKernel(l.rng, x, tensor(y, z), anyShape(l.rng));
      l.check(factorizationDeviation(f, y.factorCount(), o));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "conditional_almost_surely_total", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const SubKernel f = randomKernel(l.rng, x, tensor(y, z), anyShape(l.rng));
      const SubKernel c = conditional(f, y.factorCount(), o);
      const SubKernel m = project(f, y.factorCount(), Side::first);
      double d = maxAbsDiff(condComp(m, compose(c, discard(z))), condComp(m, discard(tensor(x, y))));
      if (o.convention == ConditioningConvention::uniform_fill && !isTotal(c, tol)) d = kFail;
      l.check(d);
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "conditional_of_deterministic", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const SubKernel h = randomKernel(l.rng, x, tensor(y, z), KernelShape::deterministic);
      const SubKernel c = conditional(h, y.factorCount(), o);
      // π1 ; h ; π2 : X*Y -> Z
      const SubKernel viaProjections =
          compose(project(identity(tensor(x, y)), x.factorCount(), Side::first), h,
                  project(identity(tensor(y, z)), y.factorCount(), Side::second));
      const SubKernel m = project(h, y.factorCount(), Side::first);
      double d = 0.0;
      for (std::size_t xi = 0; xi < x.size(); ++xi) {
        for (std::size_t yi = 0; yi < y.size(); ++yi) {
          if (m(xi, yi) > zero) d = std::max(d, rowDiff(c, viaProjections, xi * y.size() + yi));
        }
      }
      l.check(d);
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "inversion_identity", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X", 0.05);
      const FinObject y = obj(l.rng, size, "Y", 0.05);
      const SubKernel p = randomState(l.rng, x, l.rng.chance(0.5) ? KernelShape::total
                                                                 : KernelShape::substochastic);
      const SubKernel g = randomKernel(l.rng, x, y, anyShape(l.rng));
      l.check(inversionIdentity(p, g, o));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "inversion_of_composite", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X", 0.05);
      const FinObject y = obj(l.rng, size, "Y", 0.05);
      const FinObject z = obj(l.rng, size, "Z", 0.05);
      const SubKernel p = randomState(l.rng, x, KernelShape::total);
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      const SubKernel g = randomKernel(l.rng, y, z, anyShape(l.rng));
      const SubKernel direct = bayesInvert(compose(f, g), p, o);
      const SubKernel stepwise = compose(bayesInvert(g, compose(p, f), o), bayesInvert(f, p, o));
      const SubKernel evidence = compose(p, f, g);
      double d = 0.0;
      for (std::size_t zi = 0; zi < z.size(); ++zi) {
        if (evidence(0, zi) > zero) d = std::max(d, rowDiff(direct, stepwise, zi));
      }
      l.check(d);
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "conditional_of_composite", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const FinObject w = obj(l.rng, size, "W");
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      const SubKernel g = randomKernel(l.rng, y, tensor(z, w), anyShape(l.rng));
      const std::size_t kz = z.factorCount();
      // b(f, g) = (g ; π1)†(f): X*Z -> Y, followed by c(g): Y*Z -> W.
      const SubKernel inverse = bayesInvert(project(g, kz, Side::first), f, o);
      const SubKernel cg = conditional(g, kz, o);
      const std::size_t nz = z.size();
      const SubKernel built = SubKernel::fromFunction(
          tensor(x, z), w, [&](std::size_t xz, std::size_t wi) {
            double s = 0.0;
            for (std::size_t yi = 0; yi < y.size(); ++yi) {
              s += inverse(xz, yi) * cg(yi * nz + xz % nz, wi);
            }
            return s;
          });
      const SubKernel fg = compose(f, g);
      l.check(maxAbsDiff(condComp(project(fg, kz, Side::first), built), fg));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "normalisation_law", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      l.check(normalisationLaw(randomKernel(l.rng, x, y, anyShape(l.rng)), o));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "normalisation_idempotent", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      const SubKernel once = normalize(f, o);
      const SubKernel twice = normalize(once, o);
      double d = 0.0;
      const SubKernel dom = domainOfDefinition(f);
      for (std::size_t xi = 0; xi < x.size(); ++xi) {
        // Exact under uniform fill; almost surely otherwise.
        if (o.convention == ConditioningConvention::uniform_fill || dom(xi, 0) > zero) {
          d = std::max(d, rowDiff(once, twice, xi));
        }
      }
      l.check(d);
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "normalisation_precomposes", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      const SubKernel g = randomKernel(l.rng, y, z, anyShape(l.rng));
      const SubKernel late = normalize(compose(f, g), o);
      const SubKernel early = normalize(compose(normalize(f, o), g), o);
      const SubKernel dom = domainOfDefinition(f);
      double d = 0.0;
      for (std::size_t xi = 0; xi < x.size(); ++xi) {
        if (dom(xi, 0) > zero) d = std::max(d, rowDiff(late, early, xi));
      }
      l.check(d);
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "normalised_conditionals_are_conditionals", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const SubKernel f = randomKernel(l.rng, x, tensor(y, z), anyShape(l.rng));
      const std::size_t k = y.factorCount();
      const SubKernel c = conditional(normalize(f, o), k, o);
      l.check(maxAbsDiff(condComp(project(f, k, Side::first), c), f));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "deterministic_domain_characterization", tol);
    std::size_t crispSeen = 0;
    std::size_t fuzzySeen = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const KernelShape shape =
          i % 2 ? KernelShape::deterministic_domain : KernelShape::substochastic;
      const SubKernel f = randomKernel(l.rng, x, y, shape);
      (hasDeterministicDomain(f, tol) ? crispSeen : fuzzySeen)++;
      l.check(deterministicDomainCharacterization(f, tol));
    }
    // Both directions must have been exercised.
    l.check(crispSeen && fuzzySeen ? 0.0 : kFail, [] { return std::string("one-sided sample"); });
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "factorization_through_deterministic_domain", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject a = obj(l.rng, size, "A");
      const FinObject b = obj(l.rng, size, "B");
      const SubKernel m = randomKernel(l.rng, x, a, anyShape(l.rng));
      const SubKernel c = randomKernel(l.rng, tensor(x, a), b, KernelShape::deterministic_domain);
      const SubKernel f = condComp(m, c);
      l.check(maxAbsDiff(condComp(project(f, a.factorCount(), Side::first), c), f));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "bayes_theorem_up_to_scalar", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X", 0.05);
      const FinObject y = obj(l.rng, size, "Y", 0.05);
      const SubKernel p = randomState(l.rng, x, l.rng.chance(0.7) ? KernelShape::total
                                                                 : KernelShape::substochastic);
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      l.check(bayesUpToScalar(p, f, o));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "pearl_jeffrey_coincide_on_points", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X", 0.05);
      const FinObject y = obj(l.rng, size, "Y", 0.05);
      const SubKernel p = randomState(l.rng, x, KernelShape::total);
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      l.check(pearlJeffrey(p, f, o));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "inference", "pearl_increases_validity", tol);
    std::size_t counted = 0;
    for (std::size_t attempt = 0; counted < n && attempt < 20 * n; ++attempt) {
      const FinObject x = obj(l.rng, size, "X", 0.05);
      const FinObject y = obj(l.rng, size, "Y", 0.05);
      const SubKernel p = randomState(l.rng, x, KernelShape::total);
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      const SubKernel q = randomKernel(l.rng, y, FinObject::unit(), KernelShape::substochastic);
      if (validity(p, f, q) <= 1e-6) continue;
      ++counted;
      l.check(validityDrop(p, f, q, o));
    }
    out.push_back(l.done());
  }
  return out;
}

std::vector<LawResult> maybeLaws(const LawConfig& cfg) {
  const InferenceOptions& o = cfg.options;
  const double tol = o.tol.law_tol;
  const std::size_t n = cfg.cases;
  const std::size_t size = cfg.maxSize;
  std::vector<LawResult> out;

  auto sized = [](std::size_t s, const std::string& name) {
    if (s == 0) return FinObject::unit();
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < s; ++k) labels.push_back(name + std::to_string(k));
    return FinObject::atomic(name, labels);
  };

  {
    Law l(cfg, "maybecat", "oplaxator_splits_laxator", 1e-12);
    for (std::size_t a = 0; a <= size; ++a) {
      for (std::size_t b = 0; b <= size; ++b) {
        const FinObject x = sized(a, "X");
        const FinObject y = sized(b, "Y");
        const SubKernel sl = compose(oplaxator(x, y).kernel(), laxator(x, y).kernel());
        l.check(maxAbsDiff(sl, identity(PointedObject(tensor(x, y)).object())),
                [&] { return kind(x) + " " + kind(y); });
      }
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "maybecat", "oplaxator_preserves_copy", 1e-12);
    for (std::size_t a = 0; a <= size; ++a) {
      const FinObject x = sized(a, "X");
      const SubKernel lhs = compose(kleisliLift(copy(x)).kernel(), oplaxator(x, x).kernel());
      l.check(maxAbsDiff(lhs, copy(PointedObject(x).object())), [&] { return kind(x); });
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "maybecat", "laxator_deterministic_total", tol);
    for (std::size_t a = 0; a <= size; ++a) {
      for (std::size_t b = 0; b <= size; ++b) {
        const SubKernel lax = laxator(sized(a, "X"), sized(b, "Y")).kernel();
        l.check(isDeterministic(lax, tol) && isTotal(lax, tol) ? 0.0 : kFail);
      }
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "maybecat", "conditional_routes_agree", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const SubKernel f = randomKernel(l.rng, x, tensor(y, z), anyShape(l.rng));
      l.check(routesAgree(f, y.factorCount(), o));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "maybecat", "kleisli_conditional_composition", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const SubKernel f = randomKernel(l.rng, x, y, anyShape(l.rng));
      const SubKernel g = randomKernel(l.rng, tensor(x, y), z, anyShape(l.rng));
      const SubKernel direct = condComp(f, g);
      const SubKernel lifted =
          compose(condComp(toTotal(f).kernel(),
                           toTotal(strongKleisliExtend(g, x.factorCount())).kernel()),
                  laxator(y, z).kernel());
      l.check(maxAbsDiff(fromTotal(TotalKernel(lifted), PointedObject(tensor(y, z))), direct));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "maybecat", "restriction_replaces_conditional", tol);
    for (std::size_t i = 0; i < n; ++i) {
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const FinObject z = obj(l.rng, size, "Z");
      const PointedObject py(y);
      const PointedObject pz(z);
      const SubKernel f = randomKernel(l.rng, x, py.object(), KernelShape::total);
      const SubKernel g = randomKernel(l.rng, tensor(x, py.object()), pz.object(), KernelShape::total);
      const SubKernel h = splitConditional(fromTotal(TotalKernel(g), pz), x, py);
      const SubKernel hStar = toTotal(strongKleisliExtend(h, x.factorCount())).kernel();
      const SubKernel lax = laxator(y, z).kernel();
      l.check(maxAbsDiff(compose(condComp(f, g), lax), compose(condComp(f, hStar), lax)));
    }
    out.push_back(l.done());
  }
  return out;
}

std::vector<LawResult> diagramLaws(const LawConfig& cfg) {
  const double tol = cfg.options.tol.law_tol;
  const std::size_t n = cfg.cases;
  const std::size_t size = cfg.maxSize;
  std::vector<LawResult> out;

  {
    Law l(cfg, "diagram", "evaluation_is_monoidal", tol);
    for (std::size_t i = 0; i < n; ++i) {
      Model model;
      std::vector<FinObject> atoms{randomAtom(l.rng, size, "A"), randomAtom(l.rng, size, "B")};
      RandomTermGenerator gen(l.rng, model, atoms, 16);
      const FinObject dom = pick(l.rng, atoms);
      const TermPtr a = gen.generate(dom, 2);
      const TermPtr b = gen.generate(typecheck(a, model).cod, 2);
      const TermPtr c = gen.generate(pick(l.rng, atoms), 2);
      const SubKernel ea = evaluate(a, model);
      const double d =
          std::max(maxAbsDiff(evaluate(term::seq(a, b), model), compose(ea, evaluate(b, model))),
                   maxAbsDiff(evaluate(term::par(a, c), model), tensor(ea, evaluate(c, model))));
      l.check(d, [&] { return toString(a) + " | " + toString(b) + " | " + toString(c); });
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "diagram", "observation_axiom", tol);
    for (std::size_t i = 0; i < n; ++i) {
      Model model;
      const FinObject x = randomAtom(l.rng, size, "X");
      const FinObject y = obj(l.rng, size, "Y");
      const std::size_t label = l.rng.below(x.size());
      model.addState("x", point(x, label));
      model.addKernel("f", randomKernel(l.rng, x, y, anyShape(l.rng)));
      const TermPtr seen = term::observe(x, x.label(label));
      // x° ◁ id = x° ; x
      const SubKernel lhs =
          evaluate(term::seq(term::copy(x), term::par(seen, term::id(x))), model);
      const SubKernel rhs = evaluate(term::seq(seen, term::gen("x")), model);
      // x° ◁ f = x° ; x ; f
      const SubKernel lhsF =
          evaluate(term::seq(term::copy(x), term::par(seen, term::gen("f"))), model);
      const SubKernel rhsF =
          evaluate(term::seq(term::seq(seen, term::gen("x")), term::gen("f")), model);
      l.check(std::max(maxAbsDiff(lhs, rhs), maxAbsDiff(lhsF, rhsF)));
    }
    out.push_back(l.done());
  }

  {
    Law l(cfg, "diagram", "deterministic_splits_into_marginals", tol);
    for (std::size_t i = 0; i < n; ++i) {
      Model model;
      const FinObject x = obj(l.rng, size, "X");
      const FinObject y = randomAtom(l.rng, size, "Y");
      const FinObject z = randomAtom(l.rng, size, "Z");
      model.addKernel("h", randomKernel(l.rng, x, tensor(y, z), KernelShape::deterministic));
      const TermPtr h = term::gen("h");
      const TermPtr first = term::seq(h, term::par(term::id(y), term::discard(z)));
      const TermPtr second = term::seq(h, term::par(term::discard(y), term::id(z)));
      const SubKernel split = evaluate(term::seq(term::copy(x), term::par(first, second)), model);
      // Only crisp rows split: a failing row fails in both copies.
      l.check(maxAbsDiff(split, evaluate(h, model)));
    }
    out.push_back(l.done());
  }
  return out;
}

std::vector<LawResult> normalFormLaws(const LawConfig& cfg) {
  const InferenceOptions& o = cfg.options;
  const double tol = o.tol.law_tol;
  const double zero = o.tol.zero_mass_tol;
  Law sound(cfg, "exactnf", "normal_form_soundness", tol);
  Law norm(cfg, "exactnf", "normal_form_normalisation", tol);
  Law cond(cfg, "exactnf", "normal_form_conditionals", tol);
  Law shape(cfg, "exactnf", "normal_form_invariants", tol);
  Rng& rng = sound.rng;
  for (std::size_t i = 0; i < cfg.nfTerms; ++i) {
    Model model;
    std::vector<FinObject> atoms{randomAtom(rng, cfg.maxSize, "A"), randomAtom(rng, cfg.maxSize, "B"),
                                 randomAtom(rng, cfg.maxSize, "C")};
    RandomTermGenerator gen(rng, model, atoms);
    const FinObject dom = pick(rng, atoms);
    const TermPtr t = gen.generate(dom, std::max(0, cfg.nfDepth - 1));
    auto describe = [&] { return toString(t); };

    const NormalForm nf = nfFromTerm(t, model, o.tol);
    const SubKernel denotation = nfDenote(nf);
    sound.check(maxAbsDiff(denotation, evaluate(t, model)), describe);

    const std::vector<double> success = successMass(nf);
    const SubKernel normalised = normalize(denotation, o);
    double d = 0.0;
    for (std::size_t x = 0; x < success.size(); ++x) {
      if (success[x] > zero) d = std::max(d, rowDiff(nf.g.kernel(), normalised, x));
    }
    norm.check(d, describe);

    shape.check(isTotal(nf.h.kernel(), o.tol.validation_slack) &&
                        isTotal(nf.g.kernel(), o.tol.validation_slack) &&
                        nf.z < nf.evidence().size()
                    ? 0.0
                    : kFail,
                describe);

    if (nf.cod().factorCount() >= 2) {
      const std::size_t k = 1 + rng.below(nf.cod().factorCount() - 1);
      const SubKernel base = stochConditional(nf.g, k, o.tol).kernel();
      const SubKernel direct = conditional(denotation, k, o);
      const SubKernel marginal = project(denotation, k, Side::first);
      double dc = maxAbsDiff(condComp(marginal, base), denotation);
      for (std::size_t x = 0; x < marginal.rows(); ++x) {
        for (std::size_t y = 0; y < marginal.cols(); ++y) {
          if (marginal(x, y) > zero) {
            dc = std::max(dc, rowDiff(base, direct, x * marginal.cols() + y));
          }
        }
      }
      cond.check(dc, describe);
    }
  }
  return {sound.done(), norm.done(), cond.done(), shape.done()};
}

std::vector<LawResult> modelLaws(const Model& model, const LawConfig& cfg) {
  const InferenceOptions& o = cfg.options;
  const double tol = o.tol.law_tol;
  std::vector<LawResult> out;
  auto keep = [&](Law& l) {
    LawResult r = l.done();
    if (r.cases > 0) out.push_back(std::move(r));
  };

  for (const auto& [name, law] : kComonoidLaws) {
    Law l(cfg, "model", name, tol);
    for (const auto& [oname, x] : model.objects()) l.check(law(x), [&] { return oname; });
    keep(l);
  }
  for (const auto& [name, law] : kComparatorLaws) {
    Law l(cfg, "model", name, tol);
    for (const auto& [oname, x] : model.objects()) l.check(law(x), [&] { return oname; });
    keep(l);
  }

  std::vector<std::pair<std::string, SubKernel>> morphisms;
  for (const auto& [name, k] : model.kernels()) morphisms.emplace_back(name, k);
  for (const auto& [name, s] : model.states()) morphisms.emplace_back(name, s);
  for (const auto& [name, d] : model.diagrams()) morphisms.emplace_back(name, evaluate(d.term, model));

  {
    Law fact(cfg, "model", "conditional_factorization", tol);
    Law routes(cfg, "model", "conditional_routes_agree", tol);
    Law normal(cfg, "model", "normalisation_law", tol);
    Law crisp(cfg, "model", "deterministic_domain_characterization", tol);
    for (const auto& [name, f] : morphisms) {
      auto who = [&] { return name; };
      normal.check(normalisationLaw(f, o), who);
      crisp.check(deterministicDomainCharacterization(f, tol), who);
      for (std::size_t k = 1; k < f.cod().factorCount(); ++k) {
        fact.check(factorizationDeviation(f, k, o), who);
        routes.check(routesAgree(f, k, o), who);
      }
    }
    keep(fact);
    keep(routes);
    keep(normal);
    keep(crisp);
  }

  {
    Law inv(cfg, "model", "inversion_identity", tol);
    Law bayes(cfg, "model", "bayes_theorem_up_to_scalar", tol);
    Law pj(cfg, "model", "pearl_jeffrey_coincide_on_points", tol);
    Law valid(cfg, "model", "pearl_increases_validity", tol);
    for (const auto& [pname, p] : model.states()) {
      for (const auto& [fname, f] : morphisms) {
        if (f.dom().isUnit() || !(f.dom() == p.cod())) continue;
        auto who = [&] { return pname + ", " + fname; };
        inv.check(inversionIdentity(p, f, o), who);
        bayes.check(bayesUpToScalar(p, f, o), who);
        if (isTotal(p, tol)) {
          pj.check(pearlJeffrey(p, f, o), who);
          for (const auto& [qname, q] : morphisms) {
            if (!(q.dom() == f.cod()) || !q.cod().isUnit()) continue;
            valid.check(validityDrop(p, f, q, o), [&] { return who() + ", " + qname; });
          }
        }
      }
    }
    keep(inv);
    keep(bayes);
    keep(pj);
    keep(valid);
  }

  {
    Law sound(cfg, "model", "normal_form_soundness", tol);
    for (const auto& [name, d] : model.diagrams()) {
      try {
        const NormalForm nf = nfFromTerm(d.term, model, o.tol);
        sound.check(maxAbsDiff(nfDenote(nf), evaluate(d.term, model)), [&] { return name; });
      } catch (const NonTotalGeneratorError&) {
        // Outside the exact-observation fragment.
      }
    }
    keep(sound);
  }
  return out;
}

std::vector<LawResult> runLawSuite(const LawConfig& cfg, const Model* model) {
  std::vector<LawResult> all;
  for (auto suite : {kernelLaws, inferenceLaws, maybeLaws, diagramLaws, normalFormLaws}) {
    for (auto& r : suite(cfg)) all.push_back(std::move(r));
  }
  if (model) {
    for (auto& r : modelLaws(*model, cfg)) all.push_back(std::move(r));
  }
  return all;
}

}  // namespace pmc
