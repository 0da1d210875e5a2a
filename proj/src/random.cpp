#include "pmc/random.hpp"

#include <cmath>

namespace pmc {

FinObject randomAtom(Rng& rng, std::size_t maxSize, const std::string& name) {
  const std::size_t n = 1 + rng.below(maxSize);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(name + "_" + std::to_string(i));
  return FinObject::atomic(name, std::move(labels));
}

FinObject pick(Rng& rng, const std::vector<FinObject>& pool) {
  if (pool.empty() || rng.chance(0.05)) return FinObject::unit();
  return pool[rng.below(pool.size())];
}

namespace {

void fillRow(Rng& rng, std::span<double> row, double mass) {
  double total = 0.0;
  for (double& w : row) {
    w = rng.chance(0.3) ? 0.0 : -std::log(1.0 - rng.uniform());
    total += w;
  }
  if (total == 0.0) {
    row[rng.below(row.size())] = 1.0;
    total = 1.0;
  }
  for (double& w : row) w *= mass / total;
}

}  // namespace

SubKernel randomKernel(Rng& rng, const FinObject& dom, const FinObject& cod, KernelShape shape) {
  const std::size_t n = dom.size();
  const std::size_t m = cod.size();
  std::vector<double> w(n * m, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    std::span<double> row(w.data() + x * m, m);
    switch (shape) {
      case KernelShape::total: fillRow(rng, row, 1.0); break;
      case KernelShape::substochastic: {
        const double u = rng.uniform();
        if (u < 0.15) break;
        fillRow(rng, row, u < 0.4 ? 1.0 : rng.uniform());
        break;
      }
      case KernelShape::deterministic:
        if (!rng.chance(0.2)) row[rng.below(m)] = 1.0;
        break;
      case KernelShape::deterministic_domain:
        if (!rng.chance(0.3)) fillRow(rng, row, 1.0);
        break;
    }
  }
  return SubKernel(dom, cod, std::move(w));
}

SubKernel randomState(Rng& rng, const FinObject& cod, KernelShape shape) {
  return randomKernel(rng, FinObject::unit(), cod, shape);
}

// ---------------------------------------------------------------------------

RandomTermGenerator::RandomTermGenerator(Rng& rng, Model& model, std::vector<FinObject> atoms,
                                         std::size_t maxLabels)
    : rng_(rng), model_(model), atoms_(std::move(atoms)), maxLabels_(maxLabels) {}

FinObject RandomTermGenerator::smallCodomain() {
  FinObject x = pick(rng_, atoms_);
  if (rng_.chance(0.2)) x = tensor(x, pick(rng_, atoms_));
  return x;
}

TermPtr RandomTermGenerator::freshGenerator(const FinObject& dom, const FinObject& cod) {
  const std::string name = "g" + std::to_string(counter_++);
  if (dom.isUnit()) {
    model_.addState(name, randomState(rng_, cod, KernelShape::total));
  } else {
    model_.addKernel(name, randomKernel(rng_, dom, cod, KernelShape::total));
  }
  return term::gen(name);
}

TermPtr RandomTermGenerator::leaf(const FinObject& dom) {
  const bool canGrow = dom.size() * dom.size() <= maxLabels_ && dom.factorCount() <= 2;
  const std::size_t choice = rng_.below(7);
  switch (choice) {
    case 0: return term::id(dom);
    case 1:
      if (canGrow) return term::copy(dom);
      break;
    case 2: return term::discard(dom);
    case 3:
      if (!dom.isUnit()) return term::observe(dom, dom.label(rng_.below(dom.size())));
      break;
    case 4:
      if (dom.factorCount() >= 2) {
        auto [a, b] = dom.split(1 + rng_.below(dom.factorCount() - 1));
        return term::swap(a, b);
      }
      break;
    default: break;
  }
  FinObject cod = smallCodomain();
  if (dom.isUnit() && cod.isUnit()) cod = pick(rng_, atoms_);
  return freshGenerator(dom, cod);
}

TermPtr RandomTermGenerator::generate(const FinObject& dom, int depth) {
  if (depth <= 0 || rng_.chance(0.2)) return leaf(dom);
  if (rng_.chance(0.55)) {
    TermPtr first = generate(dom, depth - 1);
    FinObject mid = sig(first).cod;
    if (mid.size() > maxLabels_ || mid.factorCount() > 3) {
      // Shrink before continuing so objects stay at desk scale.
      first = term::seq(first, freshGenerator(mid, smallCodomain()));
      mid = sig(first).cod;
    }
    return term::seq(first, generate(mid, depth - 1));
  }
  auto [a, b] = dom.split(rng_.below(dom.factorCount() + 1));
  TermPtr t = term::par(generate(a, depth - 1), generate(b, depth - 1));
  const FinObject cod = sig(t).cod;
  if (cod.size() > maxLabels_ || cod.factorCount() > 3) {
    t = term::seq(t, freshGenerator(cod, smallCodomain()));
  }
  return t;
}

}  // namespace pmc
