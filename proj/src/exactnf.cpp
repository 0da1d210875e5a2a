#include "pmc/exactnf.hpp"

namespace pmc {

NormalForm nfOfTotal(const SubKernel& f) {
  return {TotalKernel(discard(f.dom())), 0, TotalKernel(f)};
}

NormalForm nfOfObserve(const FinObject& x, const Label& label) {
  return {TotalKernel(identity(x)), x.indexOf(label), TotalKernel(discard(x))};
}

NormalForm nfTensor(const NormalForm& a, const NormalForm& b) {
  return {TotalKernel(tensor(a.h.kernel(), b.h.kernel())), a.z * b.evidence().size() + b.z,
          TotalKernel(tensor(a.g.kernel(), b.g.kernel()))};
}

NormalForm nfCompose(const NormalForm& a, const NormalForm& b, const Tolerances& tol) {
  if (!(a.cod() == b.dom())) {
    throw CompositionError("cannot compose normal forms " + a.dom().name() + " -> " +
                           a.cod().name() + " and " + b.dom().name() + " -> " + b.cod().name());
  }
  const FinObject& x = a.dom();
  const FinObject& y = a.cod();
  const FinObject& z = b.cod();

  // Both evidence branches read the same copied input.
  const SubKernel predicted = compose(a.g.kernel(), b.h.kernel());
  const TotalKernel h(compose(copy(x), tensor(a.h.kernel(), predicted)));
  const std::size_t point = a.z * b.evidence().size() + b.z;

  // Row z2 of the inversion of h2 against g1(.|x); the other rows are never read.
  const double fill = 1.0 / static_cast<double>(y.size());
  std::vector<double> inverse(y.size());
  std::vector<double> w(x.size() * z.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double mass = 0.0;
    for (std::size_t yi = 0; yi < y.size(); ++yi) {
      inverse[yi] = a.g(i, yi) * b.h(yi, b.z);
      mass += inverse[yi];
    }
    for (double& v : inverse) v = mass > tol.zero_mass_tol ? v / mass : fill;
    for (std::size_t yi = 0; yi < y.size(); ++yi) {
      if (inverse[yi] == 0.0) continue;
      for (std::size_t k = 0; k < z.size(); ++k) w[i * z.size() + k] += inverse[yi] * b.g(yi, k);
    }
  }
  return {h, point, TotalKernel(SubKernel(x, z, std::move(w)), tol.validation_slack)};
}

namespace {

NormalForm totalGenerator(const SubKernel& k, const std::string& name, const Tolerances& tol) {
  if (!isTotal(k, tol.validation_slack)) {
    throw NonTotalGeneratorError("generator '" + name +
                                 "' is not total; normal forms need a Markov base");
  }
  return nfOfTotal(k);
}

}  // namespace

NormalForm nfFromTerm(const TermPtr& t, const Model& model, const Tolerances& tol) {
  switch (t->kind) {
    case TermKind::gen: {
      if (auto it = model.kernels().find(t->name); it != model.kernels().end()) {
        return totalGenerator(it->second, t->name, tol);
      }
      if (auto it = model.states().find(t->name); it != model.states().end()) {
        return totalGenerator(it->second, t->name, tol);
      }
      if (auto it = model.diagrams().find(t->name); it != model.diagrams().end()) {
        return nfFromTerm(it->second.term, model, tol);
      }
      throw TypeError(t->pos, "unknown generator '" + t->name + "'");
    }
    case TermKind::seq: {
      NormalForm a = nfFromTerm(t->left, model, tol);
      NormalForm b = nfFromTerm(t->right, model, tol);
      return nfCompose(a, b, tol);
    }
    case TermKind::par:
      return nfTensor(nfFromTerm(t->left, model, tol), nfFromTerm(t->right, model, tol));
    case TermKind::observe:
      if (!t->object.find(t->label)) typecheck(t, model);
      return nfOfObserve(t->object, t->label);
    case TermKind::compare:
      return totalGenerator(compare(t->object), toString(t), tol);
    case TermKind::id: return nfOfTotal(identity(t->object));
    case TermKind::copy: return nfOfTotal(copy(t->object));
    case TermKind::discard: return nfOfTotal(discard(t->object));
    case TermKind::swap: return nfOfTotal(swap(t->object, t->object2));
  }
  throw TypeError(t->pos, "malformed term");
}

std::vector<double> successMass(const NormalForm& nf) {
  std::vector<double> s(nf.dom().size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = nf.h(i, nf.z);
  return s;
}

SubKernel nfDenote(const NormalForm& nf) {
  return SubKernel::fromFunction(nf.dom(), nf.cod(), [&](std::size_t x, std::size_t y) {
    return nf.h(x, nf.z) * nf.g(x, y);
  });
}

TotalKernel nfNormalization(const NormalForm& nf) { return nf.g; }

}  // namespace pmc
