#include "pmc/inference.hpp"

#include <cmath>

namespace pmc {

namespace {

void fillRow(std::span<double> row, ConditioningConvention convention) {
  const double value =
      convention == ConditioningConvention::uniform_fill ? 1.0 / static_cast<double>(row.size())
                                                         : 0.0;
  for (double& w : row) w = value;
}

}  // namespace

SubKernel conditional(const SubKernel& f, std::size_t split, const InferenceOptions& opts) {
  if (split > f.cod().factorCount()) {
    throw ValidationError("conditional split " + std::to_string(split) + " out of range for " +
                          f.cod().name());
  }
  auto [y, z] = f.cod().split(split);
  const std::size_t ny = y.size();
  const std::size_t nz = z.size();
  const FinObject dom = tensor(f.dom(), y);
  std::vector<double> w(dom.size() * nz);
  for (std::size_t x = 0; x < f.rows(); ++x) {
    for (std::size_t b = 0; b < ny; ++b) {
      const auto in = f.row(x).subspan(b * nz, nz);
      std::span<double> out(w.data() + (x * ny + b) * nz, nz);
      double mass = 0.0;
      for (double v : in) mass += v;
      if (mass > opts.tol.zero_mass_tol) {
        for (std::size_t c = 0; c < nz; ++c) out[c] = in[c] / mass;
      } else {
        fillRow(out, opts.convention);
      }
    }
  }
  return SubKernel(dom, z, std::move(w), opts.tol.validation_slack);
}

SubKernel bayesInvert(const SubKernel& g, const SubKernel& p, const InferenceOptions& opts) {
  const FinObject& x = g.dom();
  if (!(p.cod() == x)) {
    throw CompositionError("inversion prior lands in " + p.cod().name() + ", channel reads " +
                           x.name());
  }
  const SubKernel joint = compose(p, copy(x), tensor(g, identity(x)));
  return conditional(joint, g.cod().factorCount(), opts);
}

SubKernel normalize(const SubKernel& f, const InferenceOptions& opts) {
  std::vector<double> w = f.weights();
  const std::size_t m = f.cols();
  for (std::size_t x = 0; x < f.rows(); ++x) {
    std::span<double> row(w.data() + x * m, m);
    const double mass = f.rowSum(x);
    if (mass > opts.tol.zero_mass_tol) {
      for (double& v : row) v /= mass;
    } else {
      fillRow(row, opts.convention);
    }
  }
  return SubKernel(f.dom(), f.cod(), std::move(w), opts.tol.validation_slack);
}

SubKernel pearlUpdate(const SubKernel& p, const SubKernel& f, const SubKernel& q, bool renorm,
                      const InferenceOptions& opts) {
  if (!q.cod().isUnit()) {
    throw CompositionError("predicate must land in I, got " + q.cod().name());
  }
  const SubKernel raw = condComp(p, compose(f, q));
  return renorm ? normalize(raw, opts) : raw;
}

SubKernel jeffreyUpdate(const SubKernel& p, const SubKernel& f, const SubKernel& t,
                        const InferenceOptions& opts) {
  return compose(t, bayesInvert(f, p, opts));
}

double validity(const SubKernel& p, const SubKernel& f, const SubKernel& q) {
  return compose(p, f, q).scalar();
}

double klDivergence(const SubKernel& s, const SubKernel& t, const Tolerances& tol) {
  if (!s.dom().isUnit() || !t.dom().isUnit() || !(s.cod() == t.cod())) {
    throw CompositionError("divergence needs two states on the same object");
  }
  if (!isTotal(s, tol.law_tol) || !isTotal(t, tol.law_tol)) {
    throw DivergenceUndefinedError("divergence needs total states");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < s.cols(); ++i) {
    const double a = s(0, i);
    if (a == 0.0) continue;
    const double b = t(0, i);
    if (b == 0.0) {
      throw DivergenceUndefinedError("support of the first state is not contained in the second at " +
                                     s.cod().labelString(i));
    }
    kl += a * std::log(a / b);
  }
  return kl;
}

}  // namespace pmc
