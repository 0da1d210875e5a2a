#include "pmc/maybecat.hpp"

#include <cmath>
#include <sstream>

namespace pmc {

TotalKernel::TotalKernel(const SubKernel& kernel, double slack) : kernel_(kernel) {
  std::vector<double> w = kernel.weights();
  const std::size_t m = kernel.cols();
  for (std::size_t x = 0; x < kernel.rows(); ++x) {
    const double sum = kernel.rowSum(x);
    if (std::abs(sum - 1.0) > slack) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "kernel " << kernel.dom().name() << " -> " << kernel.cod().name() << " is not total: row "
          << kernel.dom().labelString(x) << " sums to " << sum;
      throw ValidationError(msg.str());
    }
    for (std::size_t y = 0; y < m; ++y) w[x * m + y] /= sum;
  }
  kernel_ = SubKernel(kernel.dom(), kernel.cod(), std::move(w), slack);
}

namespace {

std::string pointedName(const FinObject& base) {
  if (base.factorCount() == 1) return base.name() + "+1";
  return "(" + base.name() + ")+1";
}

std::vector<std::string> pointedLabels(const FinObject& base) {
  std::vector<std::string> labels;
  labels.reserve(base.size() + 1);
  for (std::size_t i = 0; i < base.size(); ++i) {
    labels.push_back(base.labelString(i));
    if (labels.back() == PointedObject::kBottom) {
      throw ValidationError("object " + base.name() + " already uses the label ⊥");
    }
  }
  labels.emplace_back(PointedObject::kBottom);
  return labels;
}

}  // namespace

PointedObject::PointedObject(FinObject base)
    : base_(std::move(base)), object_(FinObject::atomic(pointedName(base_), pointedLabels(base_))) {}

TotalKernel toTotal(const SubKernel& f) {
  const PointedObject y(f.cod());
  const std::size_t bottom = y.bottom();
  return TotalKernel(SubKernel::fromFunction(f.dom(), y.object(), [&](std::size_t x, std::size_t j) {
    return j == bottom ? f.failure(x) : f(x, j);
  }));
}

SubKernel fromTotal(const TotalKernel& g, const PointedObject& y) {
  if (!(g.cod() == y.object())) {
    throw CompositionError("expected a kernel into " + y.object().name() + ", got " +
                           g.cod().name());
  }
  return SubKernel::fromFunction(g.dom(), y.base(),
                                 [&](std::size_t x, std::size_t j) { return g(x, j); });
}

TotalKernel kleisliLift(const SubKernel& f) {
  const PointedObject x(f.dom());
  const PointedObject y(f.cod());
  return TotalKernel(SubKernel::fromFunction(x.object(), y.object(), [&](std::size_t i, std::size_t j) {
    if (i == x.bottom()) return j == y.bottom() ? 1.0 : 0.0;
    return j == y.bottom() ? f.failure(i) : f(i, j);
  }));
}

TotalKernel laxator(const FinObject& x, const FinObject& y) {
  const PointedObject px(x);
  const PointedObject py(y);
  const PointedObject pxy(tensor(x, y));
  const std::size_t ny1 = y.size() + 1;
  return TotalKernel(deterministic(tensor(px.object(), py.object()), pxy.object(),
                                   [&](std::size_t i) -> std::optional<std::size_t> {
                                     const std::size_t a = i / ny1;
                                     const std::size_t b = i % ny1;
                                     if (a == px.bottom() || b == py.bottom()) return pxy.bottom();
                                     return a * y.size() + b;
                                   }));
}

TotalKernel oplaxator(const FinObject& x, const FinObject& y) {
  const PointedObject pxy(tensor(x, y));
  const SubKernel joint = identity(tensor(x, y));
  const SubKernel pi1 = project(joint, x.factorCount(), Side::first);
  const SubKernel pi2 = project(joint, x.factorCount(), Side::second);
  return TotalKernel(compose(copy(pxy.object()),
                             tensor(kleisliLift(pi1).kernel(), kleisliLift(pi2).kernel())));
}

TotalKernel distributiveLaw(const FinObject& x, const std::optional<SubKernel>& sigma) {
  const PointedObject px(x);
  if (!sigma) return TotalKernel(point(px.object(), px.bottom()));
  if (!sigma->dom().isUnit() || !(sigma->cod() == x)) {
    throw CompositionError("distributive law expects a state on " + x.name());
  }
  if (!isTotal(*sigma)) throw ValidationError("distributive law expects a distribution");
  return TotalKernel(SubKernel::fromFunction(FinObject::unit(), px.object(), [&](std::size_t, std::size_t j) {
    return j == px.bottom() ? 0.0 : (*sigma)(0, j);
  }));
}

SubKernel strongKleisliExtend(const SubKernel& g, std::size_t split) {
  auto [x, y] = g.dom().split(split);
  const PointedObject py(y);
  const std::size_t ny = y.size();
  return SubKernel::fromFunction(tensor(x, py.object()), g.cod(), [&](std::size_t i, std::size_t z) {
    const std::size_t xi = i / (ny + 1);
    const std::size_t yi = i % (ny + 1);
    return yi == py.bottom() ? 0.0 : g(xi * ny + yi, z);
  });
}

SubKernel splitConditional(const SubKernel& g, const FinObject& x, const PointedObject& y) {
  if (!(g.dom() == tensor(x, y.object()))) {
    throw CompositionError("expected a kernel from " + tensor(x, y.object()).name() + ", got " +
                           g.dom().name());
  }
  const std::size_t ny = y.base().size();
  return SubKernel::fromFunction(tensor(x, y.base()), g.cod(), [&](std::size_t i, std::size_t z) {
    return g((i / ny) * (ny + 1) + i % ny, z);
  });
}

TotalKernel stochConditional(const TotalKernel& f, std::size_t split, const Tolerances& tol) {
  auto [y, z] = f.cod().split(split);
  const std::size_t ny = y.size();
  const std::size_t nz = z.size();
  std::vector<double> w(f.dom().size() * ny * nz);
  for (std::size_t x = 0; x < f.dom().size(); ++x) {
    for (std::size_t b = 0; b < ny; ++b) {
      double marginal = 0.0;
      for (std::size_t c = 0; c < nz; ++c) marginal += f(x, b * nz + c);
      double* out = w.data() + (x * ny + b) * nz;
      for (std::size_t c = 0; c < nz; ++c) {
        out[c] = marginal > tol.zero_mass_tol ? f(x, b * nz + c) / marginal
                                              : 1.0 / static_cast<double>(nz);
      }
    }
  }
  return TotalKernel(SubKernel(tensor(f.dom(), y), z, std::move(w), tol.validation_slack),
                     tol.validation_slack);
}

SubKernel conditionalViaBase(const SubKernel& f, std::size_t split, const Tolerances& tol) {
  auto [y, z] = f.cod().split(split);
  const PointedObject py(y);
  const PointedObject pz(z);
  const TotalKernel spread(compose(toTotal(f).kernel(), oplaxator(y, z).kernel()));
  const TotalKernel base = stochConditional(spread, 1, tol);
  const TotalKernel restricted(splitConditional(base.kernel(), f.dom(), py));
  return fromTotal(restricted, pz);
}

}  // namespace pmc
