#include "pmc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pmc {

void Tolerances::validate() const {
  if (!(law_tol > 0) || !(validation_slack > 0) || !(zero_mass_tol > 0)) {
    throw ValidationError("tolerances must be strictly positive");
  }
  if (zero_mass_tol > law_tol) {
    throw ValidationError("zero_mass_tol must not exceed law_tol");
  }
}

// ---------------------------------------------------------------------------
// Objects

Atom::Atom(std::string name_, std::vector<std::string> labels_)
    : name(std::move(name_)), labels(std::move(labels_)) {
  if (labels.empty()) {
    throw ValidationError("object '" + name + "' has no labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) {
      throw ValidationError("object '" + name + "' has an empty label");
    }
    if (!index.emplace(labels[i], i).second) {
      throw ValidationError("object '" + name + "' repeats label '" + labels[i] + "'");
    }
  }
}

FinObject FinObject::atomic(std::string name, std::vector<std::string> labels) {
  FinObject x;
  auto atom = std::make_shared<const Atom>(std::move(name), std::move(labels));
  x.size_ = atom->labels.size();
  x.atoms_.push_back(std::move(atom));
  return x;
}

Label FinObject::label(std::size_t index) const {
  if (index >= size_) {
    throw ValidationError("label index out of range for object " + name());
  }
  Label out(atoms_.size());
  for (std::size_t k = atoms_.size(); k-- > 0;) {
    const auto& labels = atoms_[k]->labels;
    out[k] = labels[index % labels.size()];
    index /= labels.size();
  }
  return out;
}

std::string FinObject::labelString(std::size_t index) const {
  const Label l = label(index);
  if (l.size() == 1) return l.front();
  std::string out = "(";
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (i) out += ',';
    out += l[i];
  }
  out += ')';
  return out;
}

std::optional<std::size_t> FinObject::find(const Label& label) const {
  if (label.size() != atoms_.size()) return std::nullopt;
  std::size_t index = 0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    auto it = atoms_[k]->index.find(label[k]);
    if (it == atoms_[k]->index.end()) return std::nullopt;
    index = index * atoms_[k]->labels.size() + it->second;
  }
  return index;
}

std::optional<std::size_t> FinObject::findString(std::string_view text) const {
  if (atoms_.size() == 1) {
    auto it = atoms_[0]->index.find(std::string(text));
    if (it != atoms_[0]->index.end()) return it->second;
    return std::nullopt;
  }
  for (std::size_t i = 0; i < size_; ++i) {
    if (labelString(i) == text) return i;
  }
  return std::nullopt;
}

std::size_t FinObject::indexOf(const Label& label) const {
  if (auto i = find(label)) return *i;
  std::string text;
  for (std::size_t i = 0; i < label.size(); ++i) text += (i ? "," : "") + label[i];
  throw ValidationError("unknown label (" + text + ") for object " + name());
}

std::string FinObject::name() const {
  if (atoms_.empty()) return "I";
  std::string out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) out += '*';
    out += atoms_[i]->name;
  }
  return out;
}

std::pair<FinObject, FinObject> FinObject::split(std::size_t k) const {
  if (k > atoms_.size()) {
    throw ValidationError("cannot split " + name() + " after " + std::to_string(k) +
                          " factors");
  }
  FinObject left;
  FinObject right;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    FinObject& side = i < k ? left : right;
    side.atoms_.push_back(atoms_[i]);
    side.size_ *= atoms_[i]->labels.size();
  }
  return {left, right};
}

FinObject FinObject::factor(std::size_t i) const {
  if (i >= atoms_.size()) throw ValidationError("factor index out of range");
  FinObject x;
  x.atoms_.push_back(atoms_[i]);
  x.size_ = atoms_[i]->labels.size();
  return x;
}

FinObject tensor(const FinObject& a, const FinObject& b) {
  FinObject out = a;
  out.atoms_.insert(out.atoms_.end(), b.atoms_.begin(), b.atoms_.end());
  out.size_ = a.size_ * b.size_;
  return out;
}

bool FinObject::operator==(const FinObject& other) const {
  if (size_ != other.size_ || atoms_.size() != other.atoms_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i] != other.atoms_[i] && !(*atoms_[i] == *other.atoms_[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Kernels

SubKernel::SubKernel(FinObject dom, FinObject cod, std::vector<double> weights,
                     double validation_slack)
    : dom_(std::move(dom)), cod_(std::move(cod)), weights_(std::move(weights)) {
  const std::size_t n = dom_.size();
  const std::size_t m = cod_.size();
  if (weights_.size() != n * m) {
    std::ostringstream msg;
    msg << "kernel " << dom_.name() << " -> " << cod_.name() << " expects " << n * m
        << " weights, got " << weights_.size();
    throw ValidationError(msg.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double& w = weights_[i * m + j];
      if (!std::isfinite(w)) {
        throw ValidationError("non-finite weight in row " + dom_.labelString(i));
      }
      if (w < 0.0) {
        if (w < -validation_slack) {
          std::ostringstream msg;
          msg << "negative weight " << w << " at (" << dom_.labelString(i) << ", "
              << cod_.labelString(j) << ")";
          throw ValidationError(msg.str());
        }
        w = 0.0;
      }
      sum += w;
    }
    if (sum > 1.0 + validation_slack) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << dom_.labelString(i) << " sums to " << sum << " > 1";
      throw ValidationError(msg.str());
    }
    if (sum > 1.0) {
      for (std::size_t j = 0; j < m; ++j) weights_[i * m + j] /= sum;
    }
  }
}

SubKernel SubKernel::zero(FinObject dom, FinObject cod) {
  std::vector<double> w(dom.size() * cod.size(), 0.0);
  return SubKernel(std::move(dom), std::move(cod), std::move(w));
}

SubKernel SubKernel::fromFunction(FinObject dom, FinObject cod,
                                  const std::function<double(std::size_t, std::size_t)>& weight,
                                  double validation_slack) {
  const std::size_t n = dom.size();
  const std::size_t m = cod.size();
  std::vector<double> w(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) w[i * m + j] = weight(i, j);
  }
  return SubKernel(std::move(dom), std::move(cod), std::move(w), validation_slack);
}

double SubKernel::rowSum(std::size_t in) const {
  const auto r = row(in);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

double SubKernel::failure(std::size_t in) const { return std::max(0.0, 1.0 - rowSum(in)); }

double SubKernel::scalar() const {
  if (!dom_.isUnit() || !cod_.isUnit()) {
    throw CompositionError("not a scalar: " + dom_.name() + " -> " + cod_.name());
  }
  return weights_[0];
}

// ---------------------------------------------------------------------------
// Structural morphisms

SubKernel deterministic(const FinObject& dom, const FinObject& cod,
                        const std::function<std::optional<std::size_t>(std::size_t)>& map) {
  std::vector<double> w(dom.size() * cod.size(), 0.0);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (auto j = map(i)) w[i * cod.size() + *j] = 1.0;
  }
  return SubKernel(dom, cod, std::move(w));
}

SubKernel identity(const FinObject& x) {
  return deterministic(x, x, [](std::size_t i) { return i; });
}

SubKernel copy(const FinObject& x) {
  const std::size_t n = x.size();
  return deterministic(x, tensor(x, x), [n](std::size_t i) { return i * n + i; });
}

SubKernel discard(const FinObject& x) {
  return deterministic(x, FinObject::unit(), [](std::size_t) { return std::size_t{0}; });
}

SubKernel swap(const FinObject& x, const FinObject& y) {
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  return deterministic(tensor(x, y), tensor(y, x),
                       [nx, ny](std::size_t i) { return (i % ny) * nx + i / ny; });
}

SubKernel compare(const FinObject& x) {
  const std::size_t n = x.size();
  return deterministic(tensor(x, x), x, [n](std::size_t i) -> std::optional<std::size_t> {
    if (i / n == i % n) return i / n;
    return std::nullopt;
  });
}

SubKernel observe(const FinObject& x, std::size_t index) {
  if (index >= x.size()) throw ValidationError("observed label out of range for " + x.name());
  return deterministic(x, FinObject::unit(), [index](std::size_t i) -> std::optional<std::size_t> {
    if (i == index) return 0;
    return std::nullopt;
  });
}

SubKernel observe(const FinObject& x, const Label& label) { return observe(x, x.indexOf(label)); }

SubKernel point(const FinObject& x, std::size_t index) {
  if (index >= x.size()) throw ValidationError("point label out of range for " + x.name());
  return deterministic(FinObject::unit(), x, [index](std::size_t) { return index; });
}

SubKernel point(const FinObject& x, const Label& label) { return point(x, x.indexOf(label)); }

SubKernel scalar(double value) {
  return SubKernel(FinObject::unit(), FinObject::unit(), {value});
}

// ---------------------------------------------------------------------------
// Composition

SubKernel compose(const SubKernel& f, const SubKernel& g) {
  if (!(f.cod() == g.dom())) {
    throw CompositionError("cannot compose " + f.dom().name() + " -> " + f.cod().name() +
                           " with " + g.dom().name() + " -> " + g.cod().name());
  }
  const std::size_t n = f.rows();
  const std::size_t m = f.cols();
  const std::size_t k = g.cols();
  std::vector<double> w(n * k, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      const double fy = f(x, y);
      if (fy == 0.0) continue;
      for (std::size_t z = 0; z < k; ++z) w[x * k + z] += fy * g(y, z);
    }
  }
  return SubKernel(f.dom(), g.cod(), std::move(w));
}

SubKernel tensor(const SubKernel& f, const SubKernel& g) {
  const std::size_t n1 = f.rows(), m1 = f.cols();
  const std::size_t n2 = g.rows(), m2 = g.cols();
  std::vector<double> w(n1 * n2 * m1 * m2);
  const std::size_t cols = m1 * m2;
  for (std::size_t x1 = 0; x1 < n1; ++x1) {
    for (std::size_t x2 = 0; x2 < n2; ++x2) {
      double* out = w.data() + (x1 * n2 + x2) * cols;
      for (std::size_t y1 = 0; y1 < m1; ++y1) {
        const double a = f(x1, y1);
        for (std::size_t y2 = 0; y2 < m2; ++y2) out[y1 * m2 + y2] = a * g(x2, y2);
      }
    }
  }
  return SubKernel(tensor(f.dom(), g.dom()), tensor(f.cod(), g.cod()), std::move(w));
}

SubKernel project(const SubKernel& f, std::size_t split, Side side) {
  if (split > f.cod().factorCount()) {
    throw ValidationError("codomain " + f.cod().name() + " cannot be split after " +
                          std::to_string(split) + " factors");
  }
  auto [y, z] = f.cod().split(split);
  const std::size_t nz = z.size();
  const FinObject& kept = side == Side::first ? y : z;
  std::vector<double> w(f.rows() * kept.size(), 0.0);
  for (std::size_t x = 0; x < f.rows(); ++x) {
    for (std::size_t j = 0; j < f.cols(); ++j) {
      const std::size_t out = side == Side::first ? j / nz : j % nz;
      w[x * kept.size() + out] += f(x, j);
    }
  }
  return SubKernel(f.dom(), kept, std::move(w));
}

SubKernel graph(const SubKernel& f) {
  const std::size_t ny = f.cols();
  const FinObject cod = tensor(f.dom(), f.cod());
  return SubKernel::fromFunction(f.dom(), cod, [&](std::size_t x, std::size_t j) {
    return j / ny == x ? f(x, j % ny) : 0.0;
  });
}

SubKernel condComp(const SubKernel& f, const SubKernel& g) {
  const FinObject expected = tensor(f.dom(), f.cod());
  if (!(g.dom() == expected)) {
    throw CompositionError("conditional composition expects a second morphism from " +
                           expected.name() + ", got " + g.dom().name());
  }
  const std::size_t na = f.cols();
  const std::size_t nb = g.cols();
  const FinObject cod = tensor(f.cod(), g.cod());
  return SubKernel::fromFunction(f.dom(), cod, [&](std::size_t x, std::size_t j) {
    const std::size_t a = j / nb;
    return f(x, a) * g(x * na + a, j % nb);
  });
}

// ---------------------------------------------------------------------------
// Predicates

bool isTotal(const SubKernel& f, double tol) {
  for (std::size_t x = 0; x < f.rows(); ++x) {
    if (std::abs(f.rowSum(x) - 1.0) > tol) return false;
  }
  return true;
}

bool isDeterministic(const SubKernel& f, double tol) {
  // f ; copy == copy ; (f * f), compared entrywise without building either side.
  for (std::size_t x = 0; x < f.rows(); ++x) {
    for (std::size_t y = 0; y < f.cols(); ++y) {
      const double a = f(x, y);
      for (std::size_t y2 = 0; y2 < f.cols(); ++y2) {
        const double lhs = y == y2 ? a : 0.0;
        if (std::abs(lhs - a * f(x, y2)) > tol) return false;
      }
    }
  }
  return true;
}

SubKernel domainOfDefinition(const SubKernel& f) { return compose(f, discard(f.cod())); }

bool hasDeterministicDomain(const SubKernel& f, double tol) {
  for (std::size_t x = 0; x < f.rows(); ++x) {
    const double s = f.rowSum(x);
    if (std::abs(s) > tol && std::abs(s - 1.0) > tol) return false;
  }
  return true;
}

double maxAbsDiff(const SubKernel& f, const SubKernel& g) {
  if (!(f.dom() == g.dom()) || !(f.cod() == g.cod())) {
    throw CompositionError("cannot compare " + f.dom().name() + " -> " + f.cod().name() +
                           " with " + g.dom().name() + " -> " + g.cod().name());
  }
  double d = 0.0;
  for (std::size_t i = 0; i < f.weights().size(); ++i) {
    d = std::max(d, std::abs(f.weights()[i] - g.weights()[i]));
  }
  return d;
}

bool approxEqual(const SubKernel& f, const SubKernel& g, double tol) {
  return maxAbsDiff(f, g) <= tol;
}

bool asEqual(const SubKernel& f, const SubKernel& g1, const SubKernel& g2, double tol) {
  const FinObject expected = tensor(f.cod(), f.dom());
  if (!(g1.dom() == expected) || !(g2.dom() == expected)) {
    throw CompositionError("almost-sure comparison expects morphisms from " + expected.name());
  }
  const SubKernel reorder = swap(f.dom(), f.cod());
  return approxEqual(condComp(f, compose(reorder, g1)), condComp(f, compose(reorder, g2)), tol);
}

}  // namespace pmc
