#include "pmc/density.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace pmc::density {

DensityState DensityState::uniform(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ValidationError("uniform density needs a finite interval with a < b");
  }
  DensityState s;
  s.kind_ = Kind::uniform;
  s.p1_ = a;
  s.p2_ = b;
  return s;
}

DensityState DensityState::normal(double mu, double sigma) {
  if (!(sigma > 0) || !std::isfinite(mu) || !std::isfinite(sigma)) {
    throw ValidationError("normal density needs a finite mean and sigma > 0");
  }
  DensityState s;
  s.kind_ = Kind::normal;
  s.p1_ = mu;
  s.p2_ = sigma;
  return s;
}

DensityState DensityState::grid(std::vector<double> xs, std::vector<double> pdf) {
  if (xs.size() < 2 || xs.size() != pdf.size()) {
    throw ValidationError("grid density needs at least two points and matching values");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(pdf[i]) || pdf[i] < 0) {
      throw ValidationError("grid density values must be finite and nonnegative");
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) throw ValidationError("grid points must increase");
  }
  DensityState s;
  s.kind_ = Kind::grid;
  s.xs_ = std::move(xs);
  s.values_ = std::move(pdf);
  return s;
}

double DensityState::pdf(double x) const {
  switch (kind_) {
    case Kind::uniform: return x >= p1_ && x <= p2_ ? 1.0 / (p2_ - p1_) : 0.0;
    case Kind::normal: return normalPdf((x - p1_) / p2_) / p2_;
    case Kind::grid: {
      if (x < xs_.front() || x > xs_.back()) return 0.0;
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      if (it == xs_.end()) return values_.back();
      const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
      const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return (1 - t) * values_[i - 1] + t * values_[i];
    }
  }
  return 0.0;
}

Interval DensityState::support() const {
  switch (kind_) {
    case Kind::uniform: return {p1_, p2_};
    case Kind::normal: return {p1_ - kNormalTruncation * p2_, p1_ + kNormalTruncation * p2_};
    case Kind::grid: return {xs_.front(), xs_.back()};
  }
  return {};
}

DensityChannel DensityChannel::normalMean(double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ValidationError("channel sigma must be > 0");
  DensityChannel c;
  c.sigma_ = sigma;
  return c;
}

double DensityChannel::pdf(double y, double x) const {
  return normalPdf((y - x) / sigma_) / sigma_;
}

void QuadratureSpec::validate() const {
  if (n < 3 || n % 2 == 0) throw ValidationError("quadrature needs an odd number of points >= 3");
  if (!(quad_tol > 0)) throw ValidationError("quadrature tolerance must be positive");
}

double normalPdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double simpson(const std::vector<double>& values, double step) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) throw ValidationError("Simpson rule needs an odd number of points >= 3");
  double sum = values.front() + values.back();
  for (std::size_t i = 1; i + 1 < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * values[i];
  return sum * step / 3.0;
}

namespace {

std::vector<double> gridPoints(Interval s, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double step = (s.hi - s.lo) / (n - 1);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = s.lo + step * i;
  xs.back() = s.hi;
  return xs;
}

std::vector<double> sample(const std::function<double(double)>& f, const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = f(xs[i]);
    if (!std::isfinite(out[i])) {
      std::ostringstream msg;
      msg << "non-finite integrand at " << xs[i];
      throw NumericError(msg.str());
    }
  }
  return out;
}

std::vector<double> joint(const DensityState& prior, const DensityChannel& channel, double v,
                          const std::vector<double>& xs) {
  return sample([&](double m) { return prior.pdf(m) * channel.pdf(v, m); }, xs);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 3 || n % 2 == 0) throw ValidationError("Simpson rule needs an odd number of points >= 3");
  return simpson(sample(f, gridPoints({a, b}, n)), (b - a) / (n - 1));
}

double evidenceDensity(const DensityState& prior, const DensityChannel& channel, double v,
                       const QuadratureSpec& q) {
  q.validate();
  if (!std::isfinite(v)) throw NumericError("observation must be finite");
  const Interval s = prior.support();
  return simpson(joint(prior, channel, v, gridPoints(s, q.n)), (s.hi - s.lo) / (q.n - 1));
}

DensityState posteriorExact(const DensityState& prior, const DensityChannel& channel, double v,
                            const QuadratureSpec& q) {
  q.validate();
  const Interval s = prior.support();
  std::vector<double> xs = gridPoints(s, q.n);
  std::vector<double> w = joint(prior, channel, v, xs);
  const double evidence = simpson(w, (s.hi - s.lo) / (q.n - 1));
  if (!(evidence > q.quad_tol)) {
    std::ostringstream msg;
    msg << "evidence " << evidence << " for v = " << v << " is zero; cannot renormalize";
    throw NumericError(msg.str());
  }
  for (double& x : w) x /= evidence;
  return DensityState::grid(std::move(xs), std::move(w));
}

InversionDensity::InversionDensity(DensityState prior, DensityChannel channel, QuadratureSpec q)
    : prior_(std::move(prior)), channel_(channel), q_(q) {
  q_.validate();
}

double InversionDensity::operator()(double m, double v) const { return at(v)(m); }

std::function<double(double)> InversionDensity::at(double v) const {
  const double evidence = evidenceDensity(prior_, channel_, v, q_);
  if (!(evidence > q_.quad_tol)) {
    std::ostringstream msg;
    msg << "evidence " << evidence << " for v = " << v << " is zero; cannot renormalize";
    throw NumericError(msg.str());
  }
  return [prior = prior_, channel = channel_, v, evidence](double m) {
    return channel.pdf(v, m) * prior.pdf(m) / evidence;
  };
}

DensityState posteriorViaInversion(const DensityState& prior, const DensityChannel& channel,
                                   double v, const QuadratureSpec& q) {
  const auto section = InversionDensity(prior, channel, q).at(v);
  std::vector<double> xs = gridPoints(prior.support(), q.n);
  std::vector<double> pdf = sample(section, xs);
  return DensityState::grid(std::move(xs), std::move(pdf));
}

std::function<double(double)> truncatedNormalOracle(double a, double b, double sigma, double v) {
  if (!(a < b)) throw ValidationError("degenerate truncation interval");
  if (!(sigma > 0)) throw ValidationError("sigma must be positive");
  const double mass = normalCdf((b - v) / sigma) - normalCdf((a - v) / sigma);
  if (!(mass > 0)) throw NumericError("truncated normal has no mass on the interval");
  return [=](double m) {
    if (m < a || m > b) return 0.0;
    return normalPdf((m - v) / sigma) / (sigma * mass);
  };
}

std::string formatValue(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void writePosteriorCSV(std::ostream& out, const DensityState& prior, const DensityChannel& channel,
                       const std::vector<double>& vs, const QuadratureSpec& q) {
  q.validate();
  out << "m";
  for (double v : vs) out << ",pdf_v" << formatValue(v);
  out << '\n';
  if (vs.empty()) return;
  std::vector<DensityState> posts;
  posts.reserve(vs.size());
  for (double v : vs) posts.push_back(posteriorExact(prior, channel, v, q));
  const auto& xs = posts.front().xs();
  char buf[64];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
    out << buf;
    for (const auto& p : posts) {
      std::snprintf(buf, sizeof buf, "%.17g", p.values()[i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void emitPosteriorCSV(const DensityState& prior, const DensityChannel& channel,
                      const std::vector<double>& vs, const QuadratureSpec& q,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  writePosteriorCSV(out, prior, channel, vs, q);
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace pmc::density
