#pragma once

// One-dimensional density states and channels, posterior densities for an
// exact observation, and composite Simpson quadrature.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pmc/kernel.hpp"

namespace pmc::density {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Normal densities are integrated over mu ± kNormalTruncation * sigma.
inline constexpr double kNormalTruncation = 8.0;

class DensityState {
 public:
  enum class Kind { uniform, normal, grid };

  static DensityState uniform(double a, double b);
  static DensityState normal(double mu, double sigma);
  /// Piecewise-linear density through (xs[i], pdf[i]); zero outside [xs.front(), xs.back()].
  static DensityState grid(std::vector<double> xs, std::vector<double> pdf);

  Kind kind() const { return kind_; }
  double pdf(double x) const;
  Interval support() const;

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Kind kind_ = Kind::uniform;
  double p1_ = 0.0;  // a or mu
  double p2_ = 1.0;  // b or sigma
  std::vector<double> xs_;
  std::vector<double> values_;
};

/// x ↦ Normal(x, sigma).
class DensityChannel {
 public:
  static DensityChannel normalMean(double sigma);

  double pdf(double y, double x) const;
  double sigma() const { return sigma_; }

 private:
  double sigma_ = 1.0;
};

struct QuadratureSpec {
  int n = 2001;
  double quad_tol = 1e-8;

  void validate() const;
};

double normalPdf(double x);
double normalCdf(double x);

/// Composite Simpson rule on `n` equally spaced points (n odd, n >= 3).
double simpson(const std::function<double(double)>& f, double a, double b, int n);
/// Simpson rule over already-sampled equally spaced values.
double simpson(const std::vector<double>& values, double step);

/// Marginal density of observing v under prior ; channel.
double evidenceDensity(const DensityState& prior, const DensityChannel& channel, double v,
                       const QuadratureSpec& q = {});

/// Posterior density of the latent value after observing v exactly, by
/// reweighting the prior with the likelihood and renormalising. Sampled on
/// q.n points spanning the prior support.
DensityState posteriorExact(const DensityState& prior, const DensityChannel& channel, double v,
                            const QuadratureSpec& q = {});

/// Density of the Bayesian inversion of `channel` with respect to `prior`:
/// (m, v) ↦ channel(v|m) prior(m) / ∫ channel(v|m0) prior(m0) dm0.
class InversionDensity {
 public:
  InversionDensity(DensityState prior, DensityChannel channel, QuadratureSpec q = {});

  double operator()(double m, double v) const;
  /// The section m ↦ pdf(m | v), with the evidence integral computed once.
  std::function<double(double)> at(double v) const;

 private:
  DensityState prior_;
  DensityChannel channel_;
  QuadratureSpec q_;
};

/// Same posterior as posteriorExact, obtained by evaluating the inversion
/// density at the observed point.
DensityState posteriorViaInversion(const DensityState& prior, const DensityChannel& channel,
                                   double v, const QuadratureSpec& q = {});

/// Normal(v, sigma) truncated to [a, b], in closed form via erf.
std::function<double(double)> truncatedNormalOracle(double a, double b, double sigma, double v);

/// CSV with a column m and one column pdf_v<value> per observation.
void writePosteriorCSV(std::ostream& out, const DensityState& prior, const DensityChannel& channel,
                       const std::vector<double>& vs, const QuadratureSpec& q = {});
void emitPosteriorCSV(const DensityState& prior, const DensityChannel& channel,
                      const std::vector<double>& vs, const QuadratureSpec& q,
                      const std::string& path);

/// Shortest round-trip decimal form of v, used in CSV headers.
std::string formatValue(double v);

}  // namespace pmc::density
