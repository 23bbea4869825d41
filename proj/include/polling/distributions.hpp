#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "polling/errors.hpp"

namespace polling {

// The six families the toolkit knows how to sample. Everything is
// parameterized so that the mean is either stored directly or trivially
// recoverable; model formulas work in means throughout, which keeps the
// degenerate cases (zero service time, zero switchover) representable.
enum class DistKind {
  Deterministic,   // point mass at value (value 0 allowed: instant events)
  UniformByMean,   // uniform on (0, 2*mean)
  Exponential,     // mean given
  ParetoDensity,   // density shape*xmin^shape / x^(shape+1) on [xmin, inf)
  Weibull,         // given shape a and target mean; scale solved internally
  TwoPoint,        // x1 w.p. p1, else x2
};

struct DistributionSpec {
  DistKind kind = DistKind::Deterministic;
  double value = 0;              // Deterministic
  double mean = 0;               // UniformByMean, Exponential, Weibull
  double xmin = 0, shape = 0;    // ParetoDensity; shape also used by Weibull
  double x1 = 0, p1 = 0, x2 = 0; // TwoPoint

  static DistributionSpec deterministic(double v);
  static DistributionSpec uniform_by_mean(double m);
  static DistributionSpec exponential(double m);
  static DistributionSpec pareto(double xmin, double shape);
  static DistributionSpec weibull(double shape, double mean);
  static DistributionSpec two_point(double x1, double p1, double x2);
};

// Structural problems with a spec (negative mean, probability outside [0,1],
// Pareto shape <= 1, ...). Empty result means the spec is usable.
std::vector<std::string> spec_violations(const DistributionSpec& s);
void require_valid(const DistributionSpec& s);  // throws Error{InvalidSpec}

// Exact first moment. For Weibull this is the stored target mean, which is
// exact by construction of the scale.
double mean(const DistributionSpec& s);

// Exact k-th moment (k >= 1). Throws Error{MomentInfinite} when the moment
// does not exist (Pareto with order >= shape). moment(s, 1) == mean(s).
double moment(const DistributionSpec& s, int order);

// Scale b of a Weibull law with shape a whose mean equals target_mean:
// b = (Gamma(1 + 1/a) / target_mean)^a, for the parameterization with
// distribution function 1 - exp(-b x^a).
double weibull_scale(double shape_a, double target_mean);

// Precomputed inverse-transform sampler. Sampling is a pure function of the
// spec and the uniform draw, so identical (spec, u) pairs give bit-identical
// samples; that is what makes common-random-number sweeps work.
class Sampler {
 public:
  Sampler() = default;
  explicit Sampler(const DistributionSpec& s);

  double operator()(double u) const {
    switch (spec_.kind) {
      case DistKind::Deterministic:
        return a_;
      case DistKind::UniformByMean:
        return a_ * u;  // a_ = 2*mean
      case DistKind::Exponential:
        return -a_ * std::log1p(-u);
      case DistKind::ParetoDensity:
        return a_ * std::pow(1.0 - u, b_);  // b_ = -1/shape
      case DistKind::Weibull:
        return std::pow(-std::log1p(-u) * a_, b_);  // a_ = 1/scale, b_ = 1/shape
      case DistKind::TwoPoint:
        return u < spec_.p1 ? spec_.x1 : spec_.x2;
    }
    return 0;  // unreachable
  }

  const DistributionSpec& spec() const { return spec_; }

 private:
  DistributionSpec spec_{};
  double a_ = 0, b_ = 0;
};

const char* dist_kind_name(DistKind k);

}  // namespace polling
