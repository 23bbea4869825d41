#include "polling/distributions.hpp"

#include <cmath>
#include <sstream>

namespace polling {

DistributionSpec DistributionSpec::deterministic(double v) {
  DistributionSpec s;
  s.kind = DistKind::Deterministic;
  s.value = v;
  return s;
}

DistributionSpec DistributionSpec::uniform_by_mean(double m) {
  DistributionSpec s;
  s.kind = DistKind::UniformByMean;
  s.mean = m;
  return s;
}

DistributionSpec DistributionSpec::exponential(double m) {
  DistributionSpec s;
  s.kind = DistKind::Exponential;
  s.mean = m;
  return s;
}

DistributionSpec DistributionSpec::pareto(double xmin, double shape) {
  DistributionSpec s;
  s.kind = DistKind::ParetoDensity;
  s.xmin = xmin;
  s.shape = shape;
  return s;
}

DistributionSpec DistributionSpec::weibull(double shape, double mean) {
  DistributionSpec s;
  s.kind = DistKind::Weibull;
  s.shape = shape;
  s.mean = mean;
  return s;
}

DistributionSpec DistributionSpec::two_point(double x1, double p1, double x2) {
  DistributionSpec s;
  s.kind = DistKind::TwoPoint;
  s.x1 = x1;
  s.p1 = p1;
  s.x2 = x2;
  return s;
}

const char* dist_kind_name(DistKind k) {
  switch (k) {
    case DistKind::Deterministic: return "deterministic";
    case DistKind::UniformByMean: return "uniform";
    case DistKind::Exponential: return "exponential";
    case DistKind::ParetoDensity: return "pareto";
    case DistKind::Weibull: return "weibull";
    case DistKind::TwoPoint: return "two_point";
  }
  return "?";
}

std::vector<std::string> spec_violations(const DistributionSpec& s) {
  std::vector<std::string> v;
  auto bad = [&](const std::string& m) { v.push_back(m); };
  switch (s.kind) {
    case DistKind::Deterministic:
      if (!(s.value >= 0) || !std::isfinite(s.value)) bad("deterministic value must be finite and >= 0");
      break;
    case DistKind::UniformByMean:
      if (!(s.mean > 0) || !std::isfinite(s.mean)) bad("uniform mean must be finite and > 0");
      break;
    case DistKind::Exponential:
      if (!(s.mean > 0) || !std::isfinite(s.mean)) bad("exponential mean must be finite and > 0");
      break;
    case DistKind::ParetoDensity:
      if (!(s.xmin > 0) || !std::isfinite(s.xmin)) bad("pareto xmin must be finite and > 0");
      // shape <= 1 gives an infinite mean; the model needs finite first moments
      if (!(s.shape > 1) || !std::isfinite(s.shape)) bad("pareto shape must be finite and > 1");
      break;
    case DistKind::Weibull:
      if (!(s.shape > 0) || !std::isfinite(s.shape)) bad("weibull shape must be finite and > 0");
      if (!(s.mean > 0) || !std::isfinite(s.mean)) bad("weibull mean must be finite and > 0");
      break;
    case DistKind::TwoPoint:
      if (!(s.x1 >= 0) || !std::isfinite(s.x1)) bad("two_point x1 must be finite and >= 0");
      if (!(s.x2 >= 0) || !std::isfinite(s.x2)) bad("two_point x2 must be finite and >= 0");
      if (!(s.p1 >= 0 && s.p1 <= 1)) bad("two_point p1 must lie in [0,1]");
      break;
  }
  return v;
}

void require_valid(const DistributionSpec& s) {
  auto v = spec_violations(s);
  if (v.empty()) return;
  std::ostringstream os;
  os << dist_kind_name(s.kind) << " spec invalid:";
  for (const auto& m : v) os << " " << m << ";";
  throw Error(Errc::InvalidSpec, os.str());
}

double weibull_scale(double shape_a, double target_mean) {
  if (!(shape_a > 0) || !(target_mean > 0))
    throw Error(Errc::InvalidSpec, "weibull_scale needs shape > 0 and mean > 0");
  return std::pow(std::tgamma(1.0 + 1.0 / shape_a) / target_mean, shape_a);
}

double mean(const DistributionSpec& s) {
  require_valid(s);
  switch (s.kind) {
    case DistKind::Deterministic: return s.value;
    case DistKind::UniformByMean: return s.mean;
    case DistKind::Exponential: return s.mean;
    case DistKind::ParetoDensity: return s.xmin * s.shape / (s.shape - 1.0);
    case DistKind::Weibull: return s.mean;  // exact: the scale is solved for this mean
    case DistKind::TwoPoint: return s.p1 * s.x1 + (1.0 - s.p1) * s.x2;
  }
  return 0;
}

double moment(const DistributionSpec& s, int order) {
  if (order < 1) throw Error(Errc::InconsistentInput, "moment order must be >= 1");
  if (order == 1) return mean(s);  // keeps moment(s,1) == mean(s) exact
  require_valid(s);
  const double k = order;
  switch (s.kind) {
    case DistKind::Deterministic:
      return std::pow(s.value, k);
    case DistKind::UniformByMean:
      return std::pow(2.0 * s.mean, k) / (k + 1.0);
    case DistKind::Exponential:
      return std::tgamma(k + 1.0) * std::pow(s.mean, k);
    case DistKind::ParetoDensity:
      if (k >= s.shape) {
        std::ostringstream os;
        os << "pareto moment " << order << " infinite (shape " << s.shape << ")";
        throw Error(Errc::MomentInfinite, os.str());
      }
      return std::pow(s.xmin, k) * s.shape / (s.shape - k);
    case DistKind::Weibull: {
      const double b = weibull_scale(s.shape, s.mean);
      return std::tgamma(1.0 + k / s.shape) * std::pow(b, -k / s.shape);
    }
    case DistKind::TwoPoint:
      return s.p1 * std::pow(s.x1, k) + (1.0 - s.p1) * std::pow(s.x2, k);
  }
  return 0;
}

Sampler::Sampler(const DistributionSpec& s) : spec_(s) {
  require_valid(s);
  switch (s.kind) {
    case DistKind::Deterministic:
      a_ = s.value;
      break;
    case DistKind::UniformByMean:
      a_ = 2.0 * s.mean;
      break;
    case DistKind::Exponential:
      a_ = s.mean;
      break;
    case DistKind::ParetoDensity:
      a_ = s.xmin;
      b_ = -1.0 / s.shape;
      break;
    case DistKind::Weibull:
      a_ = 1.0 / weibull_scale(s.shape, s.mean);
      b_ = 1.0 / s.shape;
      break;
    case DistKind::TwoPoint:
      break;  // sampled straight from the spec fields
  }
}

}  // namespace polling
