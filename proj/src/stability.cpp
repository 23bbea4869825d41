#include "polling/stability.hpp"

#include <algorithm>
#include <cmath>

namespace polling {

namespace {

enum class Rel { Below, Boundary, Above };

Rel relate(double lhs, double threshold, double band) {
  if (lhs < threshold * (1.0 - band)) return Rel::Below;
  if (lhs > threshold * (1.0 + band)) return Rel::Above;
  return Rel::Boundary;
}

void reject_saturated(const DerivedQuantities& d, const char* op) {
  for (int k = 0; k < 3; ++k)
    if (d.saturated[k])
      throw Error(Errc::SaturatedModelRejected,
                  std::string(op) + ": stability of a model with a saturated queue is undefined");
}

}  // namespace

const char* verdict_kind_name(VerdictKind v) {
  switch (v) {
    case VerdictKind::Stable: return "stable";
    case VerdictKind::Unstable: return "unstable";
    case VerdictKind::Indeterminate: return "indeterminate";
  }
  return "?";
}

// The six condition left-hand sides, all of the form
//   total load + (extra work per admitted customer) * (walking overhead rate).
//
// For queue 2 the overhead of one admission cycle is the full standard walk;
// for queues 1 and 3 the adaptive skip makes the effective cycle a coin flip
// between the standard and reduced walks, plus the queue-2 term it drags in.
// The sufficient (stability) versions take the better of the two available
// bounds for queues 1 and 3; the necessary (instability) versions use the
// averaged-walk form with the queue-2 admissions also capped by their limit.
StabilityVerdict check_limited(const DerivedQuantities& d, const std::array<int, 3>& limits) {
  reject_saturated(d, "check_limited");
  if (d.discipline != Discipline::Limited)
    throw Error(Errc::NotLimitedDiscipline, "check_limited: parameters use a non-limited discipline");
  for (int k = 0; k < 3; ++k)
    if (limits[k] < 1) throw Error(Errc::InvalidParams, "check_limited: limits must be >= 1");

  const double rho = d.total_load;
  const double walk_s = d.standard_walk_mean;   // full cycle walking mean
  const double walk_r = d.reduced_walk_mean;    // shortcut cycle walking mean
  const double walk_avg = 0.5 * (walk_s + walk_r);
  const double walk_gap = 0.5 * (walk_s - walk_r);
  const auto& lam = d.arrival_rate;

  const double per_adm2 = lam[1] / limits[1];  // queue-2 admission rate per unit limit

  StabilityVerdict v;
  v.boundary_band = kBoundaryBand;

  const double s_q2 = rho + per_adm2 * walk_s;
  const double u_q2 = s_q2;  // same expression on both sides of the threshold

  std::array<double, 3> s_other{}, u_other{};
  for (int j : {0, 2}) {
    const double per_admj = lam[j] / limits[j];
    s_other[j] = rho + std::min(per_admj * walk_avg + lam[1] * walk_gap, per_admj * walk_s);
    u_other[j] = rho + per_admj * walk_avg + per_adm2 * walk_gap;
  }

  auto push = [&](std::string name, double lhs, bool is_stable_row) {
    Rel r = relate(lhs, 1.0, kBoundaryBand);
    bool holds = is_stable_row ? (r == Rel::Below) : (r != Rel::Below);
    v.conditions.push_back({std::move(name), lhs, 1.0, holds});
    return r;
  };

  const Rel rs1 = push("stable.q2", s_q2, true);
  const Rel rs2 = push("stable.q1", s_other[0], true);
  const Rel rs3 = push("stable.q3", s_other[2], true);
  const Rel ru1 = push("unstable.q2", u_q2, false);
  const Rel ru2 = push("unstable.q1", u_other[0], false);
  const Rel ru3 = push("unstable.q3", u_other[2], false);

  if (rs1 == Rel::Below && rs2 == Rel::Below && rs3 == Rel::Below) {
    v.kind = VerdictKind::Stable;
  } else if (ru1 != Rel::Below || ru2 != Rel::Below || ru3 != Rel::Below) {
    v.kind = VerdictKind::Unstable;
    v.transient = (ru1 == Rel::Above || ru2 == Rel::Above || ru3 == Rel::Above);
  } else {
    v.kind = VerdictKind::Indeterminate;
  }
  return v;
}

StabilityVerdict check_gated_exhaustive(const DerivedQuantities& d) {
  reject_saturated(d, "check_gated_exhaustive");

  StabilityVerdict v;
  v.boundary_band = kBoundaryBand;
  const double rho = d.total_load;
  const Rel r = relate(rho, 1.0, kBoundaryBand);
  v.conditions.push_back({"load", rho, 1.0, r == Rel::Below});
  if (r == Rel::Below) {
    v.kind = VerdictKind::Stable;
  } else {
    v.kind = VerdictKind::Unstable;
    v.transient = (r == Rel::Above);
  }
  return v;
}

std::array<double, 3> divergence_rates(const DerivedQuantities& d, const std::array<int, 3>& limits) {
  reject_saturated(d, "divergence_rates");
  for (int k = 0; k < 3; ++k)
    if (limits[k] < 1) throw Error(Errc::InvalidParams, "divergence_rates: limits must be >= 1");

  const double rho = d.total_load;
  const double walk_s = d.standard_walk_mean;
  const double walk_avg = 0.5 * (walk_s + d.reduced_walk_mean);
  const double walk_gap = 0.5 * (walk_s - d.reduced_walk_mean);
  const auto& lam = d.arrival_rate;
  const auto& es = d.mean_service;

  std::array<double, 3> g{};
  // Queue 2 grows at least at the rate its instability margin dictates, with
  // the denominator the mean time one full admission round takes.
  g[1] = limits[1] * (lam[1] / limits[1] * walk_s - 1.0 + rho) / (walk_s + limits[1] * es[1]);
  for (int j : {0, 2}) {
    g[j] = limits[j] *
           (lam[j] / limits[j] * walk_avg + lam[1] / limits[1] * walk_gap - 1.0 + rho) /
           (walk_avg + limits[j] * es[j]);
  }
  return g;
}

}  // namespace polling
