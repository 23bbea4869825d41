#pragma once

#include <array>
#include <string>
#include <vector>

#include "polling/model.hpp"

namespace polling {

// One evaluated condition. Stability rows require lhs strictly below the
// threshold; instability rows fire at or above it. `holds` already accounts
// for the boundary band, and the raw lhs is kept so callers can apply their
// own policy near the edge.
struct ConditionRow {
  std::string name;
  double lhs = 0;
  double threshold = 1.0;
  bool holds = false;
};

enum class VerdictKind { Stable, Unstable, Indeterminate };

struct StabilityVerdict {
  VerdictKind kind = VerdictKind::Indeterminate;
  bool transient = false;  // meaningful only when kind == Unstable
  std::vector<ConditionRow> conditions;
  double boundary_band = 0;
};

// Relative half-width of the equality band around the threshold. Inside the
// band an instability comparison counts as "equal": unstable but not
// necessarily transient.
inline constexpr double kBoundaryBand = 1e-12;

// Classifier for the limited discipline. The sufficient set and the necessary
// set do not meet, so Indeterminate is a real outcome (only possible when the
// queue-2 limit exceeds 1). Rejects saturated models and non-limited
// disciplines.
StabilityVerdict check_limited(const DerivedQuantities& d, const std::array<int, 3>& limits);

// Gated and exhaustive service: stable iff total load < 1, transient when
// it exceeds 1 strictly. Rejects saturated models.
StabilityVerdict check_gated_exhaustive(const DerivedQuantities& d);

// Lower bounds on the linear growth rate of each queue's fluid level in the
// limited discipline. Entry k is meaningful when the matching instability
// condition holds (it is negative otherwise).
std::array<double, 3> divergence_rates(const DerivedQuantities& d, const std::array<int, 3>& limits);

const char* verdict_kind_name(VerdictKind v);

}  // namespace polling
