#pragma once

#include <array>
#include <string>
#include <vector>

#include "polling/model.hpp"

namespace polling {

// Closed interval of feasible long-run rates. Most regions pin every rate to
// a point (lo == hi); a queue-2 limit above 1 leaves genuine slack in how
// often the adaptive rule fires, and then only envelopes are known.
struct Rate {
  double lo = 0;
  double hi = 0;

  static Rate exact(double x) { return {x, x}; }
  static Rate span(double lo, double hi) { return {lo, hi}; }
  bool is_exact() const { return lo == hi; }
  double value() const;  // throws unless exact
  double width() const { return hi - lo; }
};

Rate scale(const Rate& r, double nonneg_factor);
Rate add(const Rate& a, const Rate& b);

struct FluidState {
  std::array<double, 3> level{};  // nonnegative fluid queue levels
};

// Long-run time-fraction and rate solution of one dynamic region, i.e. one
// fixed sign pattern of the levels.
struct RateSolution {
  std::array<Rate, 3> busy{};        // fraction of time serving each queue
  std::array<Rate, 4> walk{};        // fraction of time walking each leg
  Rate standard_cycle_rate{};        // completed standard cycles per unit time
  Rate reduced_cycle_rate{};         // completed reduced (skip) cycles per unit time
  std::array<Rate, 3> level_rate{};  // implied d(level)/dt
  bool tight = false;                // every field above is a point value
};

// Rates for the region the given state sits in, limited discipline. The
// active set is read off the positive levels; regions that cannot hold the
// remaining queues at zero throw Error{InfeasibleRegion} (the caller decides
// which queue to let grow; integrate() below does that automatically).
RateSolution region_rates(const DerivedQuantities& d, const std::array<int, 3>& limits,
                          const FluidState& state);

// Same idea for gated/exhaustive service, where a busy server works at full
// rate and walking vanishes. Per-queue splits are only pinned when a single
// queue is positive; otherwise they come back as envelopes.
RateSolution gated_exhaustive_rates(const DerivedQuantities& d, const FluidState& state);

// Drift certificate for the total backlog W = sum_k level_k * mean_service_k.
// Only available when the matching stability conditions hold strictly
// (otherwise Error{NotApplicable}).
struct DriftReport {
  double backlog = 0;        // W at the state
  Rate drift{};              // dW/dt at the state
  double decay_rate = 0;     // W' <= -decay_rate whenever W > 0 and queue 2 is drained
  double drain_deadline = 0; // any trajectory from |level| <= 1 has W = 0 from here on
};
DriftReport lyapunov_drift(const DerivedQuantities& d, const std::array<int, 3>& limits,
                           const FluidState& state);

// Piecewise-linear fluid trajectory, limited discipline.
struct TrajectorySegment {
  double t0 = 0, t1 = 0;
  std::array<double, 3> q0{};     // levels at t0
  std::array<double, 3> slope{};  // d(level)/dt on [t0, t1]
  std::string region;             // compact label, e.g. "pos2:123" or "zero2:13"
  bool tight = true;
};

enum class StopReason {
  ReachedTEnd,    // integrated the full horizon
  ReachedZero,    // hit the all-empty absorbing state
  IntervalRegion, // entered a region whose level rates are only envelopes
};

struct Trajectory {
  std::vector<TrajectorySegment> segments;
  StopReason reason = StopReason::ReachedTEnd;
  double t_stop = 0;                // time the reason fired
  std::array<double, 3> q_stop{};   // levels at t_stop
};

Trajectory integrate(const DerivedQuantities& d, const std::array<int, 3>& limits,
                     const std::array<double, 3>& q0, double t_end);

const char* stop_reason_name(StopReason r);

}  // namespace polling
