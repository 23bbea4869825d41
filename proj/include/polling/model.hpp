#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "polling/distributions.hpp"

namespace polling {

// Station indices are 0-based in code; messages use the 1-based queue names.
// Switchover legs, in walking order around the standard route:
//   leg 0: queue 1 -> 2,  leg 1: queue 2 -> 3,  leg 2: queue 3 -> 1,
//   leg 3: queue 1 -> 3 (the shortcut taken by a reduced cycle).
inline constexpr int kLeg12 = 0;
inline constexpr int kLeg23 = 1;
inline constexpr int kLeg31 = 2;
inline constexpr int kLeg13 = 3;

enum class Discipline { Limited, Gated, Exhaustive };

// A standard cycle visits 1, 2, 3; a reduced cycle skips queue 2. The rule:
// a standard cycle that finds queue 2 empty makes the next cycle reduced, and
// a reduced cycle is always followed by a standard one.
enum class CycleType { Standard, Reduced };

struct QueueParams {
  DistributionSpec interarrival;
  DistributionSpec service;
  int limit = 1;          // per-visit service cap (Limited discipline only)
  bool saturated = false; // never empties; arrival process ignored
};

struct ModelParams {
  std::array<QueueParams, 3> queue;
  std::array<DistributionSpec, 4> switchover;  // legs as above
  Discipline discipline = Discipline::Limited;
};

struct Violation {
  bool warning = false;  // warnings don't block derivation
  std::string where;
  std::string what;
};

// Structural checks. Hard violations (warning == false) make the parameter
// set unusable; warnings flag model regimes the analysis modules treat
// specially (walk-time assumption, saturated queue with real service times).
std::vector<Violation> validate(const ModelParams& p);
bool has_errors(const std::vector<Violation>& v);
std::string describe(const std::vector<Violation>& v);

// Everything downstream works off these means and rates. Saturated queues get
// arrival rate 0 and (when their service time is identically 0) load 0, which
// is the regime the reference experiments use.
struct DerivedQuantities {
  Discipline discipline = Discipline::Limited;
  std::array<bool, 3> saturated{};
  std::array<double, 3> arrival_rate{};    // 1/E[interarrival]; 0 if saturated
  std::array<double, 3> mean_service{};
  std::array<double, 3> load{};            // arrival_rate * mean_service
  double total_load = 0;
  std::array<double, 4> mean_switchover{};
  double standard_walk_mean = 0;  // legs 1->2, 2->3, 3->1
  double reduced_walk_mean = 0;   // legs 3->1, 1->3
  std::vector<Violation> warnings;
};

// Throws Error{InvalidParams} listing every hard violation.
DerivedQuantities derive_quantities(const ModelParams& p);

// The adaptive rule as a pure function. queue2_found_empty must be present
// exactly when the finishing cycle was standard (a reduced cycle never looks
// at queue 2); anything else throws Error{InconsistentInput}.
CycleType next_cycle_type(CycleType finishing, std::optional<bool> queue2_found_empty);

const char* discipline_name(Discipline d);
const char* cycle_type_name(CycleType c);

}  // namespace polling
