#include "polling/model.hpp"

#include <sstream>

namespace polling {

const char* discipline_name(Discipline d) {
  switch (d) {
    case Discipline::Limited: return "limited";
    case Discipline::Gated: return "gated";
    case Discipline::Exhaustive: return "exhaustive";
  }
  return "?";
}

const char* cycle_type_name(CycleType c) {
  return c == CycleType::Standard ? "standard" : "reduced";
}

std::vector<Violation> validate(const ModelParams& p) {
  std::vector<Violation> out;
  auto err = [&](std::string where, std::string what) {
    out.push_back({false, std::move(where), std::move(what)});
  };
  auto warn = [&](std::string where, std::string what) {
    out.push_back({true, std::move(where), std::move(what)});
  };

  for (int k = 0; k < 3; ++k) {
    const auto& q = p.queue[k];
    const std::string tag = "queue" + std::to_string(k + 1);
    for (const auto& m : spec_violations(q.interarrival)) err(tag + ".interarrival", m);
    for (const auto& m : spec_violations(q.service)) err(tag + ".service", m);

    if (!q.saturated && spec_violations(q.interarrival).empty() && !(mean(q.interarrival) > 0))
      err(tag + ".interarrival", "mean interarrival time must be > 0 at a non-saturated queue");

    if (p.discipline == Discipline::Limited && q.limit < 1)
      err(tag + ".limit", "limit must be >= 1");

    if (q.saturated && p.discipline != Discipline::Limited)
      err(tag, "a saturated queue needs the limited discipline; gated and exhaustive visits would never end");

    if (q.saturated && spec_violations(q.service).empty() && mean(q.service) > 0)
      warn(tag, "saturated queue with positive mean service time: its load is excluded from derived totals, and the stability analysis will reject this model");
  }

  for (int leg = 0; leg < 4; ++leg) {
    for (const auto& m : spec_violations(p.switchover[leg]))
      err("switchover.leg" + std::to_string(leg + 1), m);
  }

  // The reduced route is supposed to be the shorter one. If it is not, the
  // adaptive skip saves nothing; the analysis formulas assume the gap is
  // positive, so flag it (but simulation still works).
  bool switchover_ok = true;
  for (int leg = 0; leg < 4; ++leg)
    if (!spec_violations(p.switchover[leg]).empty()) switchover_ok = false;
  if (switchover_ok) {
    const double standard = mean(p.switchover[kLeg12]) + mean(p.switchover[kLeg23]) + mean(p.switchover[kLeg31]);
    const double reduced = mean(p.switchover[kLeg31]) + mean(p.switchover[kLeg13]);
    if (!(standard > reduced))
      warn("switchover", "mean walking time of a standard cycle does not exceed the reduced one; analysis results assume it does");
  }

  return out;
}

bool has_errors(const std::vector<Violation>& v) {
  for (const auto& x : v)
    if (!x.warning) return true;
  return false;
}

std::string describe(const std::vector<Violation>& v) {
  std::ostringstream os;
  bool first = true;
  for (const auto& x : v) {
    if (!first) os << "; ";
    first = false;
    os << (x.warning ? "[warn] " : "") << x.where << ": " << x.what;
  }
  return os.str();
}

DerivedQuantities derive_quantities(const ModelParams& p) {
  auto violations = validate(p);
  if (has_errors(violations))
    throw Error(Errc::InvalidParams, describe(violations));

  DerivedQuantities d;
  d.discipline = p.discipline;
  for (int k = 0; k < 3; ++k) {
    const auto& q = p.queue[k];
    d.saturated[k] = q.saturated;
    d.mean_service[k] = mean(q.service);
    d.arrival_rate[k] = q.saturated ? 0.0 : 1.0 / mean(q.interarrival);
    d.load[k] = d.arrival_rate[k] * d.mean_service[k];
    d.total_load += d.load[k];
  }
  for (int leg = 0; leg < 4; ++leg) d.mean_switchover[leg] = mean(p.switchover[leg]);
  d.standard_walk_mean =
      d.mean_switchover[kLeg12] + d.mean_switchover[kLeg23] + d.mean_switchover[kLeg31];
  d.reduced_walk_mean = d.mean_switchover[kLeg31] + d.mean_switchover[kLeg13];
  for (auto& v : violations)
    if (v.warning) d.warnings.push_back(v);
  return d;
}

CycleType next_cycle_type(CycleType finishing, std::optional<bool> queue2_found_empty) {
  if (finishing == CycleType::Standard) {
    if (!queue2_found_empty.has_value())
      throw Error(Errc::InconsistentInput,
                  "a finishing standard cycle must report whether queue 2 was found empty");
    return *queue2_found_empty ? CycleType::Reduced : CycleType::Standard;
  }
  if (queue2_found_empty.has_value())
    throw Error(Errc::InconsistentInput,
                "a reduced cycle never inspects queue 2, so no emptiness flag applies");
  return CycleType::Standard;
}

}  // namespace polling
