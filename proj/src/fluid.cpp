#include "polling/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "polling/stability.hpp"

namespace polling {

namespace {

constexpr double kTol = 1e-12;
const double kInf = std::numeric_limits<double>::infinity();

void require_limits(const std::array<int, 3>& l) {
  for (int k = 0; k < 3; ++k)
    if (l[k] < 1) throw Error(Errc::InvalidParams, "limits must be >= 1");
}

void require_state(const FluidState& s) {
  for (double x : s.level)
    if (!(x >= 0) || !std::isfinite(x))
      throw Error(Errc::InvalidParams, "fluid levels must be finite and >= 0");
}

std::string set_label(const char* prefix, const std::array<bool, 3>& in) {
  std::string s = prefix;
  s += ':';
  for (int k = 0; k < 3; ++k)
    if (in[k]) s += static_cast<char>('1' + k);
  return s;
}

// Result of trying to pin the rates of one region. When the region cannot
// hold some zero queue at zero, blocking_queue names a queue that has to be
// allowed to grow instead.
struct SolveResult {
  bool ok = false;
  int blocking_queue = -1;
  RateSolution sol;
  std::string label;
};

// Region solver for the limited discipline.
//
// active[k] marks queues treated as positive. Two modes exist. While queue 2
// is positive, every cycle is standard (the skip rule never fires), so a
// single cycle rate c describes the server's tour, and time balance pins it:
//   c * (walking per cycle + limited service per cycle at active queues) =
//   1 - (load of the queues kept empty).
// With queue 2 empty the tour alternates between standard and reduced cycles
// at rates c and r. Queue 2's own throughput couples them: each standard
// cycle serves queue 2 somewhere between "exactly when nonempty, one batch
// of up to l2" and "l2 every time", which sandwiches the difference
// g = c - r between lambda2/l2 and lambda2. Every g in that window yields
// one admissible rate vector, so with l2 = 1 the window is a point and rates
// are exact; with l2 > 1 they are envelopes over the window.
SolveResult solve_limited(const DerivedQuantities& d, const std::array<int, 3>& limits,
                          const std::array<bool, 3>& active, bool q2pos) {
  const auto& lam = d.arrival_rate;
  const auto& es = d.mean_service;
  const auto& beta = d.load;
  const double zs = d.standard_walk_mean;
  const double zr = d.reduced_walk_mean;

  SolveResult out;

  if (q2pos) {
    std::array<bool, 3> in = active;
    in[1] = true;
    double served_time_per_cycle = 0;  // sum over active queues of l_k * Es_k
    double outside_load = 0;
    for (int k = 0; k < 3; ++k) {
      if (in[k])
        served_time_per_cycle += limits[k] * es[k];
      else
        outside_load += beta[k];
    }
    const double den = zs + served_time_per_cycle;
    if (!(den > 0))
      throw Error(Errc::InfeasibleRegion,
                  "degenerate region: no walking time and no service time per cycle");
    const double c = (1.0 - outside_load) / den;

    if (!(c > 0)) {
      for (int k = 0; k < 3; ++k)
        if (!in[k]) {
          out.blocking_queue = k;
          return out;
        }
      throw Error(Errc::Internal, "cycle rate not positive with every queue active");
    }
    // Queues kept at zero must get enough service opportunities.
    for (int k = 0; k < 3; ++k)
      if (!in[k] && c < lam[k] / limits[k] * (1.0 - kTol)) {
        out.blocking_queue = k;
        return out;
      }

    RateSolution& s = out.sol;
    for (int k = 0; k < 3; ++k) {
      if (in[k]) {
        s.busy[k] = Rate::exact(limits[k] * es[k] * c);
        s.level_rate[k] = Rate::exact(lam[k] - limits[k] * c);
      } else {
        s.busy[k] = Rate::exact(beta[k]);
        s.level_rate[k] = Rate::exact(0.0);
      }
    }
    s.walk[kLeg12] = Rate::exact(c * d.mean_switchover[kLeg12]);
    s.walk[kLeg23] = Rate::exact(c * d.mean_switchover[kLeg23]);
    s.walk[kLeg31] = Rate::exact(c * d.mean_switchover[kLeg31]);
    s.walk[kLeg13] = Rate::exact(0.0);
    s.standard_cycle_rate = Rate::exact(c);
    s.reduced_cycle_rate = Rate::exact(0.0);
    s.tight = true;
    out.ok = true;
    out.label = set_label("pos2", in);
    return out;
  }

  // Queue 2 held at zero.
  std::array<bool, 3> in = active;
  in[1] = false;
  double S = 0, inside_load = 0;
  for (int j : {0, 2})
    if (in[j]) {
      S += limits[j] * es[j];
      inside_load += beta[j];
    }
  const double slack = 1.0 - d.total_load + inside_load;
  const double den2 = 2.0 * S + zs + zr;
  if (!(den2 > 0))
    throw Error(Errc::InfeasibleRegion,
                "degenerate region: zero walking and zero service time per cycle");

  double g_lo = lam[1] / limits[1];
  const double cap = (S + zs > 0) ? slack / (S + zs) : kInf;
  double g_hi = std::min(lam[1], cap);
  if (g_hi < g_lo * (1.0 - kTol)) {
    out.blocking_queue = 1;  // queue 2 cannot be held empty
    return out;
  }
  g_hi = std::max(g_hi, g_lo);

  auto rate_r = [&](double g) { return (slack - g * (S + zs)) / den2; };
  auto rate_c = [&](double g) { return (slack + g * (S + zr)) / den2; };
  auto rate_v = [&](double g) { return rate_c(g) + rate_r(g); };  // total visit rate

  // Queues held at zero (other than queue 2) need visit coverage. The visit
  // rate c + r is linear in the dispatch mix g, so the most demanding zero
  // queue decides feasibility at the favorable end of the window, and the
  // part of the window where its coverage fails is cut away: those mixes
  // violate the region's own balance laws and can never be realized.
  double need = 0;
  int needy = -1;
  for (int k : {0, 2})
    if (!in[k] && lam[k] / limits[k] > need) {
      need = lam[k] / limits[k];
      needy = k;
    }
  if (needy >= 0) {
    if (std::max(rate_v(g_lo), rate_v(g_hi)) < need * (1.0 - kTol)) {
      out.blocking_queue = needy;
      return out;
    }
    if (zr != zs) {
      // v(g) = (2*slack + g*(zr - zs)) / den2 crosses `need` exactly once
      const double g_star = (need * den2 - 2.0 * slack) / (zr - zs);
      if (zr < zs)
        g_hi = std::clamp(g_star, g_lo, g_hi);  // v decreasing: trim the top
      else
        g_lo = std::clamp(g_star, g_lo, g_hi);  // v increasing: trim the bottom
    }
  }

  const double r_min = std::max(0.0, rate_r(g_hi)), r_max = std::max(0.0, rate_r(g_lo));
  const double c_min = rate_c(g_lo), c_max = rate_c(g_hi);
  const double v_min = std::min(c_min + r_max, c_max + r_min);
  const double v_max = std::max(c_min + r_max, c_max + r_min);

  RateSolution& s = out.sol;
  s.busy[1] = Rate::exact(beta[1]);
  s.level_rate[1] = Rate::exact(0.0);
  for (int j : {0, 2}) {
    if (in[j]) {
      s.busy[j] = Rate::span(limits[j] * es[j] * v_min, limits[j] * es[j] * v_max);
      s.level_rate[j] = Rate::span(lam[j] - limits[j] * v_max, lam[j] - limits[j] * v_min);
    } else {
      s.busy[j] = Rate::exact(beta[j]);
      s.level_rate[j] = Rate::exact(0.0);
    }
  }
  s.walk[kLeg12] = scale(Rate::span(c_min, c_max), d.mean_switchover[kLeg12]);
  s.walk[kLeg23] = scale(Rate::span(c_min, c_max), d.mean_switchover[kLeg23]);
  s.walk[kLeg31] = scale(Rate::span(v_min, v_max), d.mean_switchover[kLeg31]);
  s.walk[kLeg13] = scale(Rate::span(r_min, r_max), d.mean_switchover[kLeg13]);
  s.standard_cycle_rate = Rate::span(c_min, c_max);
  s.reduced_cycle_rate = Rate::span(r_min, r_max);
  s.tight = g_hi <= g_lo * (1.0 + kTol);
  if (s.tight) {
    // collapse floating-point width so exact regions really are points,
    // evaluating everything at the single admissible dispatch mix g_lo
    const double c = rate_c(g_lo);
    const double r = std::max(0.0, rate_r(g_lo));
    const double v = c + r;
    s.standard_cycle_rate = Rate::exact(c);
    s.reduced_cycle_rate = Rate::exact(r);
    s.walk[kLeg12] = Rate::exact(c * d.mean_switchover[kLeg12]);
    s.walk[kLeg23] = Rate::exact(c * d.mean_switchover[kLeg23]);
    s.walk[kLeg31] = Rate::exact(v * d.mean_switchover[kLeg31]);
    s.walk[kLeg13] = Rate::exact(r * d.mean_switchover[kLeg13]);
    for (int j : {0, 2})
      if (in[j]) {
        s.busy[j] = Rate::exact(limits[j] * es[j] * v);
        s.level_rate[j] = Rate::exact(lam[j] - limits[j] * v);
      }
  }
  out.ok = true;
  out.label = (S == 0 && inside_load == 0 && !in[0] && !in[2]) ? "empty" : set_label("zero2", in);
  return out;
}

struct Selected {
  RateSolution sol;
  std::string label;
};

// Walk the region lattice: start from the sign pattern of the state, and
// whenever the region cannot hold a zero queue at zero, let that queue grow
// and re-solve. Each promotion strictly enlarges the active set, so this
// terminates; the algebra guarantees a promoted queue really grows.
Selected select_region_limited(const DerivedQuantities& d, const std::array<int, 3>& limits,
                               const std::array<double, 3>& level) {
  std::array<bool, 3> active{};
  for (int k = 0; k < 3; ++k) active[k] = level[k] > 0;
  bool q2pos = active[1];
  std::array<bool, 3> promoted{};

  for (int round = 0; round < 4; ++round) {
    SolveResult r = solve_limited(d, limits, active, q2pos);
    if (r.ok) {
      for (int k = 0; k < 3; ++k)
        if (promoted[k] && r.sol.level_rate[k].is_exact() && !(r.sol.level_rate[k].hi > 0)) {
          std::ostringstream os;
          os << "queue " << (k + 1) << " was promoted to growing but its rate is "
             << r.sol.level_rate[k].hi;
          throw Error(Errc::Internal, os.str());
        }
      return {r.sol, r.label};
    }
    const int b = r.blocking_queue;
    const bool already_growing = (b == 1) ? q2pos : active[b];
    if (b < 0 || b > 2 || already_growing)
      throw Error(Errc::Internal, "region promotion picked an invalid queue");
    active[b] = true;
    if (b == 1) q2pos = true;
    promoted[b] = true;
  }
  throw Error(Errc::Internal, "region selection did not converge");
}

double backlog_at(const DerivedQuantities& d, const std::array<double, 3>& level) {
  double w = 0;
  for (int k = 0; k < 3; ++k) w += level[k] * d.mean_service[k];
  return w;
}

}  // namespace

double Rate::value() const {
  if (!is_exact()) throw Error(Errc::Internal, "value() called on an interval rate");
  return lo;
}

Rate scale(const Rate& r, double f) {
  if (!(f >= 0)) throw Error(Errc::Internal, "scale() expects a nonnegative factor");
  return {r.lo * f, r.hi * f};
}

Rate add(const Rate& a, const Rate& b) { return {a.lo + b.lo, a.hi + b.hi}; }

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::ReachedTEnd: return "reached_t_end";
    case StopReason::ReachedZero: return "reached_zero";
    case StopReason::IntervalRegion: return "interval_region";
  }
  return "?";
}

RateSolution region_rates(const DerivedQuantities& d, const std::array<int, 3>& limits,
                          const FluidState& state) {
  if (d.discipline != Discipline::Limited)
    throw Error(Errc::NotLimitedDiscipline, "region_rates applies to the limited discipline");
  require_limits(limits);
  require_state(state);

  std::array<bool, 3> active{};
  for (int k = 0; k < 3; ++k) active[k] = state.level[k] > 0;
  SolveResult r = solve_limited(d, limits, active, active[1]);
  if (!r.ok) {
    std::ostringstream os;
    os << "region cannot hold queue " << (r.blocking_queue + 1)
       << " at zero (levels " << state.level[0] << "," << state.level[1] << ","
       << state.level[2] << ")";
    throw Error(Errc::InfeasibleRegion, os.str());
  }
  return r.sol;
}

RateSolution gated_exhaustive_rates(const DerivedQuantities& d, const FluidState& state) {
  if (d.discipline == Discipline::Limited)
    throw Error(Errc::InconsistentInput,
                "gated_exhaustive_rates applies to gated or exhaustive service");
  require_state(state);

  const auto& lam = d.arrival_rate;
  const auto& es = d.mean_service;
  const auto& beta = d.load;

  std::array<bool, 3> in{};
  int n_active = 0;
  for (int k = 0; k < 3; ++k) {
    in[k] = state.level[k] > 0;
    n_active += in[k];
  }

  RateSolution s;
  if (n_active > 0) {
    double outside_load = 0;
    for (int k = 0; k < 3; ++k) {
      if (in[k] && es[k] == 0)
        throw Error(Errc::InfeasibleRegion,
                    "zero mean service time with a positive fluid level has no finite-rate solution");
      if (!in[k]) outside_load += beta[k];
    }
    double slack = 1.0 - outside_load;  // service effort left for the positive queues
    if (slack < -kTol)
      throw Error(Errc::InfeasibleRegion,
                  "queues held at zero already need more than the full service capacity");
    slack = std::max(slack, 0.0);

    for (int k = 0; k < 3; ++k) {
      if (!in[k]) {
        s.busy[k] = Rate::exact(beta[k]);
        s.level_rate[k] = Rate::exact(0.0);
      } else if (n_active == 1) {
        s.busy[k] = Rate::exact(slack);
        s.level_rate[k] = Rate::exact(lam[k] - slack / es[k]);
      } else {
        // only the total effort is pinned; per-queue shares are envelopes
        s.busy[k] = Rate::span(0.0, slack);
        s.level_rate[k] = Rate::span(lam[k] - slack / es[k], lam[k]);
      }
    }
    for (auto& w : s.walk) w = Rate::exact(0.0);
    s.standard_cycle_rate = Rate::exact(0.0);
    s.reduced_cycle_rate = Rate::exact(0.0);
    s.tight = n_active == 1;
    return s;
  }

  // All-empty state.
  if (d.total_load > 1.0 + kTol)
    throw Error(Errc::InfeasibleRegion,
                "total load exceeds capacity; the empty state cannot persist");
  const double slack = std::max(0.0, 1.0 - d.total_load);
  for (int k = 0; k < 3; ++k) {
    s.busy[k] = Rate::exact(beta[k]);
    s.level_rate[k] = Rate::exact(0.0);
  }
  for (auto& w : s.walk) w = Rate::span(0.0, slack);
  s.standard_cycle_rate =
      Rate::span(0.0, d.standard_walk_mean > 0 ? slack / d.standard_walk_mean : kInf);
  s.reduced_cycle_rate =
      Rate::span(0.0, d.reduced_walk_mean > 0 ? slack / d.reduced_walk_mean : kInf);
  s.tight = slack == 0;
  return s;
}

DriftReport lyapunov_drift(const DerivedQuantities& d, const std::array<int, 3>& limits,
                           const FluidState& state) {
  require_limits(limits);
  require_state(state);

  DriftReport rep;
  rep.backlog = backlog_at(d, state.level);

  const double rho = d.total_load;
  double max_es = 0;
  for (double e : d.mean_service) max_es = std::max(max_es, e);

  if (d.discipline != Discipline::Limited) {
    const auto verdict = check_gated_exhaustive(d);
    if (verdict.kind != VerdictKind::Stable)
      throw Error(Errc::NotApplicable, "drift certificate needs total load strictly below 1");
    rep.drift = Rate::exact(rep.backlog > 0 ? rho - 1.0 : 0.0);
    rep.decay_rate = 1.0 - rho;
    rep.drain_deadline = max_es / (1.0 - rho);
    return rep;
  }

  const auto verdict = check_limited(d, limits);
  if (verdict.kind != VerdictKind::Stable)
    throw Error(Errc::NotApplicable,
                "drift certificate needs all sufficient stability conditions strictly satisfied");

  Selected sel = select_region_limited(d, limits, state.level);
  Rate busy_sum = Rate::exact(0.0);
  for (const auto& b : sel.sol.busy) busy_sum = add(busy_sum, b);
  rep.drift = Rate::span(rho - busy_sum.hi, rho - busy_sum.lo);

  // Backlog decay rate once queue 2 is drained. Two bound families exist,
  // one per available per-queue throughput bound; under the (strict)
  // stability conditions at least one family applies uniformly over the
  // possible active sets, and we take the best valid one.
  const auto& lam = d.arrival_rate;
  const auto& es = d.mean_service;
  const double zs = d.standard_walk_mean;
  const double za = 0.5 * (zs + d.reduced_walk_mean);
  const double zg = 0.5 * (zs - d.reduced_walk_mean);
  std::array<double, 3> ratio{}, w{};
  for (int k = 0; k < 3; ++k) {
    ratio[k] = lam[k] / limits[k];
    w[k] = limits[k] * es[k];
  }

  const bool family_full_ok = (ratio[0] * zs < 1.0 - rho) && (ratio[2] * zs < 1.0 - rho);
  const bool family_avg_ok = (ratio[0] * za + lam[1] * zg < 1.0 - rho) &&
                             (ratio[2] * za + lam[1] * zg < 1.0 - rho);

  const std::array<std::array<bool, 3>, 3> subsets = {{{true, false, false},
                                                       {false, false, true},
                                                       {true, false, true}}};
  double eps_full = kInf, eps_avg = kInf;
  bool any_subset = false;
  for (const auto& K : subsets) {
    double sw = 0, num_full = 0, num_avg = 0;
    for (int k : {0, 2})
      if (K[k]) {
        sw += w[k];
        num_full += w[k] * (1.0 - rho - ratio[k] * zs);
        num_avg += w[k] * (1.0 - rho - ratio[k] * za - lam[1] * zg);
      }
    if (sw == 0) continue;  // such a state carries no backlog
    any_subset = true;
    eps_full = std::min(eps_full, num_full / (zs + sw));
    eps_avg = std::min(eps_avg, num_avg / (za + sw));
  }

  double eps = kInf;
  if (any_subset) {
    eps = -kInf;
    if (family_full_ok) eps = std::max(eps, eps_full);
    if (family_avg_ok) eps = std::max(eps, eps_avg);
    if (!(eps > 0))
      throw Error(Errc::Internal, "no positive decay rate despite strict stability conditions");
  }
  rep.decay_rate = eps;

  // Deadline: first drain every queue whose admission ratio is at most
  // queue 2's (queue 2 included), in increasing ratio order; from then on
  // the backlog itself decays at rate eps.
  double denom1 = zs;
  for (int k = 0; k < 3; ++k) denom1 += w[k];
  std::vector<int> chain;
  for (int k = 0; k < 3; ++k)
    if (ratio[k] <= ratio[1]) chain.push_back(k);
  std::sort(chain.begin(), chain.end(), [&](int a, int b) {
    return ratio[a] != ratio[b] ? ratio[a] < ratio[b] : a < b;
  });
  double deadline = 0;
  for (int k : chain) {
    const double eps_k = limits[k] * (1.0 - rho - ratio[k] * zs) / denom1;
    if (!(eps_k > 0))
      throw Error(Errc::Internal, "drain chain rate not positive despite stability conditions");
    deadline += (1.0 + lam[k] * deadline) / eps_k;
  }
  if (any_subset) {
    const double peak = max_es + rho * deadline;
    deadline += peak / eps;
  }
  rep.drain_deadline = deadline;
  return rep;
}

Trajectory integrate(const DerivedQuantities& d, const std::array<int, 3>& limits,
                     const std::array<double, 3>& q0, double t_end) {
  if (d.discipline != Discipline::Limited)
    throw Error(Errc::NotLimitedDiscipline, "integrate applies to the limited discipline");
  require_limits(limits);
  require_state(FluidState{q0});
  if (!(t_end >= 0) || !std::isfinite(t_end))
    throw Error(Errc::InvalidParams, "t_end must be finite and >= 0");

  Trajectory traj;
  std::array<double, 3> q = q0;
  double t = 0;

  constexpr int kMaxSegments = 10000;
  for (int iter = 0; iter < kMaxSegments; ++iter) {
    if (t >= t_end) {
      traj.reason = StopReason::ReachedTEnd;
      traj.t_stop = t_end;
      traj.q_stop = q;
      return traj;
    }

    Selected sel = select_region_limited(d, limits, q);
    bool exact = true;
    for (const auto& lr : sel.sol.level_rate) exact = exact && lr.is_exact();
    if (!exact) {
      traj.reason = StopReason::IntervalRegion;
      traj.t_stop = t;
      traj.q_stop = q;
      return traj;
    }

    std::array<double, 3> slope{};
    bool at_zero = true, standing_still = true;
    for (int k = 0; k < 3; ++k) {
      slope[k] = sel.sol.level_rate[k].lo;
      at_zero = at_zero && q[k] == 0;
      standing_still = standing_still && slope[k] == 0;
    }
    if (at_zero && standing_still) {
      traj.segments.push_back({t, t_end, q, slope, sel.label, sel.sol.tight});
      traj.reason = StopReason::ReachedZero;
      traj.t_stop = t;
      traj.q_stop = q;
      return traj;
    }

    double dt = t_end - t;
    std::array<double, 3> hit{kInf, kInf, kInf};
    for (int k = 0; k < 3; ++k)
      if (q[k] > 0 && slope[k] < 0) {
        hit[k] = q[k] / -slope[k];
        dt = std::min(dt, hit[k]);
      }

    traj.segments.push_back({t, t + dt, q, slope, sel.label, sel.sol.tight});
    for (int k = 0; k < 3; ++k) {
      if (hit[k] <= dt * (1.0 + kTol))
        q[k] = 0;  // snap the queue(s) that reached zero
      else
        q[k] = std::max(0.0, q[k] + slope[k] * dt);
    }
    t += dt;
  }
  throw Error(Errc::Internal, "trajectory did not settle within the segment budget");
}

}  // namespace polling
