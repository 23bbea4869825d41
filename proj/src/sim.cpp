#include "polling/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "polling/errors.hpp"

namespace polling {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// two-sided 95% Student t quantiles, df = index + 1, up to df = 29
constexpr double kT975[29] = {
    12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060,
    2.2622,  2.2281, 2.2010, 2.1788, 2.1604, 2.1448, 2.1314, 2.1199,
    2.1098,  2.1009, 2.0930, 2.0860, 2.0796, 2.0739, 2.0687, 2.0639,
    2.0595,  2.0555, 2.0518, 2.0484, 2.045229642132703};

double t975(int df) {
  if (df < 1) return std::numeric_limits<double>::quiet_NaN();
  if (df <= 29) return kT975[df - 1];
  return 1.959963984540054;  // good enough past the table
}

int walk_destination(int leg) {
  switch (leg) {
    case kLeg12: return 2;
    case kLeg23: return 3;
    case kLeg31: return 1;
    default: return 3;  // kLeg13
  }
}

}  // namespace

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Arrival: return "arrival";
    case EventKind::ServiceEnd: return "service_end";
    case EventKind::WalkEnd: return "walk_end";
    case EventKind::EmptyFind: return "empty_find";
  }
  return "?";
}

Simulation::Simulation(const ModelParams& p, std::uint64_t seed)
    : arrival_s_{Sampler(p.queue[0].interarrival), Sampler(p.queue[1].interarrival),
                 Sampler(p.queue[2].interarrival)},
      service_s_{Sampler(p.queue[0].service), Sampler(p.queue[1].service),
                 Sampler(p.queue[2].service)},
      switch_s_{Sampler(p.switchover[0]), Sampler(p.switchover[1]),
                Sampler(p.switchover[2]), Sampler(p.switchover[3])},
      streams_(seed) {
  auto problems = validate(p);
  if (has_errors(problems))
    throw Error(Errc::InvalidParams, describe(problems));
  discipline_ = p.discipline;
  for (int k = 0; k < 3; ++k) {
    saturated_[k] = p.queue[k].saturated;
    limit_[k] = p.queue[k].limit;
    next_arrival_[k] =
        saturated_[k] ? kInf : draw(arrival_s_[k], streams_.interarrival[k], "interarrival");
  }
  // server begins at station 1 at time zero; the first cycle is standard
  pending_ = Pending::Enter;
  pending_idx_ = 0;
}

double Simulation::draw(const Sampler& s, Xoshiro256pp& g, const char* what) {
  const double x = s(g.uniform_open());
  if (!(x >= 0.0) || !std::isfinite(x))
    throw Error(Errc::NonFiniteSample,
                std::string("sampled a non-finite or negative ") + what + " duration");
  return x;
}

void Simulation::emit(EventKind kind, int station_1based) {
  if (!trace_) return;
  TraceRow row;
  row.t = clock_;
  row.kind = kind;
  row.station = station_1based;
  row.q = q_;
  row.cycle = cycles_done_;
  row.cycle_type = cycle_type_;
  trace_(row);
}

void Simulation::advance_to(double t) {
  const double dt = t - clock_;
  if (dt < 0)
    throw Error(Errc::Internal, "event clock moved backwards");
  if (dt > 0) {
    if (!activity_live_)
      throw Error(Errc::Internal, "time passed with no activity in progress");
    if (doing_ == Doing::Serving)
      record_.busy[doing_idx_] += dt;
    else
      record_.walk[doing_idx_] += dt;
    record_.queue_time[0] += static_cast<double>(q_[0]) * dt;
    record_.queue_time[1] += static_cast<double>(q_[1]) * dt;
    record_.queue_time[2] += static_cast<double>(q_[2]) * dt;
    clock_ = t;
  }
}

void Simulation::step() {
  if (pending_ != Pending::None) {
    const Pending what = pending_;
    const int idx = pending_idx_;
    pending_ = Pending::None;
    dispatch(what, idx);
    return;
  }
  if (!activity_live_)
    throw Error(Errc::Internal, "no pending transition and no activity in progress");

  int ak = -1;
  double t_arr = kInf;
  for (int k = 0; k < 3; ++k)
    if (next_arrival_[k] < t_arr) {
      t_arr = next_arrival_[k];
      ak = k;
    }

  if (t_arr < activity_end_) {
    advance_to(t_arr);
    arrival(ak);
  } else {
    advance_to(activity_end_);
    activity_live_ = false;
    if (doing_ == Doing::Serving)
      finish_service(doing_idx_);
    else
      finish_walk(doing_idx_);
  }
}

void Simulation::dispatch(Pending what, int idx) {
  switch (what) {
    case Pending::Enter: enter_station(idx); break;
    case Pending::ServiceEnd: finish_service(idx); break;
    case Pending::WalkEnd: finish_walk(idx); break;
    case Pending::None: throw Error(Errc::Internal, "dispatched an empty transition");
  }
}

void Simulation::arrival(int k) {
  q_[k] += 1;
  next_arrival_[k] = clock_ + draw(arrival_s_[k], streams_.interarrival[k], "interarrival");
  emit(EventKind::Arrival, k + 1);
}

void Simulation::enter_station(int k) {
  if (k == 1 && cycle_type_ == CycleType::Reduced)
    throw Error(Errc::Internal, "entered station 2 during a reduced cycle");
  if (!saturated_[k] && q_[k] == 0) {
    record_.empty_finds[k] += 1;
    if (k == 1) latch_ = true;
    emit(EventKind::EmptyFind, k + 1);
    depart(k);
    return;
  }
  served_this_visit_ = 0;
  // The visit serves the customers present at this instant (capped by the
  // quota under the limited rule); later arrivals wait for the next visit.
  // Exhaustive keeps serving anything it sees until the queue is empty.
  switch (discipline_) {
    case Discipline::Limited:
      visit_target_ =
          saturated_[k] ? limit_[k] : std::min<std::int64_t>(limit_[k], q_[k]);
      break;
    case Discipline::Gated:
      visit_target_ = q_[k];
      break;
    case Discipline::Exhaustive:
      visit_target_ = -1;
      break;
  }
  begin_service(k);
}

void Simulation::begin_service(int k) {
  const double dur = draw(service_s_[k], streams_.service[k], "service");
  doing_ = Doing::Serving;
  doing_idx_ = k;
  if (dur > 0) {
    activity_end_ = clock_ + dur;
    activity_live_ = true;
  } else {
    pending_ = Pending::ServiceEnd;
    pending_idx_ = k;
  }
}

void Simulation::finish_service(int k) {
  record_.completions[k] += 1;
  if (!saturated_[k]) q_[k] -= 1;
  served_this_visit_ += 1;
  if (k == 1 && served_this_visit_ == 1) record_.cycles_with_q2_service += 1;
  emit(EventKind::ServiceEnd, k + 1);

  const bool leave = discipline_ == Discipline::Exhaustive
                         ? q_[k] == 0
                         : served_this_visit_ >= visit_target_;
  if (leave) {
    depart(k);
  } else {
    if (!saturated_[k] && q_[k] <= 0)
      throw Error(Errc::Internal, "visit owes services to an empty queue");
    begin_service(k);
  }
}

void Simulation::depart(int k) {
  int leg;
  if (k == 0) {
    leg = latch_ ? kLeg13 : kLeg12;
    if (leg == kLeg13) latch_ = false;  // consumed by the reduced walk it triggers
  } else if (k == 1) {
    leg = kLeg23;
  } else {
    leg = kLeg31;
  }
  begin_walk(leg);
}

void Simulation::begin_walk(int leg) {
  const double dur = draw(switch_s_[leg], streams_.switchover[leg], "switchover");
  doing_ = Doing::Walking;
  doing_idx_ = leg;
  if (dur > 0) {
    activity_end_ = clock_ + dur;
    activity_live_ = true;
  } else {
    pending_ = Pending::WalkEnd;
    pending_idx_ = leg;
  }
}

void Simulation::check_counts() const {
  const auto& e = record_.leg_walks;
  const std::int64_t into1 = e[kLeg12] + e[kLeg13] - e[kLeg31];
  if (into1 < -1 || into1 > 1)
    throw Error(Errc::Internal, "walk counts out of step: legs into station 1 vs out of it");
  const std::int64_t via2 = e[kLeg12] - e[kLeg23];
  if (via2 < -1 || via2 > 1)
    throw Error(Errc::Internal, "walk counts out of step: legs into station 2 vs out of it");
  if (discipline_ == Discipline::Limited) {
    const std::int64_t visits2 = e[kLeg12] - e[kLeg13];
    if (record_.cycles_with_q2_service > record_.completions[1])
      throw Error(Errc::Internal, "more serving visits to queue 2 than services there");
    if (record_.completions[1] > limit_[1] * (visits2 + 1))
      throw Error(Errc::Internal, "queue 2 exceeded its per-visit service allowance");
    if (record_.cycles_with_q2_service < visits2 - 1 - record_.empty_finds[1])
      throw Error(Errc::Internal, "station 2 visits unaccounted for");
  }
}

void Simulation::finish_walk(int leg) {
  record_.leg_walks[leg] += 1;
  check_counts();
  emit(EventKind::WalkEnd, walk_destination(leg));

  if (leg == kLeg31) {
    // back at station 1: one full cycle is over
    record_.cycles_total += 1;
    if (cycle_type_ == CycleType::Reduced) record_.cycles_reduced += 1;
    cycles_done_ += 1;
    if (cycle_type_ == CycleType::Standard)
      cycle_type_ = next_cycle_type(cycle_type_, latch_);
    else
      cycle_type_ = next_cycle_type(cycle_type_, std::nullopt);
    pending_ = Pending::Enter;
    pending_idx_ = 0;
  } else {
    pending_ = Pending::Enter;
    pending_idx_ = leg == kLeg12 ? 1 : 2;  // both 2->3 and 1->3 end at station 3
  }
}

// ---------------------------------------------------------------------------
// whole runs

namespace {

struct BatchStat {
  double mean = 0;
  double halfwidth = 0;
};

BatchStat batch_stats(const std::vector<double>& xs) {
  BatchStat out;
  const int n = static_cast<int>(xs.size());
  if (n == 0) return out;
  double sum = 0;
  for (double x : xs) sum += x;
  out.mean = sum / n;
  if (n < 2) {
    out.halfwidth = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double ss = 0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / (n - 1));
  out.halfwidth = t975(n - 1) * sd / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace

RunResult run(const ModelParams& p, const RunConfig& cfg,
              std::function<void(const TraceRow&)> trace) {
  if (cfg.cycles < 1)
    throw Error(Errc::InvalidParams, "cycle count must be at least 1");
  const std::int64_t warmup = cfg.warmup < 0 ? cfg.cycles / 100 : cfg.warmup;
  if (warmup < 0 || (cfg.warmup >= 0 && cfg.cycles <= cfg.warmup))
    throw Error(Errc::InvalidParams, "need cycles > warmup >= 0");

  Simulation sim(p, cfg.seed);
  if (trace) sim.set_trace(std::move(trace));

  while (sim.cycles_done() < warmup) sim.step();
  sim.reset_record();

  const int batches = static_cast<int>(std::min<std::int64_t>(30, cfg.cycles));
  std::vector<CumulativeRecord> snaps;
  snaps.reserve(batches);
  for (int b = 1; b <= batches; ++b) {
    const std::int64_t target = warmup + (cfg.cycles * b) / batches;
    while (sim.cycles_done() < target) sim.step();
    snaps.push_back(sim.record());
  }

  const CumulativeRecord& rec = snaps.back();
  const double elapsed = rec.elapsed();
  if (!(elapsed > 0))
    throw Error(Errc::Internal, "run finished with no elapsed time");

  RunResult out;
  out.record = rec;
  Estimates& est = out.estimates;
  est.cycles = rec.cycles_total;
  est.reduced_cycles = rec.cycles_reduced;
  est.elapsed = elapsed;
  est.p = static_cast<double>(rec.cycles_reduced) / static_cast<double>(rec.cycles_total);
  est.u4 = static_cast<double>(rec.leg_walks[kLeg13]) / elapsed;
  for (int k = 0; k < 3; ++k) {
    est.empty_find_rate[k] = static_cast<double>(rec.empty_finds[k]) / elapsed;
    est.mean_queue[k] = p.queue[k].saturated ? std::numeric_limits<double>::quiet_NaN()
                                             : rec.queue_time[k] / elapsed;
  }

  std::vector<double> p_b, u4_b;
  p_b.reserve(snaps.size());
  u4_b.reserve(snaps.size());
  CumulativeRecord prev{};
  for (const auto& s : snaps) {
    const auto d_total = s.cycles_total - prev.cycles_total;
    const auto d_reduced = s.cycles_reduced - prev.cycles_reduced;
    const auto d_e4 = s.leg_walks[kLeg13] - prev.leg_walks[kLeg13];
    const double d_elapsed = s.elapsed() - prev.elapsed();
    if (d_total > 0) p_b.push_back(static_cast<double>(d_reduced) / static_cast<double>(d_total));
    if (d_elapsed > 0) u4_b.push_back(static_cast<double>(d_e4) / d_elapsed);
    prev = s;
  }
  est.p_hw = batch_stats(p_b).halfwidth;
  est.u4_hw = batch_stats(u4_b).halfwidth;
  return out;
}

PooledEstimates run_replications(const ModelParams& p, const RunConfig& cfg,
                                 const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty())
    throw Error(Errc::InvalidParams, "need at least one replication seed");
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(Errc::DuplicateSeeds, "replication seeds must be distinct");

  std::vector<std::future<Estimates>> futs;
  futs.reserve(seeds.size());
  for (std::uint64_t s : seeds) {
    RunConfig c = cfg;
    c.seed = s;
    futs.push_back(std::async(std::launch::async,
                              [p, c]() { return run(p, c).estimates; }));
  }

  PooledEstimates out;
  out.runs.resize(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    out.runs[i].seed = seeds[i];
    out.runs[i].estimates = futs[i].get();
  }

  // pool in seed order so the result cannot depend on the order given
  std::vector<const Replication*> by_seed;
  by_seed.reserve(out.runs.size());
  for (const auto& r : out.runs) by_seed.push_back(&r);
  std::sort(by_seed.begin(), by_seed.end(),
            [](const Replication* a, const Replication* b) { return a->seed < b->seed; });

  std::vector<double> ps, u4s;
  for (const Replication* r : by_seed) {
    ps.push_back(r->estimates.p);
    u4s.push_back(r->estimates.u4);
  }
  const int n = static_cast<int>(ps.size());
  auto mean_se = [n](const std::vector<double>& xs, double& mean, double& se) {
    double sum = 0;
    for (double x : xs) sum += x;
    mean = sum / n;
    if (n < 2) {
      se = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
  };
  mean_se(ps, out.p_mean, out.p_se);
  mean_se(u4s, out.u4_mean, out.u4_se);
  return out;
}

}  // namespace polling
