#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "polling/model.hpp"
#include "polling/rng.hpp"

namespace polling {

struct RunConfig {
  std::int64_t cycles = 10'000'000;  // cycles measured after warmup
  std::int64_t warmup = -1;          // -1: default to 1% of cycles
  std::uint64_t seed = 1;
};

enum class EventKind { Arrival, ServiceEnd, WalkEnd, EmptyFind };

struct TraceRow {
  double t = 0;
  EventKind kind = EventKind::Arrival;
  int station = 0;  // 1-based queue; for walks, the destination station
  std::array<std::int64_t, 3> q{};
  std::int64_t cycle = 0;
  CycleType cycle_type = CycleType::Standard;
};

// Everything the estimators need, accumulated since the last reset. Time is
// attributed to exactly one bucket per event interval, so elapsed() holds by
// construction and the "no idle time" property is structural.
struct CumulativeRecord {
  std::array<double, 3> busy{};               // time serving each queue
  std::array<double, 4> walk{};               // time walking each leg
  std::array<std::int64_t, 3> completions{};  // finished services
  std::array<std::int64_t, 4> leg_walks{};    // finished walks per leg
  std::array<std::int64_t, 3> empty_finds{};  // server met an empty queue
  std::array<double, 3> queue_time{};         // integral of queue length dt
  std::int64_t cycles_total = 0;
  std::int64_t cycles_reduced = 0;
  std::int64_t cycles_with_q2_service = 0;

  double elapsed() const {
    return busy[0] + busy[1] + busy[2] + walk[0] + walk[1] + walk[2] + walk[3];
  }
};

struct Estimates {
  double p = 0;    // long-run fraction of reduced cycles
  double u4 = 0;   // long-run rate of direct 1->3 walks per unit time
  double p_hw = 0, u4_hw = 0;  // 95% batch-means half-widths
  std::array<double, 3> empty_find_rate{};
  std::array<double, 3> mean_queue{};  // time averages; NaN at saturated queues
  std::int64_t cycles = 0, reduced_cycles = 0;
  double elapsed = 0;
};

// One polling server, three queues, event by event. step() advances exactly
// one transition: a timed event (arrival or activity end) or one link of an
// instantaneous chain (zero service or walk times are a first-class regime
// here, so chains are driven iteratively, never recursively).
class Simulation {
 public:
  Simulation(const ModelParams& p, std::uint64_t seed);

  void step();
  std::int64_t cycles_done() const { return cycles_done_; }
  void reset_record() { record_ = CumulativeRecord{}; }

  const CumulativeRecord& record() const { return record_; }
  double now() const { return clock_; }
  const std::array<std::int64_t, 3>& levels() const { return q_; }
  CycleType cycle_type() const { return cycle_type_; }
  bool skip_pending() const { return latch_; }
  void set_trace(std::function<void(const TraceRow&)> sink) { trace_ = std::move(sink); }

 private:
  enum class Pending : std::uint8_t { None, Enter, ServiceEnd, WalkEnd };
  enum class Doing : std::uint8_t { Serving, Walking };

  void dispatch(Pending what, int idx);
  void enter_station(int k);
  void begin_service(int k);
  void finish_service(int k);
  void depart(int k);
  void begin_walk(int leg);
  void finish_walk(int leg);
  void arrival(int k);
  void advance_to(double t);
  void check_counts() const;
  double draw(const Sampler& s, Xoshiro256pp& g, const char* what);
  void emit(EventKind kind, int station_1based);

  // model
  Discipline discipline_;
  std::array<bool, 3> saturated_{};
  std::array<int, 3> limit_{};
  std::array<Sampler, 3> arrival_s_;
  std::array<Sampler, 3> service_s_;
  std::array<Sampler, 4> switch_s_;
  StreamSet streams_;

  // dynamic state
  double clock_ = 0;
  std::array<std::int64_t, 3> q_{};
  std::array<double, 3> next_arrival_{};
  Doing doing_ = Doing::Walking;
  int doing_idx_ = 0;     // station while serving, leg while walking
  double activity_end_ = 0;
  bool activity_live_ = false;
  Pending pending_ = Pending::None;
  int pending_idx_ = 0;
  bool latch_ = false;    // queue 2 found empty in the current standard cycle
  CycleType cycle_type_ = CycleType::Standard;
  std::int64_t served_this_visit_ = 0;
  std::int64_t visit_target_ = 0;  // services owed this visit; -1: until empty
  std::int64_t cycles_done_ = 0;

  CumulativeRecord record_;
  std::function<void(const TraceRow&)> trace_;
};

struct RunResult {
  Estimates estimates;
  CumulativeRecord record;
};

RunResult run(const ModelParams& p, const RunConfig& cfg,
              std::function<void(const TraceRow&)> trace = {});

struct Replication {
  std::uint64_t seed = 0;
  Estimates estimates;
};

struct PooledEstimates {
  std::vector<Replication> runs;
  double p_mean = 0, p_se = 0;
  double u4_mean = 0, u4_se = 0;
};

// Independent replications differing only in the seed; pooled statistics do
// not depend on the order the seeds are given in.
PooledEstimates run_replications(const ModelParams& p, const RunConfig& cfg,
                                 const std::vector<std::uint64_t>& seeds);

const char* event_kind_name(EventKind k);

}  // namespace polling
