#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "polling/model.hpp"
#include "polling/scenarios.hpp"
#include "polling/sim.hpp"
#include "support/checks.hpp"

using namespace polling;

namespace {

ModelParams make_system(std::array<DistributionSpec, 3> arr,
                        std::array<DistributionSpec, 3> svc,
                        std::array<DistributionSpec, 4> walk, std::array<int, 3> limits,
                        Discipline disc = Discipline::Limited) {
  ModelParams p;
  for (int k = 0; k < 3; ++k) {
    p.queue[k].interarrival = arr[k];
    p.queue[k].service = svc[k];
    p.queue[k].limit = limits[k];
  }
  p.switchover = walk;
  p.discipline = disc;
  return p;
}

// cheap per-step assertion counter: doctest CHECKs are too slow for 10^5 calls
struct Scan {
  long violations = 0;
  std::string first;
  void expect(bool ok, const char* what) {
    if (!ok && ++violations == 1) first = what;
  }
};

void scan_invariants(const ModelParams& p, std::uint64_t seed, long steps, Scan& s) {
  Simulation sim(p, seed);
  const bool limited = p.discipline == Discipline::Limited;
  double prev_t = 0;
  for (long i = 0; i < steps; ++i) {
    sim.step();
    const double t = sim.now();
    s.expect(t >= prev_t, "clock went backwards");
    prev_t = t;
    const auto& q = sim.levels();
    s.expect(q[0] >= 0 && q[1] >= 0 && q[2] >= 0, "negative queue level");
    const auto& r = sim.record();
    s.expect(std::abs(r.elapsed() - t) <= 1e-9 * (1.0 + t),
             "attributed time drifted from the clock");
    const auto& w = r.leg_walks;
    s.expect(std::llabs(w[kLeg12] - w[kLeg23]) <= 1, "station-2 walk legs out of step");
    s.expect(std::llabs(w[kLeg12] + w[kLeg13] - w[kLeg31]) <= 1,
             "station-1 walk legs out of step");
    s.expect(r.cycles_total == w[kLeg31], "cycle count detached from return walks");
    s.expect(r.cycles_reduced <= r.cycles_total, "more reduced cycles than cycles");
    const auto d13 = r.empty_finds[1] - w[kLeg13];
    s.expect(d13 >= 0 && d13 <= 1, "skip walks not matching queue-2 empty finds");
    const auto dred = w[kLeg13] - r.cycles_reduced;
    s.expect(dred >= 0 && dred <= 1, "reduced cycles not matching skip walks");
    if (limited) {
      s.expect(r.completions[0] <= p.queue[0].limit * (w[kLeg31] + 1),
               "queue 1 served beyond its quota");
      s.expect(r.completions[1] <= p.queue[1].limit * (w[kLeg12] + 1),
               "queue 2 served beyond its quota");
      s.expect(r.completions[2] <= p.queue[2].limit * (w[kLeg23] + w[kLeg13] + 1),
               "queue 3 served beyond its quota");
    }
  }
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("per-step invariants hold under every discipline") {
  // zero-duration walks and services force instantaneous transition chains
  const auto walk = std::array<DistributionSpec, 4>{
      DistributionSpec::uniform_by_mean(0.5), DistributionSpec::deterministic(0),
      DistributionSpec::deterministic(1), DistributionSpec::uniform_by_mean(0.25)};
  const auto arr = std::array<DistributionSpec, 3>{DistributionSpec::exponential(5),
                                                   DistributionSpec::exponential(5),
                                                   DistributionSpec::exponential(5)};
  const auto svc = std::array<DistributionSpec, 3>{DistributionSpec::exponential(1),
                                                   DistributionSpec::uniform_by_mean(1),
                                                   DistributionSpec::deterministic(0)};
  for (Discipline disc : {Discipline::Limited, Discipline::Gated, Discipline::Exhaustive}) {
    Scan s;
    scan_invariants(make_system(arr, svc, walk, {2, 3, 1}, disc), 9001, 300'000, s);
    CHECK_MESSAGE(s.violations == 0,
                  discipline_name(disc), ": ", s.first, " (x", s.violations, ")");
  }
}

TEST_CASE("visits serve only the customers already present") {
  // deterministic pattern: queue-2 arrivals every 0.6, half-unit services,
  // quota 3, unit walks, nothing else in the system. The server reaches
  // queue 2 at t=1 with one customer waiting; the t=1.2 arrival must wait a
  // full round even though the quota allows more service.
  auto p = make_system({DistributionSpec::deterministic(1e9),
                        DistributionSpec::deterministic(0.6),
                        DistributionSpec::deterministic(1e9)},
                       {DistributionSpec::deterministic(1),
                        DistributionSpec::deterministic(0.5),
                        DistributionSpec::deterministic(1)},
                       {DistributionSpec::deterministic(1), DistributionSpec::deterministic(1),
                        DistributionSpec::deterministic(1), DistributionSpec::deterministic(1)},
                       {1, 3, 1});
  Simulation sim(p, 1);
  std::vector<double> q2_service_ends;
  sim.set_trace([&](const TraceRow& row) {
    if (row.kind == EventKind::ServiceEnd && row.station == 2)
      q2_service_ends.push_back(row.t);
  });
  while (sim.cycles_done() < 3 && sim.now() < 50) sim.step();

  REQUIRE(q2_service_ends.size() >= 4);
  CHECK(q2_service_ends[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(q2_service_ends[1] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(q2_service_ends[2] == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(q2_service_ends[3] == doctest::Approx(6.0).epsilon(1e-12));
  // exactly one service in the first visit
  int before_second_round = 0;
  for (double t : q2_service_ends)
    if (t < 2.2) ++before_second_round;
  CHECK(before_second_round == 1);
}

TEST_CASE("empty system alternates standard and reduced cycles") {
  const auto never = DistributionSpec::deterministic(1e9);
  const auto unit = DistributionSpec::deterministic(1);
  auto p = make_system({never, never, never}, {unit, unit, unit},
                       {unit, unit, unit, unit}, {1, 1, 1});
  Simulation sim(p, 7);
  std::vector<TraceRow> rows;
  sim.set_trace([&](const TraceRow& row) { rows.push_back(row); });

  bool saw_latch = false;
  while (sim.cycles_done() < 10) {
    sim.step();
    saw_latch = saw_latch || sim.skip_pending();
  }
  CHECK(saw_latch);
  CHECK(!sim.skip_pending());  // consumed by the last reduced cycle

  const auto& r = sim.record();
  CHECK(r.cycles_total == 10);
  CHECK(r.cycles_reduced == 5);
  CHECK(r.empty_finds[1] == 5);   // queue 2 is seen only by standard cycles
  CHECK(r.empty_finds[0] == 10);
  CHECK(r.empty_finds[2] == 10);
  CHECK(r.leg_walks[kLeg13] == 5);
  CHECK(r.completions[0] + r.completions[1] + r.completions[2] == 0);
  CHECK(r.elapsed() == 25.0);  // 5 standard cycles of 3 + 5 reduced of 2
  CHECK(sim.now() == 25.0);

  // first transition: the server starts at station 1 and finds it empty
  REQUIRE(!rows.empty());
  CHECK(rows[0].t == 0.0);
  CHECK(rows[0].kind == EventKind::EmptyFind);
  CHECK(rows[0].station == 1);

  // cycle-closing walk ends come at 3,5,8,10,...: durations alternate 3,2
  std::vector<double> closes;
  for (const auto& row : rows)
    if (row.kind == EventKind::WalkEnd && row.station == 1) closes.push_back(row.t);
  REQUIRE(closes.size() == 10);
  double prev = 0;
  for (std::size_t i = 0; i < closes.size(); ++i) {
    CHECK(closes[i] - prev == (i % 2 == 0 ? 3.0 : 2.0));
    prev = closes[i];
  }
}

TEST_CASE("runs are reproducible and seed-sensitive") {
  auto cfg = benchmark_base(4, 2);
  RunConfig rc;
  rc.cycles = 10'000;
  rc.seed = 31337;
  const auto a = run(cfg.model, rc);
  const auto b = run(cfg.model, rc);
  CHECK(a.estimates.p == b.estimates.p);
  CHECK(a.estimates.u4 == b.estimates.u4);
  CHECK(a.estimates.elapsed == b.estimates.elapsed);
  for (int k = 0; k < 3; ++k)
    CHECK(a.record.completions[k] == b.record.completions[k]);

  rc.seed = 31338;
  const auto c = run(cfg.model, rc);
  CHECK(c.estimates.elapsed != a.estimates.elapsed);
}

TEST_CASE("run accounting") {
  auto cfg = benchmark_base(4, 2);
  RunConfig rc;
  rc.cycles = 5'000;
  rc.warmup = 200;
  rc.seed = 5;
  const auto res = run(cfg.model, rc);
  const auto& est = res.estimates;
  CHECK(est.cycles == 5'000);  // exactly the requested post-warmup cycles
  CHECK(est.reduced_cycles == res.record.cycles_reduced);
  CHECK(est.elapsed == res.record.elapsed());
  CHECK(est.p == doctest::Approx(double(est.reduced_cycles) / est.cycles).epsilon(1e-15));
  // the skip-walk rate and the latch bookkeeping agree to boundary effects
  CHECK(std::abs(est.u4 * est.elapsed - double(res.record.leg_walks[kLeg13])) < 1e-6);
  CHECK(std::llabs(res.record.empty_finds[1] - res.record.leg_walks[kLeg13]) <= 2);
  CHECK(std::llabs(res.record.leg_walks[kLeg13] - res.record.cycles_reduced) <= 2);
  // saturated queue: no mean level; the others have one
  CHECK(std::isnan(est.mean_queue[0]));
  CHECK(est.mean_queue[1] >= 0);
  CHECK(est.mean_queue[2] >= 0);
  CHECK(est.p_hw > 0);
  CHECK(est.u4_hw > 0);

  SUBCASE("bad run configs") {
    RunConfig bad;
    bad.cycles = 0;
    EXPECT_ERRC(run(cfg.model, bad), Errc::InvalidParams);
    bad.cycles = 5;
    bad.warmup = 5;
    EXPECT_ERRC(run(cfg.model, bad), Errc::InvalidParams);
  }
}

TEST_CASE("starved queue 2 makes every second cycle reduced") {
  auto p = make_system({DistributionSpec::exponential(10),
                        DistributionSpec::deterministic(1e9),
                        DistributionSpec::exponential(10)},
                       {DistributionSpec::exponential(1), DistributionSpec::exponential(1),
                        DistributionSpec::exponential(1)},
                       {DistributionSpec::deterministic(1), DistributionSpec::deterministic(1),
                        DistributionSpec::deterministic(1), DistributionSpec::deterministic(1)},
                       {1, 1, 1});
  RunConfig rc;
  rc.cycles = 10'000;
  rc.seed = 77;
  const auto res = run(p, rc);
  CHECK(std::abs(res.estimates.p - 0.5) < 1e-3);
  CHECK(res.estimates.mean_queue[1] == 0.0);
  CHECK(std::abs(res.estimates.u4 * res.estimates.elapsed - 5000.0) < 3.0);
  CHECK(std::abs(res.estimates.empty_find_rate[1] * res.estimates.elapsed - 5000.0) < 3.0);
}

TEST_CASE("simulated rates approach the exact long-run values") {
  // quota-1 variant with known exact cycle rates: standard 4/17, reduced 15/136
  const auto cfg = saturated_oracle_config();
  RunConfig rc;
  rc.cycles = 300'000;
  rc.seed = cfg.run.seed;
  const auto est = run(cfg.model, rc).estimates;
  CHECK(std::abs(est.p - 15.0 / 47) < 0.01);
  CHECK(std::abs(est.u4 - 15.0 / 136) < 0.005);

  // quota-4/2 variant against its published measurement
  const auto ex1 = scenario("example1");
  rc.cycles = 200'000;
  rc.seed = ex1.config.run.seed;
  const auto e1 = run(ex1.config.model, rc).estimates;
  CHECK(std::abs(e1.p - 0.1825) < 0.015);
  CHECK(std::abs(e1.u4 - 0.0466) < 0.006);
}

TEST_CASE("trace stream is ordered and well-formed") {
  const auto cfg = saturated_oracle_config();
  RunConfig rc;
  rc.cycles = 2'000;
  rc.seed = 99;
  std::vector<TraceRow> rows;
  (void)run(cfg.model, rc, [&](const TraceRow& row) { rows.push_back(row); });

  REQUIRE(!rows.empty());
  double prev_t = 0;
  std::int64_t prev_cycle = 0;
  bool saw_reduced = false, saw_sat_service = false;
  for (const auto& row : rows) {
    CHECK(row.t >= prev_t);
    prev_t = row.t;
    CHECK(row.cycle >= prev_cycle);
    prev_cycle = row.cycle;
    CHECK(row.station >= 1);
    CHECK(row.station <= 3);
    CHECK(row.q[0] >= 0);
    CHECK(row.q[1] >= 0);
    CHECK(row.q[2] >= 0);
    // the saturated queue has no arrival process and holds no countable queue
    CHECK(!(row.kind == EventKind::Arrival && row.station == 1));
    if (row.kind == EventKind::ServiceEnd && row.station == 1) {
      saw_sat_service = true;
      CHECK(row.q[0] == 0);
    }
    saw_reduced = saw_reduced || row.cycle_type == CycleType::Reduced;
  }
  CHECK(saw_reduced);
  CHECK(saw_sat_service);
}

TEST_CASE("independent replications pool cleanly") {
  auto cfg = benchmark_base(4, 2);
  RunConfig rc;
  rc.cycles = 4'000;
  const auto ab = run_replications(cfg.model, rc, {5, 3});
  REQUIRE(ab.runs.size() == 2);
  CHECK(ab.runs[0].seed == 5);
  CHECK(ab.runs[1].seed == 3);
  CHECK(ab.p_mean ==
        doctest::Approx(0.5 * (ab.runs[0].estimates.p + ab.runs[1].estimates.p))
            .epsilon(1e-15));
  CHECK(ab.p_se >= 0);
  CHECK(std::isfinite(ab.p_se));

  const auto ba = run_replications(cfg.model, rc, {3, 5});
  CHECK(ba.p_mean == ab.p_mean);  // pooled statistics ignore the given order
  CHECK(ba.p_se == ab.p_se);
  CHECK(ba.u4_mean == ab.u4_mean);
  CHECK(ba.u4_se == ab.u4_se);

  EXPECT_ERRC(run_replications(cfg.model, rc, {7, 7}), Errc::DuplicateSeeds);
  EXPECT_ERRC(run_replications(cfg.model, rc, {}), Errc::InvalidParams);
}

TEST_CASE("event kind names") {
  CHECK(std::string(event_kind_name(EventKind::Arrival)) == "arrival");
  CHECK(std::string(event_kind_name(EventKind::ServiceEnd)) == "service_end");
  CHECK(std::string(event_kind_name(EventKind::WalkEnd)) == "walk_end");
  CHECK(std::string(event_kind_name(EventKind::EmptyFind)) == "empty_find");
}

}  // TEST_SUITE
