#include "polling/scenarios.hpp"

#include <cmath>

#include "polling/csv.hpp"
#include "polling/errors.hpp"

namespace polling {

namespace {

const char* kMeasuredSource =
    "published long-run measurement (>1e8 cycles, error < 2e-4)";

ReferenceValue ref_p(double v, double tol, const char* src = kMeasuredSource) {
  return ReferenceValue{"p", v, tol, src};
}
ReferenceValue ref_u4(double v, double tol, const char* src = kMeasuredSource) {
  return ReferenceValue{"u4", v, tol, src};
}

Scenario make_example(int n, const DistributionSpec& tau2, const char* summary,
                      double u4, double p) {
  Scenario s;
  s.id = "example" + std::to_string(n);
  s.summary = summary;
  s.config = benchmark_base(4, 2);
  s.config.model.queue[1].interarrival = tau2;
  s.config.run.seed = 100 + static_cast<std::uint64_t>(n);
  s.references = {ref_p(p, 0.004), ref_u4(u4, 0.002)};
  return s;
}

}  // namespace

Config benchmark_base(int l2, int l3) {
  Config cfg;
  cfg.model.discipline = Discipline::Limited;

  // queue 1: always backlogged, instant services, one service per visit
  cfg.model.queue[0].saturated = true;
  cfg.model.queue[0].interarrival = DistributionSpec::deterministic(1);  // unused
  cfg.model.queue[0].service = DistributionSpec::deterministic(0);
  cfg.model.queue[0].limit = 1;

  cfg.model.queue[1].interarrival = DistributionSpec::uniform_by_mean(4);
  cfg.model.queue[1].service = DistributionSpec::uniform_by_mean(1);
  cfg.model.queue[1].limit = l2;

  cfg.model.queue[2].interarrival = DistributionSpec::uniform_by_mean(4);
  cfg.model.queue[2].service = DistributionSpec::uniform_by_mean(1.5);
  cfg.model.queue[2].limit = l3;

  cfg.model.switchover[kLeg12] = DistributionSpec::uniform_by_mean(0.5);
  cfg.model.switchover[kLeg23] = DistributionSpec::deterministic(0);
  cfg.model.switchover[kLeg31] = DistributionSpec::uniform_by_mean(1);
  cfg.model.switchover[kLeg13] = DistributionSpec::uniform_by_mean(1.0 / 3.0);

  cfg.run.cycles = 10'000'000;
  cfg.run.warmup = -1;
  cfg.run.seed = 1;
  cfg.run.replications = 1;
  return cfg;
}

Config saturated_oracle_config() {
  Config cfg = benchmark_base(1, 2);
  // slower queue-2 arrivals keep the quota-1 system strictly inside the
  // stability region (mean 4 would sit exactly on the boundary)
  cfg.model.queue[1].interarrival = DistributionSpec::uniform_by_mean(8);
  cfg.run.seed = 424243;
  return cfg;
}

const std::vector<Table1Row>& table1_rows() {
  static const std::vector<Table1Row> rows = {
      {0.18, 0.4181, 0.1097}, {0.19, 0.4174, 0.1095}, {0.20, 0.4162, 0.1091},
      {0.25, 0.4089, 0.1071}, {0.30, 0.3982, 0.1041}, {0.35, 0.3849, 0.1005},
      {0.40, 0.3713, 0.0969}, {0.45, 0.3571, 0.0929}, {0.50, 0.3435, 0.0892},
      {0.55, 0.3297, 0.0855}, {0.60, 0.3179, 0.0825}, {0.70, 0.2953, 0.0763},
      {0.80, 0.2762, 0.0712}, {0.90, 0.2602, 0.0670}, {1.0, 0.2461, 0.0632},
      {1.25, 0.2198, 0.0563}, {1.5, 0.2009, 0.0514},  {2.0, 0.1765, 0.0450},
      {2.5, 0.1623, 0.0413},  {3.0, 0.1527, 0.0388},  {4.0, 0.1417, 0.0360},
      {5.0, 0.1361, 0.0346},  {10.0, 0.1272, 0.0322}, {20.0, 0.1245, 0.0315},
  };
  return rows;
}

Scenario table1_scenario(double a) {
  const Table1Row* found = nullptr;
  for (const auto& row : table1_rows())
    if (row.a == a) {
      found = &row;
      break;
    }
  if (!found)
    throw Error(Errc::UnknownScenario,
                "no tabulated Weibull-shape row at a=" + fmt(a));

  Scenario s;
  s.id = "table1:a=" + fmt(a);
  s.summary = "Weibull(shape " + fmt(a) +
              ", mean 4) queue-2 interarrival times, quotas 6 and 4";
  s.config = benchmark_base(6, 4);
  s.config.model.queue[1].interarrival = DistributionSpec::weibull(a, 4);
  s.config.run.seed = 200;  // one master seed across the sweep: common random numbers
  s.references = {ref_p(found->p, 0.005), ref_u4(found->u4, 0.003)};
  return s;
}

std::vector<std::string> scenario_ids() {
  std::vector<std::string> ids = {"example1", "example2", "example3",
                                  "example4", "example5", "fig1_limit"};
  for (const auto& row : table1_rows()) ids.push_back("table1:a=" + fmt(row.a));
  return ids;
}

Scenario scenario(const std::string& id) {
  const double sqrt2 = std::sqrt(2.0);
  if (id == "example1")
    return make_example(1, DistributionSpec::uniform_by_mean(4),
                        "uniform queue-2 interarrival times, mean 4", 0.0466, 0.1825);
  if (id == "example2")
    return make_example(2, DistributionSpec::pareto(2, 2),
                        "heavy-tailed queue-2 interarrival times (density 8/x^3, "
                        "mean 4, infinite variance)",
                        0.0518, 0.2027);
  if (id == "example3")
    return make_example(3, DistributionSpec::exponential(4),
                        "exponential queue-2 interarrival times, mean 4", 0.0619,
                        0.2410);
  if (id == "example4")
    return make_example(4, DistributionSpec::pareto(8 - 4 * sqrt2, 1 + sqrt2),
                        "heavy-tailed queue-2 interarrival times matching the "
                        "exponential case in the first two moments",
                        0.0446, 0.1751);
  if (id == "example5")
    return make_example(
        5,
        DistributionSpec::two_point(4 * (2 - sqrt2), (2 + sqrt2) / 4, 4 * (2 + sqrt2)),
        "two-point queue-2 interarrival times matching the exponential case in "
        "the first three moments",
        0.0641, 0.2494);
  if (id == "fig1_limit") {
    Scenario s;
    s.id = id;
    s.summary = "deterministic queue-2 interarrival times (always 4), quotas 6 and 4";
    s.config = benchmark_base(6, 4);
    s.config.model.queue[1].interarrival = DistributionSpec::deterministic(4);
    s.config.run.seed = 106;
    s.references = {ref_p(0.1237, 0.004,
                          "published limiting value for the deterministic case")};
    return s;
  }
  if (id.rfind("table1:a=", 0) == 0) {
    const std::string num = id.substr(9);
    try {
      return table1_scenario(std::stod(num));
    } catch (const std::invalid_argument&) {
      throw Error(Errc::UnknownScenario, "bad shape value in scenario id: " + id);
    }
  }
  throw Error(Errc::UnknownScenario, "unknown scenario \"" + id + "\"");
}

}  // namespace polling
