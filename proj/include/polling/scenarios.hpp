#pragma once

#include <string>
#include <vector>

#include "polling/config.hpp"

namespace polling {

// A quantity published for a scenario, with the tolerance the reproduction
// suite must meet at its default cycle count.
struct ReferenceValue {
  std::string quantity;  // "p" or "u4"
  double value = 0;
  double tolerance = 0;
  std::string source;  // where the number was measured or derived
};

struct Scenario {
  std::string id;
  std::string summary;
  Config config;
  std::vector<ReferenceValue> references;
};

// Known ids: example1..example5, fig1_limit, plus every table1 row as
// "table1:a=<value>". scenario() throws Error{UnknownScenario}.
std::vector<std::string> scenario_ids();
Scenario scenario(const std::string& id);

struct Table1Row {
  double a;  // Weibull shape of the queue-2 interarrival law
  double p;
  double u4;
};
const std::vector<Table1Row>& table1_rows();
Scenario table1_scenario(double a);

// The common three-queue benchmark system behind all embedded scenarios:
// queue 1 saturated with instant services, queue 2 the adaptive one, uniform
// laws everywhere unless a scenario overrides the queue-2 interarrival law.
Config benchmark_base(int l2, int l3);

// Exactly solvable variant (service quota 1 at queue 2) used to pin the
// simulator against closed-form long-run rates: p = 15/47, u4 = 15/136.
Config saturated_oracle_config();

}  // namespace polling
