#include <doctest.h>

#include <string>

#include "polling/model.hpp"
#include "polling/scenarios.hpp"
#include "support/checks.hpp"

using namespace polling;

namespace {

// The common benchmark system: queue 1 saturated with instant service,
// queues 2 and 3 uniform, walks (0.5, 0, 1, 1/3).
ModelParams benchmark_params(int l2, int l3) { return benchmark_base(l2, l3).model; }

ModelParams symmetric_exponential(double lam1, double lam2, double lam3) {
  ModelParams p;
  for (int k = 0; k < 3; ++k) {
    p.queue[k].service = DistributionSpec::exponential(1.0);
    p.queue[k].limit = 1;
  }
  p.queue[0].interarrival = DistributionSpec::exponential(1.0 / lam1);
  p.queue[1].interarrival = DistributionSpec::exponential(1.0 / lam2);
  p.queue[2].interarrival = DistributionSpec::exponential(1.0 / lam3);
  for (int leg = 0; leg < 4; ++leg)
    p.switchover[leg] = DistributionSpec::deterministic(1.0);
  return p;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("benchmark parameters validate and derive") {
  const ModelParams p = benchmark_params(4, 2);
  CHECK(!has_errors(validate(p)));

  const DerivedQuantities d = derive_quantities(p);
  CHECK(d.saturated[0]);
  CHECK(d.arrival_rate[0] == 0.0);
  CHECK(d.arrival_rate[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d.arrival_rate[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d.mean_service[0] == 0.0);
  CHECK(d.mean_service[1] == 1.0);
  CHECK(d.mean_service[2] == 1.5);
  CHECK(d.total_load == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(d.standard_walk_mean == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(d.reduced_walk_mean == doctest::Approx(1.0 + 1.0 / 3.0).epsilon(1e-15));
  CHECK(d.warnings.empty());
}

TEST_CASE("validation rejects broken parameter sets") {
  SUBCASE("limit below one") {
    ModelParams p = benchmark_params(4, 2);
    p.queue[1].limit = 0;
    CHECK(has_errors(validate(p)));
    EXPECT_ERRC(derive_quantities(p), Errc::InvalidParams);
  }
  SUBCASE("zero mean interarrival at a live queue") {
    ModelParams p = benchmark_params(4, 2);
    p.queue[2].interarrival = DistributionSpec::deterministic(0.0);
    CHECK(has_errors(validate(p)));
  }
  SUBCASE("negative distribution parameter") {
    ModelParams p = benchmark_params(4, 2);
    p.queue[1].service = DistributionSpec::uniform_by_mean(-1.0);
    CHECK(has_errors(validate(p)));
  }
  SUBCASE("saturated queue outside the limited discipline") {
    ModelParams p = benchmark_params(4, 2);
    p.discipline = Discipline::Gated;
    CHECK(has_errors(validate(p)));
    p.discipline = Discipline::Exhaustive;
    CHECK(has_errors(validate(p)));
  }
}

TEST_CASE("validation warns without blocking") {
  SUBCASE("reduced route not shorter") {
    ModelParams p = benchmark_params(4, 2);
    p.switchover[kLeg13] = DistributionSpec::deterministic(2.0);  // detour
    const auto v = validate(p);
    CHECK(!has_errors(v));
    REQUIRE(v.size() == 1);
    CHECK(v[0].warning);
    CHECK(v[0].where == "switchover");
    const DerivedQuantities d = derive_quantities(p);
    REQUIRE(d.warnings.size() == 1);
  }
  SUBCASE("saturated queue with real service times") {
    ModelParams p = benchmark_params(4, 2);
    p.queue[0].service = DistributionSpec::exponential(1.0);
    const auto v = validate(p);
    CHECK(!has_errors(v));
    REQUIRE(v.size() == 1);
    CHECK(v[0].warning);
    // the saturated queue's load stays out of the total
    const DerivedQuantities d = derive_quantities(p);
    CHECK(d.load[0] == 0.0);
    CHECK(d.total_load == doctest::Approx(0.625).epsilon(1e-15));
  }
}

TEST_CASE("derived quantities for a fully symmetric system") {
  const DerivedQuantities d = derive_quantities(symmetric_exponential(0.1, 0.1, 0.1));
  CHECK(d.total_load == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d.standard_walk_mean == 3.0);
  CHECK(d.reduced_walk_mean == 2.0);
  for (int k = 0; k < 3; ++k) {
    CHECK(!d.saturated[k]);
    CHECK(d.arrival_rate[k] == doctest::Approx(0.1).epsilon(1e-15));
  }
}

TEST_CASE("cycle routing rule") {
  CHECK(next_cycle_type(CycleType::Standard, true) == CycleType::Reduced);
  CHECK(next_cycle_type(CycleType::Standard, false) == CycleType::Standard);
  CHECK(next_cycle_type(CycleType::Reduced, std::nullopt) == CycleType::Standard);
  EXPECT_ERRC(next_cycle_type(CycleType::Standard, std::nullopt), Errc::InconsistentInput);
  EXPECT_ERRC(next_cycle_type(CycleType::Reduced, true), Errc::InconsistentInput);
  EXPECT_ERRC(next_cycle_type(CycleType::Reduced, false), Errc::InconsistentInput);
}

TEST_CASE("name helpers") {
  CHECK(std::string(discipline_name(Discipline::Limited)) == "limited");
  CHECK(std::string(discipline_name(Discipline::Gated)) == "gated");
  CHECK(std::string(discipline_name(Discipline::Exhaustive)) == "exhaustive");
  CHECK(std::string(cycle_type_name(CycleType::Standard)) == "standard");
  CHECK(std::string(cycle_type_name(CycleType::Reduced)) == "reduced");
}

}  // TEST_SUITE
