#include <doctest.h>

#include <array>
#include <random>

#include "polling/model.hpp"
#include "polling/stability.hpp"
#include "support/checks.hpp"

using namespace polling;

namespace {

// Hand-built derived quantities: the classifier needs only rates and means.
DerivedQuantities make_derived(std::array<double, 3> lambda, std::array<double, 3> es,
                               std::array<double, 4> walk,
                               Discipline disc = Discipline::Limited) {
  DerivedQuantities d;
  d.discipline = disc;
  for (int k = 0; k < 3; ++k) {
    d.arrival_rate[k] = lambda[k];
    d.mean_service[k] = es[k];
    d.load[k] = lambda[k] * es[k];
    d.total_load += d.load[k];
  }
  for (int leg = 0; leg < 4; ++leg) d.mean_switchover[leg] = walk[leg];
  d.standard_walk_mean = walk[0] + walk[1] + walk[2];
  d.reduced_walk_mean = walk[2] + walk[3];
  return d;
}

int rank(const StabilityVerdict& v) {
  switch (v.kind) {
    case VerdictKind::Stable: return 0;
    case VerdictKind::Indeterminate: return 1;
    case VerdictKind::Unstable: return 2;
  }
  return -1;
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("symmetric light-load system is stable") {
  const auto d = make_derived({0.1, 0.1, 0.1}, {1, 1, 1}, {1, 1, 1, 1});
  const auto v = check_limited(d, {1, 1, 1});
  CHECK(v.kind == VerdictKind::Stable);
  REQUIRE(v.conditions.size() == 6);
  for (int i = 0; i < 3; ++i) {  // all three sufficient conditions sit at 0.6
    CHECK(v.conditions[i].lhs == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(v.conditions[i].holds);
  }
  for (int i = 3; i < 6; ++i) CHECK(!v.conditions[i].holds);
}

TEST_CASE("overloaded adaptive queue is transient") {
  const auto d = make_derived({0.1, 0.3, 0.1}, {1, 1, 1}, {1, 1, 1, 1});
  const auto v = check_limited(d, {1, 1, 1});
  CHECK(v.kind == VerdictKind::Unstable);
  CHECK(v.transient);
  REQUIRE(v.conditions.size() == 6);
  CHECK(v.conditions[0].name == "stable.q2");
  CHECK(v.conditions[0].lhs == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(v.conditions[3].name == "unstable.q2");
  CHECK(v.conditions[3].lhs == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(v.conditions[3].holds);
  CHECK(v.conditions[1].lhs == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(v.conditions[4].lhs == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("classifier gap: neither side decides") {
  // queue-2 quota 4 with a short shortcut leg: the sufficient set fails at
  // queue 1 while no necessary condition fires
  const auto d = make_derived({0.2, 0.2, 0.02}, {1, 1, 1}, {1, 1, 1, 0});
  const auto v = check_limited(d, {1, 4, 1});
  CHECK(v.kind == VerdictKind::Indeterminate);
  REQUIRE(v.conditions.size() == 6);
  CHECK(v.conditions[0].lhs == doctest::Approx(0.57).epsilon(1e-12));
  CHECK(v.conditions[1].lhs == doctest::Approx(1.02).epsilon(1e-12));
  CHECK(v.conditions[2].lhs == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(v.conditions[3].lhs == doctest::Approx(0.57).epsilon(1e-12));
  CHECK(v.conditions[4].lhs == doctest::Approx(0.87).epsilon(1e-12));
  CHECK(v.conditions[5].lhs == doctest::Approx(0.51).epsilon(1e-12));
  CHECK(!v.conditions[1].holds);
  for (int i = 3; i < 6; ++i) CHECK(!v.conditions[i].holds);
}

TEST_CASE("unit queue-2 quota never lands in the gap") {
  std::mt19937_64 gen(20240816);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> lim(1, 5);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::array<double, 3> lambda = {0.01 + 1.5 * u01(gen), 0.01 + 1.5 * u01(gen),
                                          0.01 + 1.5 * u01(gen)};
    const std::array<double, 3> es = {2.0 * u01(gen), 2.0 * u01(gen), 2.0 * u01(gen)};
    const std::array<double, 4> walk = {2.0 * u01(gen), 2.0 * u01(gen),
                                        0.01 + 2.0 * u01(gen), 2.0 * u01(gen)};
    const std::array<int, 3> limits = {lim(gen), 1, lim(gen)};
    const auto v = check_limited(make_derived(lambda, es, walk), limits);
    REQUIRE(v.kind != VerdictKind::Indeterminate);
  }
}

TEST_CASE("raising an arrival rate never restores stability") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> lim(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 3> lambda = {0.05 + 0.4 * u01(gen), 0.0, 0.05 + 0.4 * u01(gen)};
    const std::array<double, 3> es = {0.5 + u01(gen), 0.5 + u01(gen), 0.5 + u01(gen)};
    const std::array<double, 4> walk = {u01(gen), u01(gen), 0.1 + u01(gen), 0.5 * u01(gen)};
    const std::array<int, 3> limits = {lim(gen), lim(gen), lim(gen)};
    int prev = 0;
    for (double l2 = 0.02; l2 < 1.2; l2 += 0.02) {
      lambda[1] = l2;
      const int r = rank(check_limited(make_derived(lambda, es, walk), limits));
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("conditions are invariant under a change of time unit") {
  const std::array<double, 3> lambda = {0.3, 0.2, 0.1};
  const std::array<double, 3> es = {1.0, 0.7, 1.3};
  const std::array<double, 4> walk = {0.5, 0.0, 1.0, 0.4};
  const std::array<int, 3> limits = {2, 3, 1};
  const auto v1 = check_limited(make_derived(lambda, es, walk), limits);
  for (double c : {0.125, 8.0, 3.7}) {
    std::array<double, 3> lam2{}, es2{};
    std::array<double, 4> walk2{};
    for (int k = 0; k < 3; ++k) {
      lam2[k] = lambda[k] / c;
      es2[k] = es[k] * c;
    }
    for (int leg = 0; leg < 4; ++leg) walk2[leg] = walk[leg] * c;
    const auto v2 = check_limited(make_derived(lam2, es2, walk2), limits);
    CHECK(v2.kind == v1.kind);
    for (size_t i = 0; i < v1.conditions.size(); ++i)
      CHECK(v2.conditions[i].lhs ==
            doctest::Approx(v1.conditions[i].lhs).epsilon(1e-12));
  }
}

TEST_CASE("gated and exhaustive verdicts depend on total load only") {
  auto d = make_derived({0.25, 0.25, 0.0}, {1.0, 1.5, 1.0}, {0.5, 0, 1, 1.0 / 3.0},
                        Discipline::Gated);
  CHECK(d.total_load == doctest::Approx(0.625).epsilon(1e-15));
  auto v = check_gated_exhaustive(d);
  CHECK(v.kind == VerdictKind::Stable);
  REQUIRE(v.conditions.size() == 1);
  CHECK(v.conditions[0].name == "load");

  d.total_load = 1.0;  // exactly critical
  v = check_gated_exhaustive(d);
  CHECK(v.kind == VerdictKind::Unstable);
  CHECK(!v.transient);

  d.total_load = 3.0;
  v = check_gated_exhaustive(d);
  CHECK(v.kind == VerdictKind::Unstable);
  CHECK(v.transient);
}

TEST_CASE("classifier rejects unsupported inputs") {
  auto d = make_derived({0.1, 0.1, 0.1}, {1, 1, 1}, {1, 1, 1, 1});
  SUBCASE("wrong discipline") {
    d.discipline = Discipline::Gated;
    EXPECT_ERRC(check_limited(d, {1, 1, 1}), Errc::NotLimitedDiscipline);
  }
  SUBCASE("saturated probe") {
    d.saturated[0] = true;
    EXPECT_ERRC(check_limited(d, {1, 1, 1}), Errc::SaturatedModelRejected);
    EXPECT_ERRC(check_gated_exhaustive(d), Errc::SaturatedModelRejected);
    EXPECT_ERRC(divergence_rates(d, {1, 1, 1}), Errc::SaturatedModelRejected);
  }
  SUBCASE("bad limits") {
    EXPECT_ERRC(check_limited(d, {1, 0, 1}), Errc::InvalidParams);
  }
}

TEST_CASE("growth-rate lower bounds") {
  // transient fixture: queue 2's margin 0.4 spread over a 4-time-unit round
  const auto unstable = make_derived({0.1, 0.3, 0.1}, {1, 1, 1}, {1, 1, 1, 1});
  const auto g = divergence_rates(unstable, {1, 1, 1});
  CHECK(g[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g[0] == doctest::Approx(-0.1 / 3.5).epsilon(1e-9));
  CHECK(g[2] == doctest::Approx(-0.1 / 3.5).epsilon(1e-9));

  // stable fixture: every bound negative
  const auto stable = make_derived({0.1, 0.1, 0.1}, {1, 1, 1}, {1, 1, 1, 1});
  for (double x : divergence_rates(stable, {1, 1, 1})) CHECK(x < 0);

  // boundary: load exactly 1 - lambda2 * walk gives a zero queue-2 bound
  const auto critical = make_derived({0.0, 0.25, 0.0}, {1, 1, 1}, {1, 1, 1, 1});
  CHECK(divergence_rates(critical, {1, 1, 1})[1] == 0.0);
}

}  // TEST_SUITE
