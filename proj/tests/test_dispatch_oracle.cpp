#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gridfreq/dispatch.hpp"
#include "helpers.hpp"
#include "uc_oracle.hpp"

using namespace gridfreq;
using testutil::oracle_uc;
using testutil::random_tiny_instance;
using testutil::single_region;

TEST_CASE("solver matches the exhaustive oracle on the worked toy") {
  Portfolio p;
  p.push_back(testutil::sync_unit("A", "R1", 60, 10.0));
  p.push_back(testutil::sync_unit("B", "R1", 60, 20.0));
  p.push_back(testutil::sync_unit("C", "R1", 60, 30.0));
  auto sc = testutil::make_scenario(std::move(p), testutil::flat_traces({{"R1", 100.0}}, 1, 0.0));

  auto oracle = oracle_uc(sc, 0.0);
  REQUIRE(oracle.feasible);
  CHECK(oracle.cost == Catch::Approx(60 * 10 + 40 * 20));

  auto uc = solve_uc(sc, single_region(), {});
  CHECK(uc_total_cost(uc, sc.portfolio) == Catch::Approx(oracle.cost).epsilon(1e-9));
}

TEST_CASE("solver cost matches the oracle within 0.1% on randomized tiny instances") {
  std::mt19937_64 rng(20240817);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    double reserve = 0;
    Scenario sc = random_tiny_instance(rng, reserve);
    auto oracle = oracle_uc(sc, reserve);

    UcOptions opt;
    opt.reserve_fraction = reserve;
    std::vector<UcHour> uc;
    bool solver_feasible = true;
    try {
      uc = solve_uc(sc, single_region(), opt);
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::Infeasible);
      solver_feasible = false;
    }

    INFO("trial " << trial);
    if (!oracle.feasible) {
      // the oracle proved no commitment works, the solver must agree
      CHECK_FALSE(solver_feasible);
      continue;
    }
    REQUIRE(solver_feasible);
    auto rep = validate_uc(uc, sc, single_region(), opt);
    INFO(rep.summary());
    CHECK(rep.empty());
    double cost = uc_total_cost(uc, sc.portfolio);
    CHECK(cost >= oracle.cost - 1e-6);
    CHECK(cost <= oracle.cost * 1.001 + 1e-6);
    ++checked;
  }
  // the generator keeps demand inside the committable envelope, so nearly
  // every draw should be feasible
  CHECK(checked >= 40);
}
