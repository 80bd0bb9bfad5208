#include <catch2/catch_amalgamated.hpp>

#include "gridfreq/contingency.hpp"
#include "gridfreq/dispatch.hpp"
#include "helpers.hpp"

using namespace gridfreq;
using testutil::chain;
using testutil::flat_traces;
using testutil::make_scenario;
using testutil::single_region;
using testutil::sync_unit;
using testutil::syncon_unit;
using testutil::wind_unit;

namespace {

int unit_index(const Portfolio& p, const std::string& id) {
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i].id == id) return int(i);
  return -1;
}

Scenario abc_toy(double reserve = 0.0) {
  Portfolio p;
  p.push_back(sync_unit("A", "R1", 60, 10.0));
  p.push_back(sync_unit("B", "R1", 60, 20.0));
  p.push_back(sync_unit("C", "R1", 60, 30.0));
  return make_scenario(std::move(p), flat_traces({{"R1", 100.0}}, 1, 0.0), reserve);
}

}  // namespace

TEST_CASE("merit order dispatch of the three-unit toy") {
  auto sc = abc_toy();
  auto uc = solve_uc(sc, single_region(), {});
  REQUIRE(uc.size() == 1);
  const auto& h = uc[0];
  CHECK(h.units[unit_index(sc.portfolio, "A")].p_mw == Catch::Approx(60.0));
  CHECK(h.units[unit_index(sc.portfolio, "B")].p_mw == Catch::Approx(40.0));
  CHECK_FALSE(h.units[unit_index(sc.portfolio, "C")].on);
  CHECK(validate_uc(uc, sc, single_region(), {}).empty());
}

TEST_CASE("10% reserve leaves the toy dispatch unchanged") {
  auto sc = abc_toy(0.10);
  auto uc = solve_uc(sc, single_region(), {});
  const auto& h = uc[0];
  CHECK(h.units[unit_index(sc.portfolio, "A")].p_mw == Catch::Approx(60.0));
  CHECK(h.units[unit_index(sc.portfolio, "B")].p_mw == Catch::Approx(40.0));
  CHECK_FALSE(h.units[unit_index(sc.portfolio, "C")].on);
  CHECK(h.regions.at("R1").reserve_mw >= 10.0);
  CHECK(validate_uc(uc, sc, single_region(), {}).empty());
}

TEST_CASE("insufficient synchronous capacity for reserve is Infeasible") {
  Portfolio p;
  p.push_back(sync_unit("G", "R1", 5, 10.0));
  p.push_back(wind_unit("W", "R1", 300));
  auto sc = make_scenario(std::move(p), flat_traces({{"R1", 100.0}}, 1, /*wind_cf=*/1.0), 0.10);
  try {
    solve_uc(sc, single_region(), {});
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
    CHECK(std::string(e.what()).find("reserve") != std::string::npos);
  }
}

TEST_CASE("system inertia sums H*S over online synchronous plant") {
  // aggregate units shaped like a national portfolio snapshot
  Portfolio p;
  p.push_back(sync_unit("hydro", "R1", 2300, 8.0, 0.0, Tech::Hydro, 4.0));
  p.push_back(sync_unit("coal", "R1", 39400, 12.0, 0.0, Tech::Coal, 6.0));
  p.push_back(sync_unit("ccgt", "R1", 1700, 35.0, 0.0, Tech::CCGT, 6.0));
  p.push_back(sync_unit("ocgt", "R1", 3600, 90.0, 0.0, Tech::OCGT, 6.0));
  UcHour h;
  h.units.assign(4, {true, 100.0});
  CHECK(system_inertia(h, p) == Catch::Approx(277400.0));  // 277.4 GW·s

  h.units.assign(4, {false, 0.0});
  CHECK(system_inertia(h, p) == 0.0);
}

TEST_CASE("single coal unit inertia product") {
  Portfolio p;
  p.push_back(sync_unit("c", "R1", 500, 12.0, 0.0, Tech::Coal, 6.0));
  UcHour h;
  h.units.assign(1, {true, 400.0});
  CHECK(system_inertia(h, p) == Catch::Approx(3000.0));
}

TEST_CASE("regional inertia: empty region, additivity, condenser contribution") {
  Portfolio p;
  p.push_back(sync_unit("q_coal", "QLD", 660, 12.0, 0.0, Tech::Coal, 6.0));
  p.push_back(syncon_unit("q_sc", "QLD", 400, 6.0));
  p.push_back(sync_unit("n_coal", "NSW", 500, 12.0, 0.0, Tech::Coal, 6.0));
  UcHour h;
  h.units.assign(3, {true, 0.0});
  h.units[0].p_mw = 600;
  h.units[2].p_mw = 300;

  CHECK(regional_inertia(h, p, "QLD") == Catch::Approx(6360.0));
  CHECK(regional_inertia(h, p, "SA") == 0.0);
  CHECK(regional_inertia(h, p, "QLD") + regional_inertia(h, p, "NSW") ==
        Catch::Approx(system_inertia(h, p)));
}

TEST_CASE("minimum inertia requirement arithmetic") {
  CHECK(min_inertia_requirement(666, 50, 0.5) == Catch::Approx(33300.0));
  CHECK(min_inertia_requirement(600, 50, 0.5) == Catch::Approx(30000.0));
  CHECK(min_inertia_requirement(2 * 666, 50, 0.5) ==
        Catch::Approx(2 * min_inertia_requirement(666, 50, 0.5)));
  CHECK_THROWS_AS(min_inertia_requirement(0, 50, 0.5), Error);
  CHECK_THROWS_AS(min_inertia_requirement(666, 50, 0), Error);
}

TEST_CASE("tie flows from a UC hour on a chain") {
  Portfolio p;
  p.push_back(sync_unit("a", "A", 200, 10.0));
  p.push_back(sync_unit("d", "D", 200, 50.0));
  auto net = chain({"A", "B", "C", "D"}, 1000.0);
  UcHour h;
  h.units = {{true, 150.0}, {true, 50.0}};
  h.regions["A"].net_demand_mw = 50.0;
  h.regions["B"].net_demand_mw = 0.0;
  h.regions["C"].net_demand_mw = 0.0;
  h.regions["D"].net_demand_mw = 150.0;
  auto res = dc_tie_flows(h, p, net);
  for (double f : res.flows_mw) CHECK(f == Catch::Approx(100.0));
}

TEST_CASE("validate_uc flags a planted over-capacity dispatch") {
  auto sc = abc_toy();
  auto uc = solve_uc(sc, single_region(), {});
  uc[0].units[0].p_mw = 75.0;  // A's capacity is 60
  auto rep = validate_uc(uc, sc, single_region(), {});
  bool found = false;
  for (const auto& v : rep.items)
    if (v.kind == "CapacityViolation") found = true;
  CHECK(found);
}

TEST_CASE("validate_uc flags a hand-built min-up violation naming both hours") {
  Portfolio p;
  auto g1 = sync_unit("G1", "R1", 100, 10.0);
  g1.min_up_h = 3;
  auto g2 = sync_unit("G2", "R1", 100, 10.0);
  p.push_back(g1);
  p.push_back(g2);
  auto sc = make_scenario(std::move(p), flat_traces({{"R1", 50.0}}, 3, 0.0), 0.0);

  auto make_hour = [&](int hour, bool g1_on, double g1_p, bool g2_on, double g2_p) {
    UcHour h;
    h.hour = hour;
    h.units = {{g1_on, g1_p}, {g2_on, g2_p}};
    RegionHour rh;
    rh.net_demand_mw = 50.0;
    rh.reserve_mw = (g1_on ? 100.0 - g1_p : 0.0) + (g2_on ? 100.0 - g2_p : 0.0);
    rh.inertia_mws = (g1_on ? 600.0 : 0.0) + (g2_on ? 600.0 : 0.0);
    h.regions["R1"] = rh;
    return h;
  };
  // G1 runs two hours then stops: shorter than its 3-hour minimum up time
  std::vector<UcHour> uc = {make_hour(0, true, 50, false, 0), make_hour(1, true, 50, false, 0),
                            make_hour(2, false, 0, true, 50)};
  auto rep = validate_uc(uc, sc, single_region(), {});
  bool named = false;
  for (const auto& v : rep.items)
    if (v.kind == "MinUpViolation" && v.what.find("0") != std::string::npos &&
        v.what.find("2") != std::string::npos)
      named = true;
  CHECK(named);
}

TEST_CASE("validate_uc passes solver output on a multi-hour ramped instance") {
  Portfolio p;
  auto a = sync_unit("A", "R1", 100, 10.0, 0.4);
  a.ramp_mw_per_h = 30;
  a.min_up_h = 2;
  a.min_down_h = 2;
  auto b = sync_unit("B", "R1", 100, 25.0, 0.3);
  b.ramp_mw_per_h = 50;
  p.push_back(a);
  p.push_back(b);
  p.push_back(wind_unit("W", "R1", 60));

  auto ts = std::make_shared<HourlyTraceSet>();
  ts->hours = 8;
  RegionTrace tr;
  tr.demand_mw = {80, 110, 140, 160, 150, 120, 90, 70};
  tr.wind_cf = {0.5, 0.2, 0.1, 0.4, 0.6, 0.3, 0.2, 0.5};
  tr.solar_cf.assign(8, 0.0);
  tr.rooftop_pv_cf.assign(8, 0.0);
  ts->regions.push_back("R1");
  ts->data.emplace("R1", std::move(tr));
  auto sc = make_scenario(std::move(p), std::move(ts), 0.10);

  auto uc = solve_uc(sc, single_region(), {});
  auto rep = validate_uc(uc, sc, single_region(), {});
  INFO(rep.summary());
  CHECK(rep.empty());
}

TEST_CASE("regional inertia constraint holds in solver output") {
  Portfolio p;
  // several mid-size units plus a condenser to repair inertia with
  p.push_back(sync_unit("big", "R1", 400, 10.0, 0.2));
  p.push_back(sync_unit("mid", "R1", 200, 20.0, 0.2));
  p.push_back(sync_unit("small", "R1", 100, 30.0, 0.0));
  p.push_back(syncon_unit("sc1", "R1", 400, 6.0));
  p.push_back(syncon_unit("sc2", "R1", 400, 6.0));
  p.push_back(wind_unit("W", "R1", 500));
  auto sc = make_scenario(std::move(p), flat_traces({{"R1", 450.0}}, 4, 0.4), 0.0);

  UcOptions opt;
  opt.inertia_constraint = InertiaConstraintMode::Regional;
  opt.rocof_crit_hz_per_s = 0.5;
  auto uc = solve_uc(sc, single_region(), opt);
  auto rep = validate_uc(uc, sc, single_region(), opt);
  INFO(rep.summary());
  CHECK(rep.empty());
  for (const auto& h : uc) {
    auto cc = try_identify_regional_cc(h, sc.portfolio, "R1");
    REQUIRE(cc.has_value());
    CHECK(regional_inertia(h, sc.portfolio, "R1") >=
          min_inertia_requirement(cc->size_mw, 50.0, 0.5) - 1e-6);
  }
}

TEST_CASE("line limits reroute dispatch to local units") {
  Portfolio p;
  p.push_back(sync_unit("cheap", "A", 300, 10.0));
  p.push_back(sync_unit("dear", "B", 300, 40.0));
  auto net = chain({"A", "B"}, /*limit=*/50.0);
  auto sc = make_scenario(std::move(p), flat_traces({{"A", 100.0}, {"B", 150.0}}, 1, 0.0), 0.0);
  auto uc = solve_uc(sc, net, {});
  const auto& h = uc[0];
  // B can only import 50, so its own unit must carry 100
  CHECK(h.units[1].p_mw == Catch::Approx(100.0));
  CHECK(h.units[0].p_mw == Catch::Approx(150.0));
  CHECK(std::abs(h.tie_flows_mw[0]) <= 50.0 + 1e-6);
  CHECK(validate_uc(uc, sc, net, {}).empty());
}

TEST_CASE("NS-RES curtailment is recorded when wind exceeds demand") {
  Portfolio p;
  p.push_back(sync_unit("G", "R1", 100, 10.0, 0.5));
  p.push_back(wind_unit("W", "R1", 400));
  auto sc = make_scenario(std::move(p), flat_traces({{"R1", 120.0}}, 1, /*wind_cf=*/0.5), 0.0);
  auto uc = solve_uc(sc, single_region(), {});
  const auto& rh = uc[0].regions.at("R1");
  CHECK(rh.ns_available_mw == Catch::Approx(200.0));
  CHECK(rh.curtailed_ns_mw >= 200.0 - 120.0 - 1e-9);
  CHECK(validate_uc(uc, sc, single_region(), {}).empty());
}

TEST_CASE("compute_nsap") {
  Portfolio p;
  p.push_back(sync_unit("G", "R1", 100, 10.0));
  p.push_back(wind_unit("W", "R1", 100));
  auto sc = make_scenario(p, flat_traces({{"R1", 100.0}}, 2, 0.6), 0.0);

  std::vector<UcHour> uc(2);
  uc[0].units = {{true, 100.0}, {true, 40.0}};
  uc[1].units = {{true, 0.0}, {true, 60.0}};
  CHECK(compute_nsap(sc, uc) == Catch::Approx(0.5));

  uc[0].units = {{true, 100.0}, {false, 0.0}};
  uc[1].units = {{true, 100.0}, {false, 0.0}};
  CHECK(compute_nsap(sc, uc) == 0.0);

  CHECK_THROWS_AS(compute_nsap(sc, {}), Error);
}

TEST_CASE("solver honors min-down through commitment choices") {
  Portfolio p;
  auto a = sync_unit("A", "R1", 100, 10.0);
  a.min_down_h = 4;
  auto b = sync_unit("B", "R1", 100, 20.0);
  p.push_back(a);
  p.push_back(b);

  auto ts = std::make_shared<HourlyTraceSet>();
  ts->hours = 3;
  RegionTrace tr;
  tr.demand_mw = {50, 50, 50};
  tr.wind_cf.assign(3, 0.0);
  tr.solar_cf.assign(3, 0.0);
  tr.rooftop_pv_cf.assign(3, 0.0);
  ts->regions.push_back("R1");
  ts->data.emplace("R1", std::move(tr));
  auto sc = make_scenario(std::move(p), std::move(ts), 0.0);

  auto uc = solve_uc(sc, single_region(), {});
  auto rep = validate_uc(uc, sc, single_region(), {});
  INFO(rep.summary());
  CHECK(rep.empty());
}
