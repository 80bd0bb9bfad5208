#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gridfreq/prosumer.hpp"
#include "helpers.hpp"

using namespace gridfreq;

namespace {

/// 24-hour day with a midday solar bell and an evening demand peak.
std::shared_ptr<HourlyTraceSet> toy_day(double demand_mw = 1000.0) {
  auto ts = std::make_shared<HourlyTraceSet>();
  ts->hours = 24;
  RegionTrace tr;
  for (int h = 0; h < 24; ++h) {
    double peak = (h >= 17 && h <= 21) ? 1.3 : 1.0;
    tr.demand_mw.push_back(demand_mw * peak);
    tr.wind_cf.push_back(0.3);
    tr.solar_cf.push_back(0.0);
    double sun = std::max(0.0, std::sin(M_PI * (h - 6) / 12.0));
    tr.rooftop_pv_cf.push_back(sun);
  }
  ts->regions.push_back("QLD");
  ts->data.emplace("QLD", std::move(tr));
  return ts;
}

double peak_to_trough(const std::vector<double>& v) {
  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi / lo;
}

}  // namespace

TEST_CASE("zero penetration is the identity, bit-exact") {
  auto ts = toy_day();
  ProsumerConfig cfg;
  cfg.penetration = {{"QLD", 0.0}};
  auto out = apply_prosumers(*ts, cfg);
  for (size_t h = 0; h < ts->hours; ++h)
    CHECK(out.at("QLD").demand_mw[h] == ts->at("QLD").demand_mw[h]);
}

TEST_CASE("missing region in the config raises ConfigMissingRegion") {
  auto ts = toy_day();
  ProsumerConfig cfg;  // no QLD entry
  try {
    apply_prosumers(*ts, cfg);
    FAIL("expected ConfigMissingRegion");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigMissingRegion);
  }
}

TEST_CASE("prosumers with batteries smooth the evening peak") {
  auto ts = toy_day();
  ProsumerConfig cfg;
  cfg.penetration = {{"QLD", 0.16}};
  cfg.battery_kwh_per_kw_pv = 1.8;
  std::map<RegionId, ProsumerAudit> audit;
  auto out = apply_prosumers(*ts, cfg, &audit);

  const auto& gross = ts->at("QLD").demand_mw;
  const auto& net = out.at("QLD").demand_mw;

  // evening peak hours strictly reduced (battery discharges there)
  for (int h : {18, 19})
    CHECK(net[h] < gross[h]);
  // the profile got smoother
  CHECK(peak_to_trough(net) < peak_to_trough(gross));

  // energy bookkeeping: gross - net == direct PV + battery deliveries
  const auto& a = audit.at("QLD");
  CHECK(a.gross_mwh - a.net_mwh ==
        Catch::Approx(a.pv_direct_mwh + a.discharged_mwh).epsilon(1e-9));
  // battery state: stored = charged * sqrt(eff) - delivered / sqrt(eff)
  double eta = std::sqrt(cfg.round_trip_eff);
  CHECK(a.soc_final_mwh - a.soc_initial_mwh ==
        Catch::Approx(a.charged_mwh * eta - a.discharged_mwh / eta).margin(1e-9));
}

TEST_CASE("hand-simulated greedy recursion matches apply_prosumers") {
  auto ts = toy_day();
  ProsumerConfig cfg;
  cfg.penetration = {{"QLD", 0.2}};
  cfg.battery_kwh_per_kw_pv = 3.0;
  cfg.pv_kw_per_prosumer_mw = 800.0;  // fixed sizing so the oracle is closed-form
  cfg.round_trip_eff = 0.9;
  auto out = apply_prosumers(*ts, cfg);

  // independent 24-step walk of the stated policy
  const auto& tr = ts->at("QLD");
  double gross_mean = 0;
  for (int h = 0; h < 24; ++h) gross_mean += 0.2 * tr.demand_mw[h];
  gross_mean /= 24.0;
  double pv_mw = 800.0 * gross_mean / 1000.0;
  double cap = 3.0 * pv_mw;
  double soc = 0.5 * cap;
  double eta = std::sqrt(0.9);
  for (int h = 0; h < 24; ++h) {
    double load = 0.2 * tr.demand_mw[h];
    double pv = pv_mw * tr.rooftop_pv_cf[h];
    double direct = std::min(pv, load);
    double surplus = pv - direct, deficit = load - direct;
    double charge = std::min(surplus, (cap - soc) / eta);
    soc += charge * eta;
    double delivered = std::min(deficit, soc * eta);
    soc -= delivered / eta;
    double expected = 0.8 * tr.demand_mw[h] + (deficit - delivered);
    CHECK(out.at("QLD").demand_mw[h] == Catch::Approx(expected).margin(1e-9));
  }
}

TEST_CASE("zero battery: midday net demand dips by exactly the PV-served amount") {
  auto ts = std::make_shared<HourlyTraceSet>();
  ts->hours = 3;
  RegionTrace tr;
  tr.demand_mw = {1000, 1000, 1000};
  tr.wind_cf = {0, 0, 0};
  tr.solar_cf = {0, 0, 0};
  tr.rooftop_pv_cf = {0.0, 1.0, 0.0};  // PV only at "noon"
  ts->regions.push_back("R");
  ts->data.emplace("R", std::move(tr));

  ProsumerConfig cfg;
  cfg.penetration = {{"R", 0.1}};
  cfg.battery_kwh_per_kw_pv = 0.0;
  cfg.pv_kw_per_prosumer_mw = 2000.0;  // PV = 2 x prosumer mean demand > load at noon
  std::map<RegionId, ProsumerAudit> audit;
  auto out = apply_prosumers(*ts, cfg, &audit);

  // prosumer load is 100 MW; PV at noon is 200 MW: load fully served, 100 spilled
  CHECK(out.at("R").demand_mw[1] == Catch::Approx(900.0));
  CHECK(out.at("R").demand_mw[0] == Catch::Approx(1000.0));
  CHECK(audit.at("R").spilled_mwh == Catch::Approx(100.0));
  // net demand never negative
  for (double v : out.at("R").demand_mw) CHECK(v >= 0.0);
}

TEST_CASE("net demand stays non-negative even with oversized PV") {
  auto ts = toy_day(100.0);
  ProsumerConfig cfg;
  cfg.penetration = {{"QLD", 1.0}};
  cfg.battery_kwh_per_kw_pv = 0.5;
  cfg.pv_kw_per_prosumer_mw = 20000.0;  // 20x oversized
  auto out = apply_prosumers(*ts, cfg);
  for (double v : out.at("QLD").demand_mw) CHECK(v >= 0.0);
}
