#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gridfreq/dispatch.hpp"
#include "gridfreq/network.hpp"
#include "gridfreq/scenario.hpp"
#include "gridfreq/traces.hpp"

namespace testutil {

using namespace gridfreq;

inline GeneratorSpec sync_unit(const std::string& id, const RegionId& region, double cap_mw,
                               double srmc, double min_stable = 0.0, Tech tech = Tech::Coal,
                               double h = 6.0) {
  GeneratorSpec g;
  g.id = id;
  g.region = region;
  g.tech = tech;
  g.capacity_mw = cap_mw;
  g.inertia_h_s = h;
  g.srmc = srmc;
  g.min_stable = min_stable;
  g.ramp_mw_per_h = cap_mw;  // non-binding by default
  g.min_up_h = 1;
  g.min_down_h = 1;
  g.droop = 0.05;
  g.gov_time_const_s = 0.5;
  return g;
}

inline GeneratorSpec wind_unit(const std::string& id, const RegionId& region, double cap_mw) {
  GeneratorSpec g;
  g.id = id;
  g.region = region;
  g.tech = Tech::Wind;
  g.capacity_mw = cap_mw;
  g.inertia_h_s = 0;
  g.srmc = 0;
  return g;
}

inline GeneratorSpec syncon_unit(const std::string& id, const RegionId& region, double rating_mva,
                                 double h = 6.0) {
  GeneratorSpec g;
  g.id = id;
  g.region = region;
  g.tech = Tech::SynCon;
  g.capacity_mw = rating_mva;
  g.inertia_h_s = h;
  return g;
}

/// Flat traces: constant demand per region, constant capacity factors.
inline std::shared_ptr<HourlyTraceSet> flat_traces(
    const std::vector<std::pair<RegionId, double>>& demand, size_t hours, double wind_cf = 0.3,
    double solar_cf = 0.0, double rooftop_cf = 0.0) {
  auto ts = std::make_shared<HourlyTraceSet>();
  ts->hours = hours;
  for (const auto& [region, mw] : demand) {
    RegionTrace tr;
    tr.demand_mw.assign(hours, mw);
    tr.wind_cf.assign(hours, wind_cf);
    tr.solar_cf.assign(hours, solar_cf);
    tr.rooftop_pv_cf.assign(hours, rooftop_cf);
    ts->regions.push_back(region);
    ts->data.emplace(region, std::move(tr));
  }
  return ts;
}

inline Network single_region(const RegionId& r = "R1") {
  Network net;
  net.regions = {r};
  return net;
}

inline Network chain(const std::vector<RegionId>& regions, double limit_mw = 1e9,
                     double sync_coeff = 500.0) {
  Network net;
  net.regions = regions;
  for (size_t i = 0; i + 1 < regions.size(); ++i)
    net.lines.push_back({regions[i], regions[i + 1], limit_mw, sync_coeff});
  return net;
}

inline Scenario make_scenario(Portfolio portfolio, std::shared_ptr<HourlyTraceSet> traces,
                              double reserve_fraction = 0.0, double target = 0.10) {
  Scenario sc;
  sc.id = nsap_label(target);
  sc.target_nsap = target;
  sc.portfolio = std::move(portfolio);
  sc.traces = std::move(traces);
  sc.reserve_fraction = reserve_fraction;
  return sc;
}

class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng(std::random_device{}());
    path_ = base / ("gridfreq_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
