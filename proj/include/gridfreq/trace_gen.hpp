#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "gridfreq/traces.hpp"

namespace gridfreq {

/// Deterministic synthetic demand / wind / solar traces with seasonal,
/// diurnal and weekly structure plus smooth AR(1) noise. These stand in for
/// real planning traces; only qualitative shape matters.
struct TraceGenOptions {
  size_t hours = 8760;
  std::uint64_t seed = 42;
  std::map<RegionId, double> mean_demand_mw;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

inline HourlyTraceSet generate_traces(const TraceGenOptions& opt) {
  using std::numbers::pi;
  HourlyTraceSet ts;
  ts.hours = opt.hours;

  for (const auto& [region, mean_mw] : opt.mean_demand_mw) {
    std::mt19937_64 rng(detail::fnv1a(region, opt.seed ^ 0x9e3779b97f4a7c15ull));
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    RegionTrace tr;
    tr.demand_mw.reserve(opt.hours);
    double n_dem = 0, n_wind = 0, n_sun = 0, n_roof = 0;
    for (size_t h = 0; h < opt.hours; ++h) {
      const double day = double(h / 24);
      const int hod = int(h % 24);
      const int dow = int((h / 24) % 7);

      n_dem = 0.92 * n_dem + 0.08 * u(rng);
      n_wind = 0.97 * n_wind + 0.03 * u(rng);
      n_sun = 0.90 * n_sun + 0.10 * u(rng);
      n_roof = 0.90 * n_roof + 0.10 * u(rng);

      double seasonal = 1.0 + 0.15 * std::cos(2.0 * pi * (day - 180.0) / 365.0);
      double diurnal = 1.0 + 0.22 * std::cos(2.0 * pi * (hod - 18.0) / 24.0);
      double weekly = (dow >= 5) ? 0.92 : 1.0;
      double demand = mean_mw * seasonal * diurnal * weekly * (1.0 + 0.6 * n_dem);
      tr.demand_mw.push_back(std::max(demand, 0.1 * mean_mw));

      double wind = 0.35 + 0.08 * std::cos(2.0 * pi * (day - 60.0) / 365.0) + 0.55 * n_wind;
      tr.wind_cf.push_back(std::clamp(wind, 0.0, 1.0));

      double sun_shape = std::max(0.0, std::sin(pi * (hod - 6.0) / 12.0));
      double sun_season = 1.0 - 0.25 * std::cos(2.0 * pi * (day - 180.0) / 365.0);
      double cloud = std::clamp(0.85 + 0.4 * n_sun, 0.0, 1.0);
      tr.solar_cf.push_back(std::clamp(sun_shape * sun_season * cloud, 0.0, 1.0));
      double roof_cloud = std::clamp(0.85 + 0.4 * n_roof, 0.0, 1.0);
      tr.rooftop_pv_cf.push_back(std::clamp(sun_shape * sun_season * roof_cloud, 0.0, 1.0));
    }
    ts.regions.push_back(region);
    ts.data.emplace(region, std::move(tr));
  }
  return ts;
}

}  // namespace gridfreq
