#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <string>

#include "gridfreq/errors.hpp"
#include "gridfreq/traces.hpp"
#include "gridfreq/types.hpp"

namespace gridfreq {

/// A generation portfolio plus the hourly traces it is studied against,
/// targeting one non-synchronous annual penetration level.
struct Scenario {
  std::string id;  // "NSxx"
  Portfolio portfolio;
  std::shared_ptr<const HourlyTraceSet> traces;
  double reserve_fraction = 0.10;
  double target_nsap = 0.10;
};

inline std::string nsap_label(double target) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "NS%02d", int(std::lround(target * 100)));
  return buf;
}

inline double nsap_from_label(const std::string& id) {
  if (id.size() != 4 || id.compare(0, 2, "NS") != 0 || !std::isdigit(id[2]) || !std::isdigit(id[3]))
    raise(ErrorKind::ParseError, "bad scenario id '" + id + "' (want NSxx)");
  return (10.0 * (id[2] - '0') + (id[3] - '0')) / 100.0;
}

/// Potential annual NS-RES energy share: available converter-interfaced
/// energy over total demand energy, both straight sums over the horizon.
inline double estimated_ns_energy_share(const Portfolio& portfolio, const HourlyTraceSet& traces) {
  double e_ns = 0;
  for (const auto& g : portfolio) {
    if (!is_non_synchronous(g.tech)) continue;
    const auto& tr = traces.at(g.region);
    const auto& cf = (g.tech == Tech::Wind) ? tr.wind_cf : tr.solar_cf;
    for (size_t h = 0; h < traces.hours; ++h) e_ns += g.capacity_mw * cf[h];
  }
  double e_dem = 0;
  for (size_t h = 0; h < traces.hours; ++h) e_dem += traces.total_demand_mw(h);
  return e_dem > 0 ? e_ns / e_dem : 0.0;
}

struct ScenarioBuildOptions {
  double tolerance_pp = 0.02;  // acceptable |share - target|
  /// Siting weights for added NS-RES energy; empty = scale the existing
  /// fleet uniformly. Keys are regions, values need not be normalized.
  std::map<RegionId, double> ns_region_weights;
  /// Optional per-region cap on installed NS-RES capacity after scaling.
  std::map<RegionId, double> ns_capacity_cap_mw;
};

/// Derives an NSxx scenario from the base portfolio: coal is retired in
/// descending-SRMC order in proportion to the penetration step, then the
/// NS-RES fleet is scaled until the potential energy share meets the target.
/// NS90 additionally drops the spinning reserve requirement.
inline Scenario build_scenario(const Scenario& base, double target_nsap,
                               const ScenarioBuildOptions& opts = {}) {
  const double steps = target_nsap * 10.0;
  if (target_nsap < 0.099 || target_nsap > 0.901 || std::abs(steps - std::round(steps)) > 1e-6)
    raise(ErrorKind::ValueOutOfRange, "target_nsap must be one of 0.1 .. 0.9");
  if (!base.traces) raise(ErrorKind::ConfigError, "base scenario has no traces");

  Scenario out = base;
  out.id = nsap_label(target_nsap);
  out.target_nsap = target_nsap;
  out.reserve_fraction = (target_nsap >= 0.899) ? 0.0 : base.reserve_fraction;

  // --- coal retirement, least efficient (highest SRMC) first ---
  const double span = 0.9 - base.target_nsap;
  double coal_cap = 0;
  for (const auto& g : base.portfolio)
    if (g.tech == Tech::Coal) coal_cap += g.capacity_mw;
  const double quota =
      span > 0 ? coal_cap * std::clamp((target_nsap - base.target_nsap) / span, 0.0, 1.0) : 0.0;

  std::vector<const GeneratorSpec*> coal;
  for (const auto& g : base.portfolio)
    if (g.tech == Tech::Coal) coal.push_back(&g);
  std::sort(coal.begin(), coal.end(), [](const GeneratorSpec* a, const GeneratorSpec* b) {
    if (a->srmc != b->srmc) return a->srmc > b->srmc;
    return a->id < b->id;
  });

  std::vector<std::string> retired;
  double cum = 0;
  for (const auto* g : coal) {
    if (cum + g->capacity_mw <= quota + 1e-9) {
      cum += g->capacity_mw;
      retired.push_back(g->id);
    } else if (quota - cum > 0.5 * g->capacity_mw) {
      cum += g->capacity_mw;
      retired.push_back(g->id);
      break;
    } else {
      break;
    }
  }

  Portfolio kept;
  for (const auto& g : base.portfolio)
    if (std::find(retired.begin(), retired.end(), g.id) == retired.end()) kept.push_back(g);
  out.portfolio = std::move(kept);

  // --- NS-RES scaling to the target energy share ---
  const auto& traces = *base.traces;
  double share = estimated_ns_energy_share(out.portfolio, traces);
  if (std::abs(share - target_nsap) > opts.tolerance_pp) {
    if (share <= 0)
      raise(ErrorKind::TargetUnreachable, "no NS-RES energy in portfolio to scale");

    // per-region potential NS energy (MWh over horizon)
    std::map<RegionId, double> e_ns;
    for (const auto& g : out.portfolio) {
      if (!is_non_synchronous(g.tech)) continue;
      const auto& tr = traces.at(g.region);
      const auto& cf = (g.tech == Tech::Wind) ? tr.wind_cf : tr.solar_cf;
      double e = 0;
      for (size_t h = 0; h < traces.hours; ++h) e += g.capacity_mw * cf[h];
      e_ns[g.region] += e;
    }
    double e_dem = 0;
    for (size_t h = 0; h < traces.hours; ++h) e_dem += traces.total_demand_mw(h);

    std::map<RegionId, double> factor;  // per-region capacity multiplier
    if (opts.ns_region_weights.empty()) {
      for (const auto& [r, _] : e_ns) factor[r] = target_nsap / share;
    } else {
      double wsum = 0;
      for (const auto& [r, w] : opts.ns_region_weights) {
        if (w < 0) raise(ErrorKind::ValueOutOfRange, "negative NS siting weight for " + r);
        wsum += w;
      }
      if (wsum <= 0) raise(ErrorKind::ValueOutOfRange, "NS siting weights sum to zero");
      const double delta = (target_nsap - share) * e_dem;  // energy to add (may be < 0)
      for (const auto& [r, e] : e_ns) factor[r] = 1.0;
      for (const auto& [r, w] : opts.ns_region_weights) {
        if (w == 0) continue;
        auto it = e_ns.find(r);
        if (it == e_ns.end() || it->second <= 0)
          raise(ErrorKind::TargetUnreachable, "siting weight on region " + r + " with no NS-RES fleet");
        double k = 1.0 + (w / wsum) * delta / it->second;
        if (k < 0)
          raise(ErrorKind::TargetUnreachable, "cannot shrink NS-RES of " + r + " below zero");
        factor[r] = k;
      }
    }

    std::map<RegionId, double> new_cap;
    for (auto& g : out.portfolio) {
      if (!is_non_synchronous(g.tech)) continue;
      g.capacity_mw *= factor.at(g.region);
      new_cap[g.region] += g.capacity_mw;
    }
    for (const auto& [r, cap] : opts.ns_capacity_cap_mw) {
      auto it = new_cap.find(r);
      if (it != new_cap.end() && it->second > cap + 1e-6)
        raise(ErrorKind::TargetUnreachable,
              "NS-RES capacity cap of " + r + " prevents reaching the target share");
    }

    share = estimated_ns_energy_share(out.portfolio, traces);
    if (std::abs(share - target_nsap) > opts.tolerance_pp)
      raise(ErrorKind::TargetUnreachable, "NS-RES share " + std::to_string(share) +
                                              " misses target " + std::to_string(target_nsap));
  }
  return out;
}

}  // namespace gridfreq
