#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gridfreq/errors.hpp"
#include "gridfreq/traces.hpp"

namespace gridfreq {

/// Aggregated rooftop-PV + battery-storage demand reshaping.
///
/// pv_kw_per_prosumer_mw = 0 auto-sizes the rooftop fleet so its annual
/// energy is ~30% of prosumer energy over the given horizon.
struct ProsumerConfig {
  std::map<RegionId, double> penetration;  // fraction of regional demand
  double battery_kwh_per_kw_pv = 1.8;
  double pv_kw_per_prosumer_mw = 0;
  double round_trip_eff = 0.9;
};

/// Per-region energy bookkeeping of one transform, for audits.
struct ProsumerAudit {
  double gross_mwh = 0;       // prosumer share of demand
  double net_mwh = 0;         // what remains after PV + battery
  double pv_direct_mwh = 0;   // PV serving prosumer load in the same hour
  double charged_mwh = 0;     // PV surplus routed into the battery
  double discharged_mwh = 0;  // battery energy delivered to prosumer load
  double spilled_mwh = 0;     // PV surplus beyond a full battery
  double soc_initial_mwh = 0;
  double soc_final_mwh = 0;
  double pv_capacity_mw = 0;
};

/// Greedy self-consumption policy: PV serves prosumer load first, surplus
/// charges the battery until full (rest is spilled), deficit discharges it.
/// State of charge carries across hours and starts at 50%. Regions with zero
/// penetration pass through bit-exact.
inline HourlyTraceSet apply_prosumers(const HourlyTraceSet& traces, const ProsumerConfig& cfg,
                                      std::map<RegionId, ProsumerAudit>* audit_out = nullptr) {
  for (const auto& region : traces.regions)
    if (cfg.penetration.find(region) == cfg.penetration.end())
      raise(ErrorKind::ConfigMissingRegion, "no prosumer penetration for region " + region);

  HourlyTraceSet out = traces;
  const double eta_half = std::sqrt(std::clamp(cfg.round_trip_eff, 0.0, 1.0));

  for (const auto& region : traces.regions) {
    const double pen = cfg.penetration.at(region);
    if (pen < 0 || pen > 1)
      raise(ErrorKind::ValueOutOfRange, "penetration outside [0,1] for region " + region);
    if (pen == 0.0) continue;

    const auto& tr = traces.at(region);
    const size_t n = traces.hours;

    double gross_sum = 0, cf_sum = 0;
    for (size_t h = 0; h < n; ++h) {
      gross_sum += pen * tr.demand_mw[h];
      cf_sum += tr.rooftop_pv_cf[h];
    }

    double pv_mw;
    if (cfg.pv_kw_per_prosumer_mw > 0) {
      pv_mw = cfg.pv_kw_per_prosumer_mw * (gross_sum / double(n)) / 1000.0;
    } else {
      pv_mw = cf_sum > 0 ? 0.30 * gross_sum / cf_sum : 0.0;
    }

    const double battery_mwh = cfg.battery_kwh_per_kw_pv * pv_mw;
    double soc = 0.5 * battery_mwh;

    ProsumerAudit audit;
    audit.soc_initial_mwh = soc;
    audit.pv_capacity_mw = pv_mw;

    auto& dst = out.data.at(region).demand_mw;
    for (size_t h = 0; h < n; ++h) {
      const double gross = pen * tr.demand_mw[h];
      const double pv = pv_mw * tr.rooftop_pv_cf[h];
      const double direct = std::min(pv, gross);
      double surplus = pv - direct;
      double deficit = gross - direct;

      // charge: one hour, energy == power; losses split across both legs
      double charge = std::min(surplus, eta_half > 0 ? (battery_mwh - soc) / eta_half
                                                     : 0.0);
      soc += charge * eta_half;
      double spill = surplus - charge;

      double delivered = std::min(deficit, soc * eta_half);
      soc -= eta_half > 0 ? delivered / eta_half : 0.0;

      const double net = deficit - delivered;
      dst[h] = (1.0 - pen) * tr.demand_mw[h] + net;

      audit.gross_mwh += gross;
      audit.net_mwh += net;
      audit.pv_direct_mwh += direct;
      audit.charged_mwh += charge;
      audit.discharged_mwh += delivered;
      audit.spilled_mwh += spill;
    }
    audit.soc_final_mwh = soc;
    if (audit_out) (*audit_out)[region] = audit;
  }
  return out;
}

}  // namespace gridfreq
