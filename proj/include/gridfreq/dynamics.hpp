#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "gridfreq/contingency.hpp"
#include "gridfreq/dispatch.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/network.hpp"
#include "gridfreq/trace.hpp"

namespace gridfreq {

/// Aggregate load damping. The static share acts instantly, the induction
/// machine share (dynamic model only) responds through a first-order lag
/// with twice the static sensitivity.
struct LoadModel {
  LoadModelKind kind = LoadModelKind::Static;
  double d_static_per_hz = 0.02;  // MW per Hz per MW of load ("1% per 1%")
  double im_fraction = 0.0;
  double im_time_const_s = 0.1;
  double im_damping_per_hz = 0.04;

  static LoadModel static_model() { return {}; }
  static LoadModel dynamic_model() {
    LoadModel m;
    m.kind = LoadModelKind::Dynamic;
    m.im_fraction = 0.4;
    return m;
  }
  static LoadModel of(LoadModelKind k) {
    return k == LoadModelKind::Static ? static_model() : dynamic_model();
  }

  /// Quasi-steady MW per Hz per MW of load.
  double effective_damping_per_hz() const {
    return d_static_per_hz * (1.0 - im_fraction) + im_damping_per_hz * im_fraction;
  }
};

/// Committed, governor-equipped synchronous capacity aggregated per
/// (droop, time constant) class.
struct GovernorFleet {
  double rating_mw = 0;
  double droop = 0.05;     // per-unit on fleet base
  double time_const_s = 0.5;
  double headroom_mw = 0;  // sum of capacity - dispatch
};

/// Clamped droop setpoint the fleet lags toward.
inline double governor_power(const GovernorFleet& fleet, double df_hz, double f0_hz) {
  if (fleet.droop <= 0) return 0;
  double target = (-df_hz / fleet.droop) * (fleet.rating_mw / f0_hz);
  return std::clamp(target, 0.0, fleet.headroom_mw);
}

struct SynConDevice {
  RegionId region;
  double rating_mva = 400;
  double h_s = 6;
};

struct InertiaEmulationDevice {
  RegionId region;
  double k_ie_mw_per_hzps = 0;  // MW per Hz/s of filtered df/dt
  double washout_tc_s = 0.5;
  double p_max_mw = 0;
  double ke_budget_mws = 0;
  double recovery_power_mw = 0;
  double recovery_trigger = 0.5;  // fraction of ke_budget that starts recovery
};

/// Default tuning for a wind farm of the given rating: emulate H = 3.5 s on
/// the farm base, cap at 0.1 pu, pay the drawn energy back at 5% of rating.
/// The energy budget corresponds to tracking a ~2 Hz excursion at the
/// emulated gain, a conservative stand-in for the recoverable rotor energy.
inline InertiaEmulationDevice default_ie_device(const RegionId& region, double wf_rating_mw,
                                                double f0_hz = 50.0) {
  InertiaEmulationDevice d;
  d.region = region;
  d.k_ie_mw_per_hzps = 2.0 * 3.5 * wf_rating_mw / f0_hz;
  d.p_max_mw = 0.1 * wf_rating_mw;
  d.ke_budget_mws = 2.0 * d.k_ie_mw_per_hzps;
  d.recovery_power_mw = 0.05 * wf_rating_mw;
  return d;
}

enum class IePhase { Event, Recovery, Done };

struct IeState {
  IePhase phase = IePhase::Event;
  double washout = 0;     // filter state, Hz
  double energy_mws = 0;  // net energy drawn from the rotor so far
};

/// df/dt-proportional injection while the budget lasts, then a constant
/// recovery draw until the drawn energy has been paid back.
inline double ie_power(const InertiaEmulationDevice& d, double filtered_dfdt, const IeState& st) {
  switch (st.phase) {
    case IePhase::Event:
      if (st.energy_mws >= d.ke_budget_mws) return 0;
      return std::clamp(-d.k_ie_mw_per_hzps * filtered_dfdt, 0.0, d.p_max_mw);
    case IePhase::Recovery: return -d.recovery_power_mw;
    case IePhase::Done: return 0;
  }
  return 0;
}

struct DeloadedWfDevice {
  RegionId region;
  double available_mw = 0;
  double deload_frac = 0.05;
  double droop_gain_mw_per_hz = 0;

  double headroom_mw() const { return deload_frac * available_mw; }
};

/// 5% de-load with the same 5% droop constant the synchronous fleet uses.
inline DeloadedWfDevice default_dl_device(const RegionId& region, double available_mw,
                                          double f0_hz = 50.0) {
  DeloadedWfDevice d;
  d.region = region;
  d.available_mw = available_mw;
  d.droop_gain_mw_per_hz = available_mw / (0.05 * f0_hz);
  return d;
}

/// Sustained under-frequency release, capped by the de-load headroom.
inline double dl_power(const DeloadedWfDevice& d, double df_hz) {
  return std::clamp(d.droop_gain_mw_per_hz * std::max(0.0, -df_hz), 0.0, d.headroom_mw());
}

struct DeviceRoster {
  std::vector<SynConDevice> syncons;
  std::vector<InertiaEmulationDevice> ies;
  std::vector<DeloadedWfDevice> dls;
};

struct DynRegion {
  RegionId id;
  double inertia_mws = 0;
  double load_mw = 0;
  LoadModel load;
  std::vector<GovernorFleet> governors;
  std::vector<InertiaEmulationDevice> ies;
  std::vector<DeloadedWfDevice> dls;
};

struct DynModel {
  double f0_hz = 50.0;
  std::vector<DynRegion> regions;
  std::vector<Line> lines;

  int region_index(const RegionId& r) const {
    for (size_t i = 0; i < regions.size(); ++i)
      if (regions[i].id == r) return int(i);
    raise(ErrorKind::MissingRegion, "region " + r + " not in model");
  }

  double total_inertia_mws() const {
    double s = 0;
    for (const auto& r : regions) s += r.inertia_mws;
    return s;
  }
};

/// Assembles the multi-area model for one UC hour: regional inertia and
/// governor headroom from the dispatch, condensers folded into inertia,
/// converter devices attached to their regions.
inline DynModel build_multi_area_model(const UcHour& uc, const Portfolio& portfolio,
                                       const Network& net, const LoadModel& load_model,
                                       const DeviceRoster& roster = {}, double f0_hz = 50.0) {
  DynModel m;
  m.f0_hz = f0_hz;
  m.lines = net.lines;
  for (const auto& region : net.regions) {
    DynRegion dr;
    dr.id = region;
    dr.inertia_mws = regional_inertia(uc, portfolio, region);
    dr.load_mw = uc.regions.at(region).net_demand_mw;
    dr.load = load_model;

    std::map<std::pair<double, double>, GovernorFleet> fleets;  // (droop, tc) -> fleet
    for (size_t u = 0; u < portfolio.size(); ++u) {
      const auto& g = portfolio[u];
      if (g.region != region || !uc.units[u].on) continue;
      if (!g.synchronous() || !g.provides_energy() || g.droop <= 0) continue;
      auto& fl = fleets[{g.droop, g.gov_time_const_s}];
      fl.droop = g.droop;
      fl.time_const_s = g.gov_time_const_s;
      fl.rating_mw += g.capacity_mw;
      fl.headroom_mw += g.capacity_mw - uc.units[u].p_mw;
    }
    for (auto& [key, fl] : fleets) dr.governors.push_back(fl);

    for (const auto& sc : roster.syncons)
      if (sc.region == region) dr.inertia_mws += sc.rating_mva * sc.h_s;
    for (const auto& ie : roster.ies)
      if (ie.region == region) dr.ies.push_back(ie);
    for (const auto& dl : roster.dls)
      if (dl.region == region) dr.dls.push_back(dl);
    m.regions.push_back(std::move(dr));
  }
  return m;
}

struct SimOptions {
  double duration_s = 50.0;
  double dt_s = 0.01;
  double event_time_s = 1.0;
  double rocof_window_s = 0.5;
  /// A fixed contingency also removes the inertia of an H = 6 s equivalent
  /// machine of the tripped size.
  bool remove_fixed_cc_inertia = true;
};

inline constexpr double kFixedCcEquivalentH = 6.0;

namespace detail {

/// Flat ODE state over all regions, lines, governors and devices.
struct SimLayout {
  int n_regions = 0, n_lines = 0;
  std::vector<int> f_idx;       // per region: state index of df, or -1 (algebraic)
  std::vector<int> im_idx;      // per region: induction machine lag state, or -1
  std::vector<int> gov_base;    // per region: first governor state index
  std::vector<int> ie_base;     // per region: first IE washout state index (w,e pairs)
  int n_states = 0;
};

struct SimScratch {
  std::vector<double> df;        // per region, filled for algebraic too
  std::vector<double> gov_sum;   // per region
  std::vector<double> dev_sum;   // per region
};

}  // namespace detail

/// Integrates the deviation-form swing dynamics for `duration` seconds with
/// a fixed-step classic Runge-Kutta scheme. The contingency is a generation
/// step of cc.size in cc.region at the event time (grid-aligned, applied
/// whole-step so piecewise-linear references integrate exactly).
inline FrequencyTrace simulate(const DynModel& model_in, const ContingencyCase& cc,
                               const SimOptions& opt = {}) {
  DynModel model = model_in;
  const int cr = model.region_index(cc.region);
  if (cc.kind == ContingencyKind::Fixed && opt.remove_fixed_cc_inertia) {
    model.regions[cr].inertia_mws -= kFixedCcEquivalentH * cc.size_mw;
  }
  if (cc.size_mw > 0 && model.regions[cr].inertia_mws <= 0)
    raise(ErrorKind::SingularRegion, "contingency region " + cc.region + " has no inertia");

  const double f0 = model.f0_hz;
  const int nr = int(model.regions.size());
  const int nl = int(model.lines.size());
  std::vector<int> line_from(nl), line_to(nl);
  for (int l = 0; l < nl; ++l) {
    line_from[l] = model.region_index(model.lines[l].from);
    line_to[l] = model.region_index(model.lines[l].to);
  }
  for (const auto& reg : model.regions) {
    for (const auto& fl : reg.governors)
      if (fl.time_const_s <= 0)
        raise(ErrorKind::ConfigError, "governor time constant must be > 0 in " + reg.id);
    for (const auto& ie : reg.ies)
      if (ie.washout_tc_s <= 0)
        raise(ErrorKind::ConfigError, "IE washout time constant must be > 0 in " + reg.id);
    if (reg.load.kind == LoadModelKind::Dynamic && reg.load.im_fraction > 0 &&
        reg.load.im_time_const_s <= 0)
      raise(ErrorKind::ConfigError, "induction machine time constant must be > 0 in " + reg.id);
  }

  // state layout
  detail::SimLayout lay;
  lay.n_regions = nr;
  lay.n_lines = nl;
  lay.f_idx.assign(nr, -1);
  lay.im_idx.assign(nr, -1);
  lay.gov_base.assign(nr, -1);
  lay.ie_base.assign(nr, -1);
  int idx = 0;
  for (int r = 0; r < nr; ++r) {
    const auto& reg = model.regions[r];
    if (reg.inertia_mws > 0) {
      lay.f_idx[r] = idx++;
    } else {
      double ds = reg.load_mw * reg.load.d_static_per_hz * (1.0 - reg.load.im_fraction);
      if (ds <= 0)
        raise(ErrorKind::SingularRegion,
              "region " + reg.id + " has neither inertia nor static load damping");
    }
  }
  const int line_base = idx;
  idx += nl;
  for (int r = 0; r < nr; ++r) {
    lay.gov_base[r] = idx;
    idx += int(model.regions[r].governors.size());
  }
  for (int r = 0; r < nr; ++r) {
    if (model.regions[r].load.kind == LoadModelKind::Dynamic &&
        model.regions[r].load.im_fraction > 0)
      lay.im_idx[r] = idx++;
  }
  for (int r = 0; r < nr; ++r) {
    lay.ie_base[r] = idx;
    idx += 2 * int(model.regions[r].ies.size());  // (washout, energy) per device
  }
  lay.n_states = idx;

  std::vector<std::vector<IePhase>> phase(nr);
  for (int r = 0; r < nr; ++r) phase[r].assign(model.regions[r].ies.size(), IePhase::Event);

  const size_t steps = size_t(opt.duration_s / opt.dt_s + 0.5) + 1;
  const double event_t = opt.event_time_s;

  FrequencyTrace tr;
  tr.dt_s = opt.dt_s;
  tr.duration_s = opt.duration_s;
  tr.event_time_s = event_t;
  tr.f0_hz = f0;
  for (const auto& reg : model.regions) tr.regions.push_back(reg.id);
  tr.f_hz.assign(nr, std::vector<double>(steps, f0));
  tr.p_gov_mw.assign(nr, std::vector<double>(steps, 0.0));
  tr.p_dev_mw.assign(nr, std::vector<double>(steps, 0.0));

  std::vector<double> x(lay.n_states, 0.0), k1(lay.n_states), k2(lay.n_states), k3(lay.n_states),
      k4(lay.n_states), tmp(lay.n_states);
  detail::SimScratch scratch;
  scratch.df.assign(nr, 0.0);
  scratch.gov_sum.assign(nr, 0.0);
  scratch.dev_sum.assign(nr, 0.0);

  auto rhs = [&](const std::vector<double>& s, bool event_active, std::vector<double>& ds,
                 detail::SimScratch& out) {
    std::fill(ds.begin(), ds.end(), 0.0);

    // tie export per region from line states
    std::vector<double> tie_export(nr, 0.0);
    for (int l = 0; l < nl; ++l) {
      double p = s[line_base + l];
      tie_export[line_from[l]] += p;
      tie_export[line_to[l]] -= p;
    }

    // frequency deviations: state for inertial regions, algebraic otherwise
    for (int r = 0; r < nr; ++r)
      if (lay.f_idx[r] >= 0) out.df[r] = s[lay.f_idx[r]];
    for (int r = 0; r < nr; ++r) {
      const auto& reg = model.regions[r];
      if (lay.f_idx[r] >= 0) continue;
      double ds_stat = reg.load_mw * reg.load.d_static_per_hz * (1.0 - reg.load.im_fraction);
      double x_im = lay.im_idx[r] >= 0 ? s[lay.im_idx[r]] : 0.0;
      double df = out.df[r];  // warm start from previous evaluation
      for (int it = 0; it < 6; ++it) {
        double dev = 0;
        for (size_t d = 0; d < reg.ies.size(); ++d) {
          IeState st{phase[r][d], s[lay.ie_base[r] + 2 * d], s[lay.ie_base[r] + 2 * d + 1]};
          double y = (df - st.washout) / reg.ies[d].washout_tc_s;
          dev += ie_power(reg.ies[d], y, st);
        }
        for (const auto& dl : reg.dls) dev += dl_power(dl, df);
        double step = (event_active && r == cr) ? cc.size_mw : 0.0;
        df = (dev - x_im - step - tie_export[r]) / ds_stat;
      }
      out.df[r] = df;
    }

    for (int l = 0; l < nl; ++l)
      ds[line_base + l] = 2.0 * std::numbers::pi * model.lines[l].sync_coeff_mw_per_rad *
                          (out.df[line_from[l]] - out.df[line_to[l]]);

    for (int r = 0; r < nr; ++r) {
      const auto& reg = model.regions[r];
      const double df = out.df[r];

      double gov = 0;
      for (size_t i = 0; i < reg.governors.size(); ++i) {
        const auto& fl = reg.governors[i];
        double g = s[lay.gov_base[r] + int(i)];
        ds[lay.gov_base[r] + int(i)] = (governor_power(fl, df, f0) - g) / fl.time_const_s;
        gov += g;
      }
      out.gov_sum[r] = gov;

      double dev = 0;
      for (size_t d = 0; d < reg.ies.size(); ++d) {
        const auto& ie = reg.ies[d];
        int wi = lay.ie_base[r] + 2 * int(d);
        IeState st{phase[r][d], s[wi], s[wi + 1]};
        double y = (df - st.washout) / ie.washout_tc_s;
        ds[wi] = y;
        double p = ie_power(ie, y, st);
        dev += p;
        ds[wi + 1] = p;  // event: energy drawn; recovery: negative payback
      }
      for (const auto& dl : reg.dls) dev += dl_power(dl, df);
      out.dev_sum[r] = dev;

      double ds_stat = reg.load_mw * reg.load.d_static_per_hz * (1.0 - reg.load.im_fraction);
      double x_im = lay.im_idx[r] >= 0 ? s[lay.im_idx[r]] : 0.0;
      if (lay.im_idx[r] >= 0) {
        double target = reg.load_mw * reg.load.im_damping_per_hz * reg.load.im_fraction * df;
        ds[lay.im_idx[r]] = (target - x_im) / reg.load.im_time_const_s;
      }

      if (lay.f_idx[r] >= 0) {
        double step = (event_active && r == cr) ? cc.size_mw : 0.0;
        double power = gov + dev - (ds_stat * df + x_im) - step - tie_export[r];
        ds[lay.f_idx[r]] = f0 / (2.0 * reg.inertia_mws) * power;
      }
    }
  };

  for (size_t i = 0; i + 1 < steps; ++i) {
    const double t = double(i) * opt.dt_s;
    const bool active = t >= event_t - 1e-9;

    rhs(x, active, k1, scratch);
    // record sampled outputs at t from the first stage
    for (int r = 0; r < nr; ++r) {
      tr.f_hz[r][i] = f0 + scratch.df[r];
      tr.p_gov_mw[r][i] = scratch.gov_sum[r];
      tr.p_dev_mw[r][i] = scratch.dev_sum[r];
    }

    const double h = opt.dt_s;
    for (int j = 0; j < lay.n_states; ++j) tmp[j] = x[j] + 0.5 * h * k1[j];
    rhs(tmp, active, k2, scratch);
    for (int j = 0; j < lay.n_states; ++j) tmp[j] = x[j] + 0.5 * h * k2[j];
    rhs(tmp, active, k3, scratch);
    for (int j = 0; j < lay.n_states; ++j) tmp[j] = x[j] + h * k3[j];
    rhs(tmp, active, k4, scratch);
    for (int j = 0; j < lay.n_states; ++j)
      x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

    // device phase transitions, once per step
    for (int r = 0; r < nr; ++r)
      for (size_t d = 0; d < model.regions[r].ies.size(); ++d) {
        const auto& ie = model.regions[r].ies[d];
        double& e = x[lay.ie_base[r] + 2 * int(d) + 1];
        if (phase[r][d] == IePhase::Event &&
            e >= ie.recovery_trigger * ie.ke_budget_mws - 1e-12 && ie.recovery_power_mw > 0) {
          phase[r][d] = IePhase::Recovery;
        } else if (phase[r][d] == IePhase::Recovery && e <= 0) {
          e = 0;
          phase[r][d] = IePhase::Done;
        }
      }

    for (int r = 0; r < nr; ++r) {
      double v = lay.f_idx[r] >= 0 ? x[lay.f_idx[r]] : scratch.df[r];
      if (!std::isfinite(v))
        raise(ErrorKind::NonFiniteState,
              "frequency diverged in " + model.regions[r].id + " at t=" + std::to_string(t));
    }
  }

  // final sample
  rhs(x, double(steps - 1) * opt.dt_s >= event_t - 1e-9, k1, scratch);
  for (int r = 0; r < nr; ++r) {
    tr.f_hz[r][steps - 1] = f0 + scratch.df[r];
    tr.p_gov_mw[r][steps - 1] = scratch.gov_sum[r];
    tr.p_dev_mw[r][steps - 1] = scratch.dev_sum[r];
  }

  tr.rocof.resize(nr);
  for (int r = 0; r < nr; ++r)
    tr.rocof[r] = windowed_rocof_series(tr.f_hz[r], opt.dt_s, opt.rocof_window_s);
  return tr;
}

/// Inertia-weighted mean frequency over inertial regions.
inline std::vector<double> coi_frequency(const DynModel& model, const FrequencyTrace& tr) {
  std::vector<double> coi(tr.steps(), 0.0);
  double wsum = 0;
  for (size_t r = 0; r < model.regions.size(); ++r) wsum += model.regions[r].inertia_mws;
  if (wsum <= 0) raise(ErrorKind::SingularRegion, "model has no inertia");
  for (size_t i = 0; i < tr.steps(); ++i) {
    double s = 0;
    for (size_t r = 0; r < model.regions.size(); ++r)
      s += model.regions[r].inertia_mws * tr.f_hz[r][i];
    coi[i] = s / wsum;
  }
  return coi;
}

}  // namespace gridfreq
