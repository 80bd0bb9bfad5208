#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridfreq/contingency.hpp"
#include "gridfreq/dispatch.hpp"
#include "gridfreq/dynamics.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/network.hpp"
#include "gridfreq/prosumer.hpp"
#include "gridfreq/scenario.hpp"

namespace gridfreq {

using nlohmann::json;

/// Everything one scan needs: inputs, grid definition, sensitivity grid,
/// model parameters and execution knobs. Loaded from a single JSON file;
/// see the README for the schema.
struct ScanConfig {
  double f0_hz = 50.0;
  Network network;
  Portfolio base_portfolio;
  double base_nsap = 0.10;
  std::filesystem::path traces_csv;
  std::vector<double> scenario_targets;
  ScenarioBuildOptions build_opts;

  bool prosumers_enabled = false;
  ProsumerConfig prosumer;

  UcOptions uc;

  std::vector<LoadModelKind> load_models{LoadModelKind::Static, LoadModelKind::Dynamic};
  std::vector<ContingencyKind> contingency_kinds{ContingencyKind::Variable,
                                                 ContingencyKind::Fixed};
  std::vector<RegionId> locations;
  bool meter_all = false;
  double fixed_cc_mw = 666.0;

  LoadModel load_params_static = LoadModel::static_model();
  LoadModel load_params_dynamic = LoadModel::dynamic_model();

  std::string devices_option = "normal";  // normal | sc | ie | dl
  DeviceRoster roster;

  SimOptions sim;
  MetricOptions metric;

  std::filesystem::path out_dir = "out";
  int workers = 1;
  int checkpoint_every_hours = 2000;

  /// Canonical JSON the config was built from (used for the store hash).
  json raw;
};

namespace detail {

inline std::string hash_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

template <typename T>
T get_or(const json& j, const std::string& key, T def) {
  if (!j.contains(key)) return def;
  return j.at(key).get<T>();
}

}  // namespace detail

inline std::string config_hash(const ScanConfig& cfg) { return detail::hash_hex(cfg.raw.dump()); }

inline GeneratorSpec generator_from_json(const json& j) {
  GeneratorSpec g;
  g.id = j.at("id").get<std::string>();
  g.region = j.at("region").get<std::string>();
  g.tech = tech_from_string(j.at("tech").get<std::string>());
  g.capacity_mw = j.at("capacity_mw").get<double>();
  g.inertia_h_s = detail::get_or(j, "inertia_h_s", 0.0);
  g.srmc = detail::get_or(j, "srmc", 0.0);
  g.fixed_cost = detail::get_or(j, "fixed_cost", 0.0);
  g.startup_cost = detail::get_or(j, "startup_cost", 0.0);
  g.shutdown_cost = detail::get_or(j, "shutdown_cost", 0.0);
  g.min_stable = detail::get_or(j, "min_stable", 0.0);
  g.ramp_mw_per_h = detail::get_or(j, "ramp_mw_per_h", 1e12);
  g.min_up_h = detail::get_or(j, "min_up_h", 1);
  g.min_down_h = detail::get_or(j, "min_down_h", 1);
  g.droop = detail::get_or(j, "droop", 0.0);
  g.gov_time_const_s = detail::get_or(j, "gov_time_const_s", 0.5);
  return g;
}

inline LoadModel load_model_from_json(const json& j, LoadModelKind kind) {
  LoadModel m = LoadModel::of(kind);
  m.d_static_per_hz = detail::get_or(j, "d_static_per_hz", m.d_static_per_hz);
  m.im_time_const_s = detail::get_or(j, "im_time_const_s", m.im_time_const_s);
  m.im_damping_per_hz = detail::get_or(j, "im_damping_per_hz", m.im_damping_per_hz);
  if (kind == LoadModelKind::Dynamic)
    m.im_fraction = detail::get_or(j, "im_fraction", m.im_fraction);
  return m;
}

inline ScanConfig load_scan_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    raise(ErrorKind::ParseError, "config " + path.string() + ": " + e.what());
  }

  ScanConfig cfg;
  cfg.raw = j;
  cfg.f0_hz = detail::get_or(j, "f0_hz", 50.0);

  for (const auto& r : j.at("regions")) cfg.network.regions.push_back(r.get<std::string>());
  for (const auto& l : detail::get_or(j, "lines", json::array())) {
    Line line;
    line.from = l.at("from").get<std::string>();
    line.to = l.at("to").get<std::string>();
    line.limit_mw = l.at("limit_mw").get<double>();
    line.sync_coeff_mw_per_rad = detail::get_or(l, "sync_coeff_mw_per_rad", 500.0);
    cfg.network.lines.push_back(line);
  }
  check_network(cfg.network);

  for (const auto& g : j.at("portfolio")) cfg.base_portfolio.push_back(generator_from_json(g));
  check_portfolio(cfg.base_portfolio);

  cfg.base_nsap = detail::get_or(j, "base_nsap", 0.10);
  cfg.traces_csv = j.at("traces_csv").get<std::string>();
  if (cfg.traces_csv.is_relative()) cfg.traces_csv = path.parent_path() / cfg.traces_csv;

  for (const auto& s : j.at("scenarios")) {
    if (s.is_string())
      cfg.scenario_targets.push_back(nsap_from_label(s.get<std::string>()));
    else
      cfg.scenario_targets.push_back(s.get<double>());
  }

  if (j.contains("ns_region_weights"))
    for (auto& [k, v] : j.at("ns_region_weights").items())
      cfg.build_opts.ns_region_weights[k] = v.get<double>();
  if (j.contains("ns_capacity_cap_mw"))
    for (auto& [k, v] : j.at("ns_capacity_cap_mw").items())
      cfg.build_opts.ns_capacity_cap_mw[k] = v.get<double>();

  if (j.contains("prosumers")) {
    const auto& p = j.at("prosumers");
    cfg.prosumers_enabled = detail::get_or(p, "enabled", false);
    if (p.contains("penetration"))
      for (auto& [k, v] : p.at("penetration").items()) cfg.prosumer.penetration[k] = v.get<double>();
    cfg.prosumer.battery_kwh_per_kw_pv = detail::get_or(p, "battery_kwh_per_kw_pv", 1.8);
    cfg.prosumer.pv_kw_per_prosumer_mw = detail::get_or(p, "pv_kw_per_prosumer_mw", 0.0);
    cfg.prosumer.round_trip_eff = detail::get_or(p, "round_trip_eff", 0.9);
  }

  if (j.contains("uc")) {
    const auto& u = j.at("uc");
    cfg.uc.reserve_fraction = detail::get_or(u, "reserve_fraction", -1.0);
    std::string ic = detail::get_or<std::string>(u, "inertia_constraint", "off");
    if (ic == "off")
      cfg.uc.inertia_constraint = InertiaConstraintMode::Off;
    else if (ic == "regional")
      cfg.uc.inertia_constraint = InertiaConstraintMode::Regional;
    else
      raise(ErrorKind::ConfigError, "uc.inertia_constraint must be off|regional");
    cfg.uc.rocof_crit_hz_per_s = detail::get_or(u, "rocof_crit_hz_per_s", 0.5);
  }
  cfg.uc.f0_hz = cfg.f0_hz;

  cfg.locations = cfg.network.regions;
  if (j.contains("cases")) {
    const auto& c = j.at("cases");
    if (c.contains("load_models")) {
      cfg.load_models.clear();
      for (const auto& s : c.at("load_models")) {
        std::string v = s.get<std::string>();
        if (v == "static")
          cfg.load_models.push_back(LoadModelKind::Static);
        else if (v == "dynamic")
          cfg.load_models.push_back(LoadModelKind::Dynamic);
        else
          raise(ErrorKind::ConfigError, "cases.load_models entries must be static|dynamic");
      }
    }
    if (c.contains("contingencies")) {
      cfg.contingency_kinds.clear();
      for (const auto& s : c.at("contingencies")) {
        std::string v = s.get<std::string>();
        if (v == "variable")
          cfg.contingency_kinds.push_back(ContingencyKind::Variable);
        else if (v == "fixed")
          cfg.contingency_kinds.push_back(ContingencyKind::Fixed);
        else
          raise(ErrorKind::ConfigError, "cases.contingencies entries must be variable|fixed");
      }
    }
    if (c.contains("locations")) {
      cfg.locations.clear();
      for (const auto& s : c.at("locations")) cfg.locations.push_back(s.get<std::string>());
    }
    std::string meter = detail::get_or<std::string>(c, "meter", "location");
    if (meter == "all")
      cfg.meter_all = true;
    else if (meter != "location")
      raise(ErrorKind::ConfigError, "cases.meter must be location|all");
    cfg.fixed_cc_mw = detail::get_or(c, "fixed_cc_mw", 666.0);
    cfg.sim.remove_fixed_cc_inertia = detail::get_or(c, "fixed_cc_removes_inertia", true);
  }

  const json lmp = detail::get_or(j, "load_model_params", json::object());
  cfg.load_params_static = load_model_from_json(lmp, LoadModelKind::Static);
  cfg.load_params_dynamic = load_model_from_json(lmp, LoadModelKind::Dynamic);

  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    cfg.sim.duration_s = detail::get_or(s, "duration_s", 50.0);
    cfg.sim.dt_s = detail::get_or(s, "dt_s", 0.01);
    cfg.sim.event_time_s = detail::get_or(s, "event_time_s", 1.0);
    cfg.sim.rocof_window_s = detail::get_or(s, "rocof_window_s", 0.5);
    cfg.metric.nadir_floor_hz = detail::get_or(s, "nadir_floor_hz", 49.5);
  }
  cfg.metric.rocof_window_s = cfg.sim.rocof_window_s;
  cfg.metric.rocof_crit_hz_per_s = cfg.uc.rocof_crit_hz_per_s;

  const json dj = detail::get_or(j, "devices", json::object());
  cfg.devices_option = detail::get_or<std::string>(dj, "option", "normal");
  if (cfg.devices_option == "sc") {
    double rating = 400, h = 6;
    std::vector<RegionId> where = cfg.network.regions;
    if (dj.contains("sc")) {
      const auto& sj = dj.at("sc");
      rating = detail::get_or(sj, "rating_mva", 400.0);
      h = detail::get_or(sj, "h_s", 6.0);
      if (sj.contains("regions")) {
        where.clear();
        for (const auto& r : sj.at("regions")) where.push_back(r.get<std::string>());
      }
    }
    for (const auto& r : where) cfg.roster.syncons.push_back({r, rating, h});
  } else if (cfg.devices_option == "ie") {
    const json ij = detail::get_or(dj, "ie", json::object());
    RegionId region = detail::get_or<std::string>(ij, "region", cfg.network.regions.front());
    double rating = detail::get_or(ij, "wf_rating_mw", 600.0);
    auto dev = default_ie_device(region, rating, cfg.f0_hz);
    dev.k_ie_mw_per_hzps = detail::get_or(ij, "k_ie_mw_per_hzps", dev.k_ie_mw_per_hzps);
    dev.washout_tc_s = detail::get_or(ij, "washout_tc_s", dev.washout_tc_s);
    dev.p_max_mw = detail::get_or(ij, "p_max_mw", dev.p_max_mw);
    dev.ke_budget_mws = detail::get_or(ij, "ke_budget_mws", dev.ke_budget_mws);
    dev.recovery_power_mw = detail::get_or(ij, "recovery_power_mw", dev.recovery_power_mw);
    dev.recovery_trigger = detail::get_or(ij, "recovery_trigger", dev.recovery_trigger);
    cfg.roster.ies.push_back(dev);
  } else if (cfg.devices_option == "dl") {
    const json lj = detail::get_or(dj, "dl", json::object());
    RegionId region = detail::get_or<std::string>(lj, "region", cfg.network.regions.front());
    double avail = detail::get_or(lj, "available_mw", 600.0);
    auto dev = default_dl_device(region, avail, cfg.f0_hz);
    dev.deload_frac = detail::get_or(lj, "deload_frac", dev.deload_frac);
    dev.droop_gain_mw_per_hz = detail::get_or(lj, "droop_gain_mw_per_hz", dev.droop_gain_mw_per_hz);
    cfg.roster.dls.push_back(dev);
  } else if (cfg.devices_option != "normal") {
    raise(ErrorKind::ConfigError, "devices.option must be normal|sc|ie|dl");
  }

  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    std::string out = detail::get_or<std::string>(s, "out_dir", "out");
    cfg.out_dir = out;
    if (cfg.out_dir.is_relative()) cfg.out_dir = path.parent_path() / cfg.out_dir;
    cfg.workers = detail::get_or(s, "workers", 1);
    cfg.checkpoint_every_hours = detail::get_or(s, "checkpoint_every_hours", 2000);
    cfg.uc.hour_begin = detail::get_or(s, "hour_begin", 0);
    cfg.uc.hour_end = detail::get_or(s, "hour_end", -1);
  }
  if (cfg.workers < 1) raise(ErrorKind::ConfigError, "scan.workers must be >= 1");
  if (cfg.scenario_targets.empty()) raise(ErrorKind::ConfigError, "no scenarios configured");
  if (cfg.locations.empty()) raise(ErrorKind::ConfigError, "no contingency locations configured");
  return cfg;
}

}  // namespace gridfreq
