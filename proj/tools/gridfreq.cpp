// Command line front end: scenario scans, single-case debugging, report
// generation, dispatch audits and synthetic trace generation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridfreq/config.hpp"
#include "gridfreq/contingency.hpp"
#include "gridfreq/dispatch.hpp"
#include "gridfreq/dynamics.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/orchestrator.hpp"
#include "gridfreq/store.hpp"
#include "gridfreq/trace_gen.hpp"
#include "gridfreq/traces.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 64;

struct Overrides {
  std::string config_path;
  std::string scenario;
  std::string load_model;
  std::string contingency;
  std::string location;
  std::string meter;
  std::string devices;
  double rocof_crit = -1;
  std::string out_dir;
  int workers = 0;
  bool resume = false;
};

gridfreq::ScanConfig load_with_overrides(const Overrides& ov) {
  using namespace gridfreq;
  ScanConfig cfg = load_scan_config(ov.config_path);
  if (!ov.scenario.empty()) cfg.scenario_targets = {nsap_from_label(ov.scenario)};
  if (!ov.load_model.empty()) {
    if (ov.load_model == "static")
      cfg.load_models = {LoadModelKind::Static};
    else if (ov.load_model == "dynamic")
      cfg.load_models = {LoadModelKind::Dynamic};
    else
      raise(ErrorKind::ConfigError, "--load-model must be static|dynamic");
  }
  if (!ov.contingency.empty()) {
    if (ov.contingency == "variable")
      cfg.contingency_kinds = {ContingencyKind::Variable};
    else if (ov.contingency == "fixed")
      cfg.contingency_kinds = {ContingencyKind::Fixed};
    else
      raise(ErrorKind::ConfigError, "--contingency must be variable|fixed");
  }
  if (!ov.location.empty()) cfg.locations = {ov.location};
  if (!ov.meter.empty()) cfg.meter_all = (ov.meter == "all");
  if (!ov.devices.empty()) {
    // rebuild the roster for the requested option with config defaults
    json raw = cfg.raw;
    if (!raw.contains("devices")) raw["devices"] = json::object();
    raw["devices"]["option"] = ov.devices;
    auto tmp = std::filesystem::temp_directory_path() / "gridfreq_override.json";
    {
      std::ofstream out(tmp);
      out << raw.dump();
    }
    ScanConfig rebuilt = load_scan_config(tmp);
    rebuilt.traces_csv = cfg.traces_csv;  // keep paths anchored at the real config
    rebuilt.out_dir = cfg.out_dir;
    cfg = rebuilt;
    std::filesystem::remove(tmp);
  }
  if (ov.rocof_crit > 0) {
    cfg.uc.rocof_crit_hz_per_s = ov.rocof_crit;
    cfg.metric.rocof_crit_hz_per_s = ov.rocof_crit;
  }
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.workers > 0) cfg.workers = ov.workers;
  // overrides change the effective config, so re-key the store hash
  json keyed = cfg.raw;
  keyed["_overrides"] = {{"scenario", ov.scenario},
                         {"load_model", ov.load_model},
                         {"contingency", ov.contingency},
                         {"location", ov.location},
                         {"meter", ov.meter},
                         {"devices", ov.devices},
                         {"rocof_crit", ov.rocof_crit}};
  cfg.raw = keyed;
  return cfg;
}

int cmd_scan(const Overrides& ov, bool plan_only) {
  using namespace gridfreq;
  ScanConfig cfg = load_with_overrides(ov);
  auto traces = load_traces(cfg.traces_csv);
  ScanPlan plan = plan_scan(cfg, traces.hours);
  std::cerr << "plan: " << plan.scenarios << " scenarios, " << plan.cases << " cases, "
            << plan.hours << " hours -> " << plan.runs << " simulation runs, " << plan.records
            << " records\n";
  if (plan_only) return kExitOk;

  ScanOutcome out = run_scan(cfg, ov.resume, &std::cerr);
  std::cerr << "scan complete: " << out.records_written << " records written, "
            << out.skipped_case_hours << " case-hours skipped, " << out.cf_capped_hours
            << " fixed contingencies capped\n";
  for (const auto& [s, why] : out.scenario_skips)
    std::cerr << "scenario " << s << " skipped: " << why << "\n";
  return out.scenario_skips.empty() ? kExitOk : kExitInfeasible;
}

gridfreq::json family_json(const gridfreq::FamilySummary& f) {
  gridfreq::json j;
  j["records"] = f.records;
  if (f.records > 0) {
    j["i_sys_min_mws"] = f.i_sys_min;
    j["i_sys_mean_mws"] = f.i_sys_mean();
    j["i_sys_max_mws"] = f.i_sys_max;
  }
  j["rocof_violations"] = f.rocof_violations;
  j["nadir_violations"] = f.nadir_violations;
  j["i_sys_hist"] = {{"lo", f.i_sys_hist.lo}, {"hi", f.i_sys_hist.hi},
                     {"counts", f.i_sys_hist.counts}};
  j["p_cc_hist"] = {{"lo", f.p_cc_hist.lo}, {"hi", f.p_cc_hist.hi},
                    {"counts", f.p_cc_hist.counts}};
  j["nsip_decile_hours"] = f.nsip_hours;
  j["nsip_decile_rocof_violations"] = f.nsip_rocof_violations;
  return j;
}

int cmd_report(const Overrides& ov, const std::string& store_dir) {
  using namespace gridfreq;
  std::filesystem::path dir;
  if (!store_dir.empty()) {
    dir = store_dir;
  } else {
    ScanConfig cfg = load_with_overrides(ov);
    dir = cfg.out_dir;
  }
  ResultStore store = ResultStore::open(dir);
  std::vector<ScanRecord> records = store.read_all_records();

  ScanSummary summary = aggregate_scan(records);
  json j;
  j["records"] = long(records.size());
  j["total"] = family_json(summary.total);
  j["families"] = json::object();
  for (const auto& [label, fam] : summary.families) {
    auto fj = family_json(fam);
    std::vector<ScanRecord> fr;
    for (const auto& r : records)
      if (r.case_label == label) fr.push_back(r);
    try {
      auto [lo, hi] = critical_nsip_range(fr);
      fj["critical_nsip"] = {lo, hi};
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NoViolations) throw;
      fj["critical_nsip"] = nullptr;
    }
    j["families"][label] = fj;
  }
  try {
    auto [lo, hi] = critical_nsip_range(records);
    j["critical_nsip_range"] = {lo, hi};
    std::cout << "critical NSIP range: [" << lo << ", " << hi << "]\n";
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::NoViolations) throw;
    j["critical_nsip_range"] = nullptr;
    j["note"] = "no RoCoF violations in the record set";
    std::cout << "no RoCoF violations in the record set\n";
  }

  auto out_path = dir / "summary.json";
  std::ofstream out(out_path);
  out << j.dump(2) << '\n';
  std::cout << "records: " << records.size() << "\n";
  std::cout << "summary written to " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_case(const Overrides& ov, const std::string& label_str, int hour,
             const std::string& trace_out) {
  using namespace gridfreq;
  SensitivityCase c = parse_case_label(label_str);
  ScanConfig cfg = load_with_overrides(ov);
  if (!cfg.network.has_region(c.location) || !cfg.network.has_region(c.meter))
    raise(ErrorKind::MissingRegion, "label names a region outside the network");

  auto traces = std::make_shared<HourlyTraceSet>(load_traces(cfg.traces_csv));
  if (cfg.prosumers_enabled) *traces = apply_prosumers(*traces, cfg.prosumer);
  if (hour < 0 || hour >= int(traces->hours))
    raise(ErrorKind::ValueOutOfRange, "hour outside the trace horizon");

  Scenario base;
  base.id = nsap_label(cfg.base_nsap);
  base.target_nsap = cfg.base_nsap;
  base.portfolio = cfg.base_portfolio;
  base.traces = traces;
  Scenario sc = build_scenario(base, nsap_from_label(c.scenario), cfg.build_opts);

  UcOptions uco = cfg.uc;
  uco.hour_begin = 0;
  uco.hour_end = hour + 1;  // dispatch history up to the requested hour
  std::vector<UcHour> uc = solve_uc(sc, cfg.network, uco);
  const UcHour& h = uc.back();

  std::optional<ContingencyCase> cc;
  if (c.contingency_kind == ContingencyKind::Variable) {
    cc = try_identify_regional_cc(h, sc.portfolio, c.location);
    if (!cc) raise(ErrorKind::NoSynchronousUnit, "no synchronous unit dispatched in " + c.location);
  } else {
    double sync_disp = 0;
    for (size_t u = 0; u < sc.portfolio.size(); ++u)
      if (h.units[u].on && sc.portfolio[u].synchronous() && sc.portfolio[u].region == c.location)
        sync_disp += h.units[u].p_mw;
    if (sync_disp <= 0)
      raise(ErrorKind::NoSynchronousUnit, "no synchronous dispatch to trip in " + c.location);
    cc = fixed_cc(c.location, std::min(cfg.fixed_cc_mw, sync_disp));
  }

  const LoadModel& lm =
      c.load_model == LoadModelKind::Static ? cfg.load_params_static : cfg.load_params_dynamic;
  DynModel model = build_multi_area_model(h, sc.portfolio, cfg.network, lm, cfg.roster, cfg.f0_hz);
  FrequencyTrace trace = simulate(model, *cc, cfg.sim);

  std::string out_path = trace_out.empty()
                             ? "case_" + label_str + "_h" + std::to_string(hour) + ".csv"
                             : trace_out;
  export_trace(trace, out_path);

  FrequencyMetrics m = extract_metrics(trace, c.meter, cfg.metric);
  std::cout << "case " << label_str << " hour " << hour << "\n";
  std::cout << "p_cc_mw " << cc->size_mw << "\n";
  std::cout << "i_sys_mws " << model.total_inertia_mws() << "\n";
  std::cout << "i_region_mws " << model.regions[cfg.network.region_index(c.location)].inertia_mws
            << "\n";
  std::cout << "nsip " << nsip(h, sc.portfolio) << "\n";
  std::cout << "min_rocof_hz_per_s " << m.min_rocof << "\n";
  std::cout << "nadir_hz " << m.nadir_hz << " at t " << m.t_nadir_s << " s\n";
  std::cout << "settling_hz " << m.settling_hz << "\n";
  std::cout << "rocof_violation " << (m.rocof_violation ? 1 : 0) << "\n";
  std::cout << "nadir_violation " << (m.nadir_violation ? 1 : 0) << "\n";
  std::cout << "trace written to " << out_path << "\n";
  return kExitOk;
}

int cmd_validate(const Overrides& ov, bool export_uc) {
  using namespace gridfreq;
  ScanConfig cfg = load_with_overrides(ov);
  auto traces = std::make_shared<HourlyTraceSet>(load_traces(cfg.traces_csv));
  if (cfg.prosumers_enabled) *traces = apply_prosumers(*traces, cfg.prosumer);

  Scenario base;
  base.id = nsap_label(cfg.base_nsap);
  base.target_nsap = cfg.base_nsap;
  base.portfolio = cfg.base_portfolio;
  base.traces = traces;

  bool any_infeasible = false, any_violation = false;
  for (double target : cfg.scenario_targets) {
    const std::string label = nsap_label(target);
    try {
      Scenario sc = build_scenario(base, target, cfg.build_opts);
      std::vector<UcHour> uc = solve_uc(sc, cfg.network, cfg.uc);
      ViolationReport rep = validate_uc(uc, sc, cfg.network, cfg.uc);
      if (rep.empty()) {
        std::cout << label << ": dispatch feasible, audit clean (" << uc.size() << " hours)\n";
      } else {
        any_violation = true;
        std::cout << label << ": " << rep.items.size() << " violations\n" << rep.summary();
      }
      if (export_uc) {
        std::filesystem::create_directories(cfg.out_dir);
        export_uc_units(uc, sc.portfolio, cfg.out_dir / ("uc_" + label + "_units.csv"));
        export_uc_regions(uc, cfg.network, cfg.out_dir / ("uc_" + label + "_regions.csv"));
      }
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::Infeasible && err.kind() != ErrorKind::TargetUnreachable) throw;
      any_infeasible = true;
      std::cout << label << ": infeasible (" << err.what() << ")\n";
    }
  }
  if (any_violation) return kExitError;
  return any_infeasible ? kExitInfeasible : kExitOk;
}

int cmd_gen_traces(const std::string& out, int hours, std::uint64_t seed,
                   const std::vector<std::string>& means) {
  using namespace gridfreq;
  TraceGenOptions opt;
  opt.hours = size_t(hours);
  opt.seed = seed;
  if (means.empty()) {
    opt.mean_demand_mw = {{"QLD", 7000}, {"NSW", 9500}, {"VIC", 6200}, {"SA", 1700}};
  } else {
    for (const auto& m : means) {
      auto pos = m.find('=');
      if (pos == std::string::npos)
        raise(ErrorKind::ConfigError, "--mean-demand entries look like REGION=MW");
      opt.mean_demand_mw[m.substr(0, pos)] = std::stod(m.substr(pos + 1));
    }
  }
  save_traces(generate_traces(opt), out);
  std::cout << "wrote " << hours << " hours x " << opt.mean_demand_mw.size() << " regions to "
            << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-stability scenario scanning engine"};
  app.require_subcommand(1);

  Overrides ov;
  bool plan_only = false, export_uc = false;
  std::string label, trace_out, store_dir;
  int hour = 0;
  int gen_hours = 8760;
  std::uint64_t gen_seed = 42;
  std::string gen_out = "traces.csv";
  std::vector<std::string> gen_means;

  auto add_common = [&](CLI::App* sub, bool need_config = true) {
    auto* o = sub->add_option("--config", ov.config_path, "scan configuration JSON");
    if (need_config) o->required();
    sub->add_option("--scenario", ov.scenario, "restrict to one scenario (NSxx)");
    sub->add_option("--load-model", ov.load_model, "static|dynamic");
    sub->add_option("--contingency", ov.contingency, "variable|fixed");
    sub->add_option("--location", ov.location, "contingency region");
    sub->add_option("--meter", ov.meter, "metering region policy: location|all");
    sub->add_option("--devices", ov.devices, "normal|sc|ie|dl");
    sub->add_option("--rocof-crit", ov.rocof_crit, "critical RoCoF magnitude, Hz/s");
    sub->add_option("--out", ov.out_dir, "output directory override");
    sub->add_option("--workers", ov.workers, "worker thread count");
  };

  auto* scan = app.add_subcommand("scan", "run the full scenario scan");
  add_common(scan);
  scan->add_flag("--resume", ov.resume, "continue an interrupted scan");
  scan->add_flag("--plan", plan_only, "print the run plan and exit");

  auto* casec = app.add_subcommand("case", "dispatch + simulate one labelled case hour");
  add_common(casec);
  casec->add_option("--label", label, "case label, e.g. NS80-LsCvQLD-QLD")->required();
  casec->add_option("--hour", hour, "hour index")->required();
  casec->add_option("--trace-out", trace_out, "trace CSV path");

  auto* report = app.add_subcommand("report", "aggregate a scan store into summary.json");
  add_common(report, /*need_config=*/false);
  report->add_option("--store", store_dir, "store directory (defaults to config out_dir)");

  auto* validate = app.add_subcommand("validate", "solve and audit dispatch per scenario");
  add_common(validate);
  validate->add_flag("--export-uc", export_uc, "write UC result CSVs");

  auto* gen = app.add_subcommand("gen-traces", "write synthetic hourly traces");
  gen->add_option("--out", gen_out, "output CSV path");
  gen->add_option("--hours", gen_hours, "horizon length");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--mean-demand", gen_means, "REGION=MW entries (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (scan->parsed()) return cmd_scan(ov, plan_only);
    if (casec->parsed()) return cmd_case(ov, label, hour, trace_out);
    if (report->parsed()) {
      if (ov.config_path.empty() && store_dir.empty()) {
        std::cerr << "report needs --config or --store\n";
        return kExitUsage;
      }
      return cmd_report(ov, store_dir);
    }
    if (validate->parsed()) return cmd_validate(ov, export_uc);
    if (gen->parsed()) return cmd_gen_traces(gen_out, gen_hours, gen_seed, gen_means);
  } catch (const gridfreq::Error& e) {
    if (e.kind() == gridfreq::ErrorKind::ParseError &&
        std::string(e.what()).find("case label") != std::string::npos) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == gridfreq::ErrorKind::Infeasible ? kExitInfeasible : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
