#pragma once

#include <atomic>
#include <exception>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gridfreq/config.hpp"
#include "gridfreq/contingency.hpp"
#include "gridfreq/dispatch.hpp"
#include "gridfreq/dynamics.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/prosumer.hpp"
#include "gridfreq/scenario.hpp"
#include "gridfreq/store.hpp"
#include "gridfreq/traces.hpp"

namespace gridfreq {

struct ScanPlan {
  int scenarios = 0;
  int cases = 0;
  int hours = 0;
  long runs = 0;     // simulations
  long records = 0;  // rows (= runs x meters per case)
};

/// Case grid after config filtering, in deterministic order.
inline std::vector<SensitivityCase> configured_cases(const ScanConfig& cfg) {
  std::vector<std::string> labels;
  for (double t : cfg.scenario_targets) labels.push_back(nsap_label(t));
  std::vector<SensitivityCase> out;
  for (const auto& c : enumerate_cases(labels, cfg.locations)) {
    bool lm = std::find(cfg.load_models.begin(), cfg.load_models.end(), c.load_model) !=
              cfg.load_models.end();
    bool ck = std::find(cfg.contingency_kinds.begin(), cfg.contingency_kinds.end(),
                        c.contingency_kind) != cfg.contingency_kinds.end();
    if (lm && ck) out.push_back(c);
  }
  return out;
}

inline ScanPlan plan_scan(const ScanConfig& cfg, size_t trace_hours) {
  ScanPlan p;
  p.scenarios = int(cfg.scenario_targets.size());
  p.cases = int(configured_cases(cfg).size());
  int b = cfg.uc.hour_begin;
  int e = cfg.uc.hour_end < 0 ? int(trace_hours) : cfg.uc.hour_end;
  p.hours = e - b;
  p.runs = long(p.cases) * p.hours;
  p.records = p.runs * long(cfg.meter_all ? cfg.network.regions.size() : 1);
  return p;
}

struct ScanOutcome {
  long records_written = 0;
  long skipped_case_hours = 0;
  long cf_capped_hours = 0;
  std::map<std::string, std::string> scenario_skips;
};

namespace detail {

struct HourDerived {
  double nsip = 0;
  double i_sys = 0;
  std::vector<double> sync_dispatch_r;             // per region
  std::vector<std::optional<ContingencyCase>> cc;  // per region
};

struct BlockResult {
  std::vector<std::string> rows;
  std::vector<std::pair<int, std::string>> skips;  // (hour, reason)
  long capped = 0;
  bool done = false;
};

}  // namespace detail

/// Executes the scan: per scenario one dispatch pass over the horizon, then
/// every configured sensitivity case against every hour. Hour blocks of one
/// case run on a worker pool; rows are flushed in deterministic order, so
/// output is byte-identical for any worker count.
inline ScanOutcome run_scan(const ScanConfig& cfg, bool resume = false,
                            std::ostream* progress = nullptr) {
  auto log = [&](const std::string& s) {
    if (progress) (*progress) << s << "\n";
  };

  auto traces = std::make_shared<HourlyTraceSet>(load_traces(cfg.traces_csv));
  if (cfg.prosumers_enabled) *traces = apply_prosumers(*traces, cfg.prosumer);

  const int b = cfg.uc.hour_begin;
  const int e = cfg.uc.hour_end < 0 ? int(traces->hours) : cfg.uc.hour_end;
  const int horizon = e - b;
  if (horizon <= 0) raise(ErrorKind::EmptyHorizon, "empty scan horizon");

  const std::string hash = config_hash(cfg);
  auto cases = configured_cases(cfg);
  std::vector<std::string> labels;
  for (const auto& c : cases) labels.push_back(case_label(c));

  ResultStore store = [&] {
    if (resume) {
      ResultStore st = ResultStore::open(cfg.out_dir);
      if (st.config_hash() != hash)
        raise(ErrorKind::ConfigMismatch, "store was produced by a different config");
      if (st.hour_begin() != b || st.hour_end() != e)
        raise(ErrorKind::ConfigMismatch, "store covers a different horizon");
      st.truncate_to_manifest();
      return st;
    }
    return ResultStore::create(cfg.out_dir, hash, b, e, labels);
  }();

  ScanOutcome outcome;
  Scenario base;
  base.id = nsap_label(cfg.base_nsap);
  base.target_nsap = cfg.base_nsap;
  base.portfolio = cfg.base_portfolio;
  base.traces = traces;

  const auto& net = cfg.network;
  const int nr = int(net.regions.size());

  for (double target : cfg.scenario_targets) {
    const std::string slabel = nsap_label(target);

    std::vector<const SensitivityCase*> scases;
    for (size_t i = 0; i < cases.size(); ++i)
      if (cases[i].scenario == slabel) scases.push_back(&cases[i]);
    if (scases.empty()) continue;

    if (auto it = store.scenario_skips().find(slabel); it != store.scenario_skips().end()) {
      outcome.scenario_skips[slabel] = it->second;
      continue;
    }
    bool all_done = true;
    for (const auto* c : scases)
      if (store.completed(case_label(*c)) < horizon) all_done = false;
    if (all_done) continue;

    log("scenario " + slabel + ": dispatch over " + std::to_string(horizon) + " hours");
    Scenario sc;
    std::vector<UcHour> uc;
    try {
      sc = build_scenario(base, target, cfg.build_opts);
      uc = solve_uc(sc, net, cfg.uc);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::Infeasible && err.kind() != ErrorKind::TargetUnreachable) throw;
      log("scenario " + slabel + " skipped: " + err.what());
      store.record_scenario_skip(slabel, err.what());
      outcome.scenario_skips[slabel] = err.what();
      store.write_manifest();
      continue;
    }

    // per-hour derived values shared by every case of this scenario
    std::vector<detail::HourDerived> derived(horizon);
    for (int i = 0; i < horizon; ++i) {
      auto& d = derived[i];
      const auto& h = uc[i];
      d.nsip = nsip(h, sc.portfolio);
      d.i_sys = system_inertia(h, sc.portfolio);
      d.sync_dispatch_r.assign(nr, 0.0);
      for (size_t u = 0; u < sc.portfolio.size(); ++u)
        if (h.units[u].on && sc.portfolio[u].synchronous())
          d.sync_dispatch_r[net.region_index(sc.portfolio[u].region)] += h.units[u].p_mw;
      d.cc.resize(nr);
      for (int r = 0; r < nr; ++r)
        d.cc[r] = try_identify_regional_cc(h, sc.portfolio, net.regions[r]);
      dc_tie_flows(h, sc.portfolio, net);  // load-flow pass; solver output must balance
    }

    const int block =
        std::clamp(horizon / std::max(1, 8 * cfg.workers), 1, 256);

    for (const auto* pc : scases) {
      const auto& c = *pc;
      const std::string label = case_label(c);
      const long already = store.completed(label);
      if (already >= horizon) continue;

      const int first = int(already);  // hour offset within horizon
      const int nblocks = (horizon - first + block - 1) / block;
      std::vector<detail::BlockResult> results(nblocks);

      std::vector<RegionId> meters;
      if (cfg.meter_all)
        meters = net.regions;
      else
        meters.push_back(c.meter);

      const LoadModel& lm =
          c.load_model == LoadModelKind::Static ? cfg.load_params_static : cfg.load_params_dynamic;
      const int loc = net.region_index(c.location);

      auto run_block = [&](int bi) {
        auto& res = results[bi];
        const int lo = first + bi * block;
        const int hi = std::min(horizon, lo + block);
        for (int i = lo; i < hi; ++i) {
          const int hour = b + i;
          std::optional<ContingencyCase> cc;
          if (c.contingency_kind == ContingencyKind::Variable) {
            cc = derived[i].cc[loc];
            if (!cc) {
              res.skips.push_back({hour, "no synchronous unit dispatched in " + c.location});
              continue;
            }
          } else {
            double size = cfg.fixed_cc_mw;
            if (derived[i].sync_dispatch_r[loc] <= 0) {
              res.skips.push_back({hour, "no synchronous dispatch to trip in " + c.location});
              continue;
            }
            if (size > derived[i].sync_dispatch_r[loc]) {
              size = derived[i].sync_dispatch_r[loc];
              ++res.capped;
            }
            cc = fixed_cc(c.location, size);
          }
          try {
            DynModel model =
                build_multi_area_model(uc[i], sc.portfolio, net, lm, cfg.roster, cfg.f0_hz);
            FrequencyTrace trace = simulate(model, *cc, cfg.sim);
            for (const auto& meter : meters) {
              ScanRecord rec;
              SensitivityCase metered = c;
              metered.meter = meter;
              rec.case_label = case_label(metered);
              rec.hour = hour;
              rec.meter = meter;
              rec.i_sys_mws = model.total_inertia_mws();
              rec.i_region_mws = model.regions[loc].inertia_mws;
              rec.p_cc_mw = cc->size_mw;
              rec.nsip = derived[i].nsip;
              rec.metrics = extract_metrics(trace, meter, cfg.metric);
              res.rows.push_back(record_row(rec));
            }
          } catch (const Error& err) {
            if (err.kind() == ErrorKind::SingularRegion || err.kind() == ErrorKind::NonFiniteState)
              res.skips.push_back({hour, err.what()});
            else
              throw;
          }
        }
        res.done = true;
      };

      // worker pool over blocks
      std::atomic<int> next{0};
      std::exception_ptr failure;
      std::mutex failure_mu;
      auto worker = [&] {
        for (;;) {
          int bi = next.fetch_add(1);
          if (bi >= nblocks) return;
          try {
            run_block(bi);
          } catch (...) {
            std::lock_guard<std::mutex> g(failure_mu);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      };
      std::vector<std::thread> threads;
      const int nworkers = std::min(cfg.workers, nblocks);
      threads.reserve(nworkers);
      for (int w = 0; w < nworkers; ++w) threads.emplace_back(worker);
      for (auto& t : threads) t.join();
      if (failure) std::rethrow_exception(failure);

      // flush in block order with periodic checkpoints
      std::vector<std::string> pending;
      long prefix = already;
      long since_checkpoint = 0;
      for (int bi = 0; bi < nblocks; ++bi) {
        auto& res = results[bi];
        for (auto& r : res.rows) pending.push_back(std::move(r));
        for (auto& [hour, reason] : res.skips) {
          store.record_case_hour_skip(label, hour, reason);
          ++outcome.skipped_case_hours;
        }
        outcome.cf_capped_hours += res.capped;
        const int lo = first + bi * block;
        const int hi = std::min(horizon, lo + block);
        prefix = hi;
        since_checkpoint += hi - lo;
        if (since_checkpoint >= cfg.checkpoint_every_hours || bi == nblocks - 1) {
          outcome.records_written += long(pending.size());
          store.append_rows(label, prefix, pending);
          store.write_manifest();
          pending.clear();
          since_checkpoint = 0;
        }
      }
      log("case " + label + ": complete");
    }
  }
  store.write_manifest();
  return outcome;
}

/// Completes a partially written store produced by the same config.
inline ScanOutcome resume_scan(const ScanConfig& cfg, std::ostream* progress = nullptr) {
  return run_scan(cfg, /*resume=*/true, progress);
}

}  // namespace gridfreq
