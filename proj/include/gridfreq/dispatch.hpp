#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridfreq/csv.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/network.hpp"
#include "gridfreq/scenario.hpp"

namespace gridfreq {

enum class InertiaConstraintMode { Off, Regional };

struct UcOptions {
  /// < 0 means "use the scenario's reserve_fraction".
  double reserve_fraction = -1.0;
  InertiaConstraintMode inertia_constraint = InertiaConstraintMode::Off;
  double f0_hz = 50.0;
  double rocof_crit_hz_per_s = 0.5;
  int hour_begin = 0;
  int hour_end = -1;  // -1: run to the end of the traces
};

struct UnitState {
  bool on = false;
  double p_mw = 0;
};

enum class BindReason { MinDown, MinUp, MinStable, Ramp, LineLimit, Inertia, Reserve };

inline const char* to_string(BindReason r) {
  switch (r) {
    case BindReason::MinDown: return "min-down";
    case BindReason::MinUp: return "min-up";
    case BindReason::MinStable: return "min-stable";
    case BindReason::Ramp: return "ramp";
    case BindReason::LineLimit: return "line-limit";
    case BindReason::Inertia: return "inertia";
    case BindReason::Reserve: return "reserve";
  }
  return "?";
}

/// Explains why a cheaper unit was left offline in this hour.
struct BindingTag {
  std::string gen_id;
  BindReason reason = BindReason::MinStable;
};

struct RegionHour {
  double net_demand_mw = 0;
  double reserve_mw = 0;       // committed synchronous headroom (SynCon excluded)
  double inertia_mws = 0;      // committed H*S, SynCon included
  double curtailed_ns_mw = 0;  // available minus dispatched NS-RES
  double ns_available_mw = 0;
};

struct UcHour {
  int hour = 0;
  std::vector<UnitState> units;  // portfolio order
  std::map<RegionId, RegionHour> regions;
  std::vector<double> tie_flows_mw;  // network line order, from->to positive
  std::vector<BindingTag> binding;
};

// ---------------------------------------------------------------------------
// inertia arithmetic

/// Minimum regional inertia that keeps the initial frequency gradient after
/// losing p_cc within the critical value: f0 * p_cc / (2 * |rocof_crit|).
inline double min_inertia_requirement(double p_cc_mw, double f0_hz, double rocof_crit_hz_per_s) {
  if (p_cc_mw <= 0 || f0_hz <= 0 || rocof_crit_hz_per_s <= 0)
    raise(ErrorKind::NonPositiveInput, "min_inertia_requirement needs positive arguments");
  return f0_hz * p_cc_mw / (2.0 * rocof_crit_hz_per_s);
}

inline double system_inertia(const UcHour& uc, const Portfolio& portfolio) {
  double s = 0;
  for (size_t i = 0; i < portfolio.size(); ++i)
    if (uc.units[i].on && portfolio[i].synchronous()) s += portfolio[i].inertia_mws();
  return s;
}

inline double regional_inertia(const UcHour& uc, const Portfolio& portfolio, const RegionId& region) {
  double s = 0;
  for (size_t i = 0; i < portfolio.size(); ++i)
    if (uc.units[i].on && portfolio[i].synchronous() && portfolio[i].region == region)
      s += portfolio[i].inertia_mws();
  return s;
}

/// Net regional injections implied by a UC hour, then tie flows from them.
inline TieFlowResult dc_tie_flows(const UcHour& uc, const Portfolio& portfolio, const Network& net) {
  std::vector<double> inj(net.regions.size(), 0.0);
  for (size_t i = 0; i < portfolio.size(); ++i)
    if (uc.units[i].on) inj[net.region_index(portfolio[i].region)] += uc.units[i].p_mw;
  for (size_t r = 0; r < net.regions.size(); ++r) {
    auto it = uc.regions.find(net.regions[r]);
    if (it != uc.regions.end()) inj[r] -= it->second.net_demand_mw;
  }
  return solve_tie_flows(net, inj);
}

// ---------------------------------------------------------------------------
// solver

namespace detail {

constexpr double kEps = 1e-6;

struct FillOutcome {
  enum class Status { Ok, NeedCapacity, Overgeneration, LineStuck } status = Status::Ok;
  enum class Reason { Energy, Reserve, Line } reason = Reason::Energy;
  std::vector<double> p;
  std::vector<double> flows;
  double var_cost = 0;
  std::vector<char> region_mask;  // regions implicated in a failure
  double shortfall_mw = 0;
};

/// Per-hour unit commitment and economic dispatch on a (tree) network.
///
/// The hourly pipeline is a merit-order constructor with repair passes:
///   1. forced / lookahead-held commitments, then SRMC-order commitment
///      until capacity and reserve headroom cover every region,
///   2. a min-cost transport fill respecting unit bounds, regional reserve
///      headroom caps and tie-line limits (exact on trees),
///   3. regional inertia repair by fixed-point iteration over the credible
///      contingency (SynCon first, then cheapest synchronous units at
///      minimum stable output),
///   4. a decommit/swap polish that undoes uneconomic commitments.
/// Feasibility is defined by validate_uc; optimality is best effort.
class UcSolver {
 public:
  UcSolver(const Scenario& sc, const Network& net, const UcOptions& opt)
      : sc_(sc), net_(net), opt_(opt), traces_(*sc.traces) {
    check_network(net);
    check_portfolio(sc.portfolio);
    n_units_ = sc.portfolio.size();
    n_regions_ = net.regions.size();
    reserve_frac_ = opt.reserve_fraction >= 0 ? opt.reserve_fraction : sc.reserve_fraction;

    for (const auto& r : net.regions)
      if (!traces_.has_region(r)) raise(ErrorKind::MissingRegion, "traces lack region " + r);

    region_of_.resize(n_units_);
    for (size_t i = 0; i < n_units_; ++i) {
      const auto& g = sc_.portfolio[i];
      if (!net.has_region(g.region))
        raise(ErrorKind::MissingRegion, "unit " + g.id + " sits in unknown region " + g.region);
      region_of_[i] = net.region_index(g.region);
      if (g.synchronous() && g.provides_energy())
        sync_order_.push_back(int(i));
      else if (!g.synchronous())
        ns_order_.push_back(int(i));
      else
        syncon_order_.push_back(int(i));
    }
    auto by_cost = [this](int a, int b) {
      const auto &ga = sc_.portfolio[a], &gb = sc_.portfolio[b];
      if (ga.srmc != gb.srmc) return ga.srmc < gb.srmc;
      return ga.id < gb.id;
    };
    std::sort(sync_order_.begin(), sync_order_.end(), by_cost);
    std::sort(ns_order_.begin(), ns_order_.end(),
              [this](int a, int b) { return sc_.portfolio[a].id < sc_.portfolio[b].id; });
    std::sort(syncon_order_.begin(), syncon_order_.end(),
              [this](int a, int b) { return sc_.portfolio[a].id < sc_.portfolio[b].id; });

    cum_cap_before_.assign(n_units_, 0.0);
    double cum = 0;
    for (int u : sync_order_) {
      cum_cap_before_[u] = cum;
      cum += sc_.portfolio[u].capacity_mw;
    }
  }

  std::vector<UcHour> run() {
    int begin = opt_.hour_begin;
    int end = opt_.hour_end < 0 ? int(traces_.hours) : opt_.hour_end;
    if (begin < 0 || end > int(traces_.hours) || begin >= end)
      raise(ErrorKind::EmptyHorizon, "horizon [" + std::to_string(begin) + "," +
                                         std::to_string(end) + ") not covered by traces");

    time_on_.assign(n_units_, 0);
    time_off_.assign(n_units_, 1 << 20);  // long-off: everything may start
    p_prev_.assign(n_units_, 0.0);
    on_prev_.assign(n_units_, 0);

    precompute_capacity_need(begin, end);

    std::vector<UcHour> out;
    out.reserve(end - begin);
    for (int h = begin; h < end; ++h) out.push_back(solve_hour(h));
    return out;
  }

 private:
  // --- static context ---
  const Scenario& sc_;
  const Network& net_;
  const UcOptions& opt_;
  const HourlyTraceSet& traces_;
  size_t n_units_ = 0, n_regions_ = 0;
  double reserve_frac_ = 0.1;
  std::vector<int> region_of_;
  std::vector<int> sync_order_;    // synchronous energy units by (srmc, id)
  std::vector<int> ns_order_;      // converter-interfaced units by id
  std::vector<int> syncon_order_;  // condensers by id
  std::vector<double> cum_cap_before_;
  std::vector<double> cap_need_;  // per hour offset, for the lookahead hold

  // --- inter-hour state ---
  std::vector<int> time_on_, time_off_;
  std::vector<double> p_prev_;
  std::vector<char> on_prev_;

  // --- per-hour scratch ---
  std::vector<char> committed_, pinned_, held_;
  std::vector<double> lo_, hi_, ns_avail_;
  std::vector<double> demand_r_, res_req_r_, sync_cap_r_;
  std::map<std::string, BindReason> excuses_;
  int hour_ = 0;

  void precompute_capacity_need(int begin, int end) {
    cap_need_.assign(end, 0.0);
    for (int h = begin; h < end; ++h) {
      double dem = 0, ns = 0;
      for (size_t r = 0; r < n_regions_; ++r) {
        const auto& tr = traces_.at(net_.regions[r]);
        dem += tr.demand_mw[h];
      }
      for (int u : ns_order_) ns += avail_at(u, h);
      cap_need_[h] = std::max(0.0, dem - ns) + reserve_frac_ * dem;
    }
  }

  double avail_at(int u, int h) const {
    const auto& g = sc_.portfolio[u];
    const auto& tr = traces_.at(g.region);
    double cf = (g.tech == Tech::Wind) ? tr.wind_cf[h] : tr.solar_cf[h];
    return g.capacity_mw * cf;
  }

  bool may_start(int u) const { return on_prev_[u] || time_off_[u] >= sc_.portfolio[u].min_down_h; }
  bool must_stay_on(int u) const { return on_prev_[u] && time_on_[u] < sc_.portfolio[u].min_up_h; }

  /// Would this unit sit inside the SRMC merit prefix needed at hour h?
  bool wanted_at(int u, int h) const {
    return h < int(cap_need_.size()) && cum_cap_before_[u] < cap_need_[h];
  }

  void set_bounds(int u) {
    const auto& g = sc_.portfolio[u];
    if (!g.provides_energy()) {
      lo_[u] = hi_[u] = 0;
      return;
    }
    if (on_prev_[u]) {
      lo_[u] = std::max(g.min_mw(), p_prev_[u] - g.ramp_mw_per_h);
      hi_[u] = std::min(g.capacity_mw, p_prev_[u] + g.ramp_mw_per_h);
    } else {
      lo_[u] = g.min_mw();
      hi_[u] = std::min(g.capacity_mw, g.min_mw() + g.ramp_mw_per_h);
    }
  }

  void commit(int u, bool pin) {
    committed_[u] = 1;
    if (pin) pinned_[u] = 1;
    set_bounds(u);
    const auto& g = sc_.portfolio[u];
    if (g.synchronous() && g.provides_energy()) sync_cap_r_[region_of_[u]] += g.capacity_mw;
  }

  void decommit(int u) {
    committed_[u] = 0;
    pinned_[u] = 0;
    held_[u] = 0;
    const auto& g = sc_.portfolio[u];
    if (g.synchronous() && g.provides_energy()) sync_cap_r_[region_of_[u]] -= g.capacity_mw;
  }

  // ----- transport fill: min-cost dispatch of the committed set -----

  FillOutcome fill() const {
    FillOutcome out;
    out.p.assign(n_units_, 0.0);
    out.region_mask.assign(n_regions_, 0);

    std::vector<double> sync_out(n_regions_, 0.0);  // dispatched sync energy per region
    std::vector<double> sync_cap_eff(n_regions_, 0.0);
    for (size_t r = 0; r < n_regions_; ++r) sync_cap_eff[r] = sync_cap_r_[r] - res_req_r_[r];

    double supply = 0, demand_total = 0;
    for (size_t r = 0; r < n_regions_; ++r) demand_total += demand_r_[r];

    for (int u : sync_order_)
      if (committed_[u]) {
        out.p[u] = lo_[u];
        sync_out[region_of_[u]] += lo_[u];
        supply += lo_[u];
      }

    // reserve headroom must survive even at minimum output
    for (size_t r = 0; r < n_regions_; ++r)
      if (sync_out[r] > sync_cap_eff[r] + kEps) {
        out.status = FillOutcome::Status::NeedCapacity;
        out.reason = FillOutcome::Reason::Reserve;
        out.region_mask[r] = 1;
        out.shortfall_mw = sync_out[r] - sync_cap_eff[r];
        return out;
      }

    if (supply > demand_total + kEps) {
      out.status = FillOutcome::Status::Overgeneration;
      std::fill(out.region_mask.begin(), out.region_mask.end(), 1);
      out.shortfall_mw = supply - demand_total;
      return out;
    }

    // merit fill, copper plate
    double remaining = demand_total - supply;
    auto raise_unit = [&](int u, double amount) {
      out.p[u] += amount;
      if (sc_.portfolio[u].synchronous()) sync_out[region_of_[u]] += amount;
    };
    auto headroom = [&](int u) {
      double room = (sc_.portfolio[u].synchronous() ? hi_[u] : ns_avail_[u]) - out.p[u];
      if (sc_.portfolio[u].synchronous())
        room = std::min(room, sync_cap_eff[region_of_[u]] - sync_out[region_of_[u]]);
      return std::max(0.0, room);
    };
    for (int u : ns_order_) {
      if (remaining <= kEps) break;
      double take = std::min(ns_avail_[u] - out.p[u], remaining);
      if (take > 0) {
        raise_unit(u, take);
        remaining -= take;
      }
    }
    for (int u : sync_order_) {
      if (remaining <= kEps) break;
      if (!committed_[u]) continue;
      double take = std::min(headroom(u), remaining);
      if (take > 0) {
        raise_unit(u, take);
        remaining -= take;
      }
    }
    if (remaining > kEps) {
      out.status = FillOutcome::Status::NeedCapacity;
      out.reason = FillOutcome::Reason::Energy;
      std::fill(out.region_mask.begin(), out.region_mask.end(), 1);
      out.shortfall_mw = remaining;
      return out;
    }

    // tie-line repair: move generation across violated cuts (tree networks)
    const bool tree = is_tree(net_);
    const int max_pass = 4 * std::max<int>(1, int(net_.lines.size()));
    for (int pass = 0; pass <= max_pass; ++pass) {
      std::vector<double> inj(n_regions_, 0.0);
      for (size_t u = 0; u < n_units_; ++u) inj[region_of_[u]] += out.p[u];
      for (size_t r = 0; r < n_regions_; ++r) inj[r] -= demand_r_[r];

      out.flows = tree ? tree_flows(net_, inj) : dc_flows(net_, inj);
      int worst = -1;
      double worst_excess = kEps;
      for (size_t l = 0; l < net_.lines.size(); ++l) {
        double ex = std::abs(out.flows[l]) - net_.lines[l].limit_mw;
        if (ex > worst_excess) {
          worst_excess = ex;
          worst = int(l);
        }
      }
      if (worst < 0) break;
      if (!tree || pass == max_pass) {
        out.status = FillOutcome::Status::LineStuck;
        out.reason = FillOutcome::Reason::Line;
        return out;
      }

      // split regions into the exporting and importing side of the cut
      std::vector<char> imp_side = side_of(worst, out.flows[worst] > 0);
      double x = worst_excess;

      // raise cheapest head in the importing side
      std::vector<std::pair<int, double>> raises;
      double can_raise = 0;
      for (int u : ns_order_)
        if (imp_side[region_of_[u]]) {
          double room = ns_avail_[u] - out.p[u];
          if (room > 0) {
            raises.push_back({u, room});
            can_raise += room;
          }
          if (can_raise >= x) break;
        }
      if (can_raise < x)
        for (int u : sync_order_) {
          if (!committed_[u] || !imp_side[region_of_[u]]) continue;
          double room = headroom(u);
          if (room > 0) {
            raises.push_back({u, room});
            can_raise += room;
          }
          if (can_raise >= x) break;
        }
      if (can_raise + kEps < x) {
        out.status = FillOutcome::Status::NeedCapacity;
        out.reason = FillOutcome::Reason::Line;
        out.region_mask = imp_side;
        out.shortfall_mw = x - can_raise;
        return out;
      }

      // lower priciest dispatch on the exporting side; curtail NS last
      std::vector<std::pair<int, double>> lowers;
      double can_lower = 0;
      for (auto it = sync_order_.rbegin(); it != sync_order_.rend(); ++it) {
        int u = *it;
        if (!committed_[u] || imp_side[region_of_[u]]) continue;
        double room = out.p[u] - lo_[u];
        if (room > 0) {
          lowers.push_back({u, room});
          can_lower += room;
        }
        if (can_lower >= x) break;
      }
      if (can_lower < x)
        for (int u : ns_order_) {
          if (imp_side[region_of_[u]]) continue;
          double room = out.p[u];
          if (room > 0) {
            lowers.push_back({u, room});
            can_lower += room;
          }
          if (can_lower >= x) break;
        }
      if (can_lower + kEps < x) {
        out.status = FillOutcome::Status::Overgeneration;
        out.reason = FillOutcome::Reason::Line;
        for (size_t r = 0; r < n_regions_; ++r) out.region_mask[r] = !imp_side[r];
        out.shortfall_mw = x - can_lower;
        return out;
      }

      double left = x;
      for (auto [u, room] : raises) {
        double d = std::min(room, left);
        raise_unit(u, d);
        left -= d;
        if (left <= 0) break;
      }
      left = x;
      for (auto [u, room] : lowers) {
        double d = std::min(room, left);
        out.p[u] -= d;
        if (sc_.portfolio[u].synchronous()) sync_out[region_of_[u]] -= d;
        left -= d;
        if (left <= 0) break;
      }
    }

    out.var_cost = 0;
    for (int u : sync_order_) out.var_cost += sc_.portfolio[u].srmc * out.p[u];
    out.status = FillOutcome::Status::Ok;
    return out;
  }

  /// Regions on the importing side of line l (the side the flow points into).
  std::vector<char> side_of(int line, bool forward) const {
    const auto& l = net_.lines[line];
    int start = net_.region_index(forward ? l.to : l.from);
    std::vector<std::vector<std::pair<int, int>>> adj(n_regions_);
    for (size_t e = 0; e < net_.lines.size(); ++e) {
      int a = net_.region_index(net_.lines[e].from), b = net_.region_index(net_.lines[e].to);
      adj[a].push_back({b, int(e)});
      adj[b].push_back({a, int(e)});
    }
    std::vector<char> side(n_regions_, 0);
    std::vector<int> stack{start};
    side[start] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, e] : adj[v])
        if (e != line && !side[w]) {
          side[w] = 1;
          stack.push_back(w);
        }
    }
    return side;
  }

  // ----- hour pipeline -----

  UcHour solve_hour(int h) {
    hour_ = h;
    committed_.assign(n_units_, 0);
    pinned_.assign(n_units_, 0);
    held_.assign(n_units_, 0);
    lo_.assign(n_units_, 0);
    hi_.assign(n_units_, 0);
    ns_avail_.assign(n_units_, 0);
    demand_r_.assign(n_regions_, 0);
    res_req_r_.assign(n_regions_, 0);
    sync_cap_r_.assign(n_regions_, 0);
    excuses_.clear();

    for (size_t r = 0; r < n_regions_; ++r) {
      demand_r_[r] = traces_.at(net_.regions[r]).demand_mw[h];
      res_req_r_[r] = reserve_frac_ * demand_r_[r];
    }
    for (int u : ns_order_) ns_avail_[u] = avail_at(u, h);

    // forced and lookahead-held commitments
    for (size_t u = 0; u < n_units_; ++u) {
      if (must_stay_on(int(u))) {
        commit(int(u), /*pin=*/true);
      } else if (on_prev_[u] && sc_.portfolio[u].provides_energy()) {
        for (int ahead = 1; ahead <= sc_.portfolio[u].min_down_h; ++ahead) {
          if (wanted_at(int(u), h + ahead)) {
            commit(int(u), /*pin=*/false);
            held_[u] = 1;
            break;
          }
        }
      }
    }

    // merit commitment until system capacity covers demand; reserve and line
    // shortfalls surface through fill() diagnoses below
    {
      double ns_total = 0;
      for (int u : ns_order_) ns_total += ns_avail_[u];
      double dem_total = 0;
      for (double d : demand_r_) dem_total += d;
      double cap = ns_total;
      for (int u : sync_order_)
        if (committed_[u]) cap += hi_[u];
      for (int u : sync_order_) {
        if (cap >= dem_total) break;
        if (committed_[u]) continue;
        if (!may_start(u)) {
          excuses_[sc_.portfolio[u].id] = BindReason::MinDown;
          continue;
        }
        commit(u, false);
        cap += hi_[u];
      }
    }

    // repair loop: commitment adjustments driven by fill diagnoses
    FillOutcome f;
    const int max_repair = int(3 * n_units_ + 20);
    int iter = 0;
    for (;; ++iter) {
      if (iter > max_repair) infeasible("repair loop did not converge");
      f = fill();
      using S = FillOutcome::Status;
      if (f.status == S::Ok) break;
      if (f.status == S::LineStuck) infeasible("tie-line limits unsatisfiable");
      if (f.status == S::NeedCapacity) {
        int u = next_committable(f.region_mask);
        if (u < 0)
          infeasible(f.reason == FillOutcome::Reason::Reserve ? "reserve requirement unsatisfiable"
                                                              : "insufficient committable capacity");
        commit(u, /*pin=*/true);
      } else {  // Overgeneration
        int u = best_droppable(f.region_mask);
        if (u < 0) infeasible("minimum stable generation exceeds demand");
        excuses_[sc_.portfolio[u].id] = BindReason::MinStable;
        decommit(u);
      }
    }

    // regional inertia constraint: fixed point over the regional CC
    if (opt_.inertia_constraint == InertiaConstraintMode::Regional) {
      for (int round = 0;; ++round) {
        if (round >= 10) infeasible("inertia constraint fixed point did not converge");
        bool changed = false;
        for (size_t r = 0; r < n_regions_; ++r) {
          double cc = 0;
          for (int u : sync_order_)
            if (committed_[u] && region_of_[u] == int(r)) cc = std::max(cc, f.p[u]);
          if (cc <= 0) continue;
          double need = min_inertia_requirement(cc, opt_.f0_hz, opt_.rocof_crit_hz_per_s);
          if (committed_inertia(int(r)) >= need - kEps) continue;
          int u = next_inertia_unit(int(r));
          if (u < 0) infeasible("regional inertia unsatisfiable in " + net_.regions[r]);
          commit(u, /*pin=*/true);
          changed = true;
        }
        if (!changed) break;
        // re-dispatch, resolving any overgeneration the new mins created
        for (;; ++iter) {
          if (iter > max_repair + 200) infeasible("inertia repair did not converge");
          f = fill();
          if (f.status == FillOutcome::Status::Ok) break;
          if (f.status == FillOutcome::Status::Overgeneration) {
            int u = best_droppable(f.region_mask);
            if (u < 0) infeasible("minimum stable generation exceeds demand (inertia repair)");
            excuses_[sc_.portfolio[u].id] = BindReason::MinStable;
            decommit(u);
          } else if (f.status == FillOutcome::Status::NeedCapacity) {
            int u = next_committable(f.region_mask);
            if (u < 0) infeasible("capacity shortfall during inertia repair");
            commit(u, /*pin=*/true);
          } else {
            infeasible("tie-line limits unsatisfiable under inertia constraint");
          }
        }
      }
    }

    polish(f);
    return finalize(f);
  }

  double committed_inertia(int r) const {
    double s = 0;
    for (size_t u = 0; u < n_units_; ++u)
      if (committed_[u] && region_of_[u] == r && sc_.portfolio[u].synchronous())
        s += sc_.portfolio[u].inertia_mws();
    return s;
  }

  int next_committable(const std::vector<char>& mask) {
    for (int u : sync_order_) {
      if (committed_[u] || !mask[region_of_[u]]) continue;
      if (!may_start(u)) {
        excuses_[sc_.portfolio[u].id] = BindReason::MinDown;
        continue;
      }
      return u;
    }
    return -1;
  }

  /// Overgeneration victim: largest forced minimum first, SRMC breaking ties.
  /// Lookahead-held units are spared unless nothing else can move.
  int best_droppable(const std::vector<char>& mask) const {
    int best = -1;
    for (int spare_held = 1; spare_held >= 0 && best < 0; --spare_held) {
      for (size_t u = 0; u < n_units_; ++u) {
        if (!committed_[u] || pinned_[u] || !mask[region_of_[u]]) continue;
        if (spare_held && held_[u]) continue;
        if (!sc_.portfolio[u].provides_energy()) continue;
        if (best < 0) {
          best = int(u);
          continue;
        }
        const auto &gu = sc_.portfolio[u], &gb = sc_.portfolio[best];
        if (lo_[u] != lo_[best] ? lo_[u] > lo_[best]
                                : (gu.srmc != gb.srmc ? gu.srmc > gb.srmc : gu.id < gb.id))
          best = int(u);
      }
    }
    return best;
  }

  int next_inertia_unit(int r) {
    for (int u : syncon_order_)
      if (!committed_[u] && region_of_[u] == r && may_start(u)) return u;
    for (int u : sync_order_) {
      if (committed_[u] || region_of_[u] != r) continue;
      if (!may_start(u)) {
        excuses_[sc_.portfolio[u].id] = BindReason::MinDown;
        continue;
      }
      return u;
    }
    return -1;
  }

  double hour_cost(const FillOutcome& f) const {
    double c = f.var_cost;
    for (size_t u = 0; u < n_units_; ++u) {
      const auto& g = sc_.portfolio[u];
      if (committed_[u]) {
        c += g.fixed_cost;
        if (!on_prev_[u]) c += g.startup_cost;
      } else if (on_prev_[u]) {
        c += g.shutdown_cost;
      }
    }
    return c;
  }

  bool inertia_ok(const FillOutcome& f) const {
    if (opt_.inertia_constraint != InertiaConstraintMode::Regional) return true;
    for (size_t r = 0; r < n_regions_; ++r) {
      double cc = 0;
      for (int u : sync_order_)
        if (committed_[u] && region_of_[u] == int(r)) cc = std::max(cc, f.p[u]);
      if (cc <= 0) continue;
      if (committed_inertia(int(r)) <
          min_inertia_requirement(cc, opt_.f0_hz, opt_.rocof_crit_hz_per_s) - kEps)
        return false;
    }
    return true;
  }

  /// Drop or swap uneconomic commitments while staying feasible.
  void polish(FillOutcome& f) {
    double cost = hour_cost(f);
    for (int round = 0; round < 4; ++round) {
      bool improved = false;

      // decommit pass, priciest first
      for (auto it = sync_order_.rbegin(); it != sync_order_.rend(); ++it) {
        int u = *it;
        if (!committed_[u] || pinned_[u] || held_[u]) continue;
        decommit(u);
        FillOutcome g = fill();
        if (g.status == FillOutcome::Status::Ok && inertia_ok(g)) {
          double c = hour_cost(g);
          if (c < cost - 1e-7) {
            excuses_[sc_.portfolio[u].id] = BindReason::MinStable;
            f = std::move(g);
            cost = c;
            improved = true;
            continue;
          }
        }
        commit(u, false);  // revert (pin/held flags were clear)
      }

      // swap pass: units stuck at a binding minimum vs offline alternatives
      for (int u : sync_order_) {
        if (!committed_[u] || pinned_[u] || held_[u]) continue;
        if (lo_[u] <= kEps || f.p[u] > lo_[u] + kEps) continue;
        for (int v : sync_order_) {
          if (committed_[v] || region_of_[v] != region_of_[u]) continue;
          if (!may_start(v)) continue;
          decommit(u);
          commit(v, false);
          FillOutcome g = fill();
          if (g.status == FillOutcome::Status::Ok && inertia_ok(g)) {
            double c = hour_cost(g);
            if (c < cost - 1e-7) {
              excuses_[sc_.portfolio[u].id] = BindReason::MinStable;
              f = std::move(g);
              cost = c;
              improved = true;
              break;
            }
          }
          decommit(v);
          commit(u, false);
        }
      }

      // commit any cheaper offline unit that pays for itself
      for (int u : sync_order_) {
        if (committed_[u]) continue;
        if (!may_start(u)) continue;
        commit(u, false);
        FillOutcome g = fill();
        if (g.status == FillOutcome::Status::Ok && inertia_ok(g)) {
          double c = hour_cost(g);
          if (c < cost - 1e-7) {
            f = std::move(g);
            cost = c;
            improved = true;
            continue;
          }
        }
        decommit(u);
      }

      if (!improved) break;
    }
  }

  UcHour finalize(const FillOutcome& f) {
    UcHour uc;
    uc.hour = hour_;
    uc.units.resize(n_units_);
    for (size_t u = 0; u < n_units_; ++u) {
      // converter units count as "on" whenever they have fuel available
      bool on = sc_.portfolio[u].synchronous() ? bool(committed_[u]) : ns_avail_[u] > 0;
      uc.units[u].on = on;
      uc.units[u].p_mw = f.p[u];
    }
    uc.tie_flows_mw = f.flows;

    for (size_t r = 0; r < n_regions_; ++r) {
      RegionHour rh;
      rh.net_demand_mw = demand_r_[r];
      for (size_t u = 0; u < n_units_; ++u) {
        const auto& g = sc_.portfolio[u];
        if (region_of_[u] != int(r)) continue;
        if (uc.units[u].on && g.synchronous()) {
          rh.inertia_mws += g.inertia_mws();
          if (g.provides_energy()) rh.reserve_mw += g.capacity_mw - f.p[u];
        }
        if (!g.synchronous()) {
          rh.ns_available_mw += ns_avail_[u];
          rh.curtailed_ns_mw += ns_avail_[u] - f.p[u];
        }
      }
      uc.regions[net_.regions[r]] = rh;
    }

    for (const auto& [id, reason] : excuses_) uc.binding.push_back({id, reason});

    // advance inter-hour state
    for (size_t u = 0; u < n_units_; ++u) {
      bool on = committed_[u];  // NS units carry no inter-hour constraints
      if (!sc_.portfolio[u].synchronous()) {
        p_prev_[u] = f.p[u];
        continue;
      }
      if (on) {
        time_on_[u] = on_prev_[u] ? time_on_[u] + 1 : 1;
        time_off_[u] = 0;
      } else {
        time_off_[u] = on_prev_[u] ? 1 : std::min(time_off_[u] + 1, 1 << 20);
        time_on_[u] = 0;
      }
      on_prev_[u] = on;
      p_prev_[u] = f.p[u];
    }
    return uc;
  }

  [[noreturn]] void infeasible(const std::string& what) const {
    raise(ErrorKind::Infeasible, "hour " + std::to_string(hour_) + ": " + what);
  }
};

}  // namespace detail

/// Hourly unit commitment / economic dispatch over the option horizon.
inline std::vector<UcHour> solve_uc(const Scenario& sc, const Network& net, const UcOptions& opt) {
  if (!sc.traces) raise(ErrorKind::ConfigError, "scenario has no traces");
  detail::UcSolver solver(sc, net, opt);
  return solver.run();
}

// ---------------------------------------------------------------------------
// audit

struct Violation {
  int hour = 0;
  std::string kind;
  std::string what;
};

struct ViolationReport {
  std::vector<Violation> items;
  bool empty() const { return items.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& v : items)
      s += "hour " + std::to_string(v.hour) + " " + v.kind + ": " + v.what + "\n";
    return s;
  }
};

/// Re-checks every per-hour invariant and inter-hour constraint from scratch.
/// Independent of the solver: violations are data, not errors.
inline ViolationReport validate_uc(const std::vector<UcHour>& result, const Scenario& sc,
                                   const Network& net, const UcOptions& opt) {
  ViolationReport rep;
  auto add = [&](int hour, const std::string& kind, const std::string& what) {
    rep.items.push_back({hour, kind, what});
  };
  if (result.empty()) return rep;
  const auto& portfolio = sc.portfolio;
  const auto& traces = *sc.traces;
  const double frac = opt.reserve_fraction >= 0 ? opt.reserve_fraction : sc.reserve_fraction;
  const double tol = 1e-5;

  for (size_t i = 0; i < result.size(); ++i) {
    const auto& uc = result[i];
    const int h = uc.hour;
    if (uc.units.size() != portfolio.size()) {
      add(h, "ShapeMismatch", "unit vector size");
      continue;
    }

    std::vector<double> gen_r(net.regions.size(), 0.0);
    std::map<RegionId, double> ns_avail_r, ns_disp_r;

    for (size_t u = 0; u < portfolio.size(); ++u) {
      const auto& g = portfolio[u];
      const auto& st = uc.units[u];
      if (!st.on && st.p_mw != 0)
        add(h, "OffUnitDispatch", g.id + " off but p=" + std::to_string(st.p_mw));
      if (!g.provides_energy() && st.p_mw != 0) add(h, "SynConDispatch", g.id);
      if (st.on && g.synchronous() && g.provides_energy()) {
        if (st.p_mw < g.min_mw() - tol || st.p_mw > g.capacity_mw + tol)
          add(h, "CapacityViolation",
              g.id + " p=" + std::to_string(st.p_mw) + " outside [" + std::to_string(g.min_mw()) +
                  "," + std::to_string(g.capacity_mw) + "]");
      }
      if (!g.synchronous()) {
        const auto& tr = traces.at(g.region);
        double avail = g.capacity_mw * ((g.tech == Tech::Wind) ? tr.wind_cf[h] : tr.solar_cf[h]);
        if (st.p_mw < -tol || st.p_mw > avail + tol)
          add(h, "NsAvailabilityViolation", g.id + " p=" + std::to_string(st.p_mw) +
                                                " avail=" + std::to_string(avail));
        ns_avail_r[g.region] += avail;
        ns_disp_r[g.region] += st.p_mw;
      }
      if (st.on) gen_r[net.region_index(g.region)] += st.p_mw;
    }

    if (uc.tie_flows_mw.size() != net.lines.size()) {
      add(h, "ShapeMismatch", "tie flow vector size");
      continue;
    }
    for (size_t l = 0; l < net.lines.size(); ++l)
      if (std::abs(uc.tie_flows_mw[l]) > net.lines[l].limit_mw + tol)
        add(h, "FlowLimitViolation", net.lines[l].from + "-" + net.lines[l].to + " " +
                                         std::to_string(uc.tie_flows_mw[l]));

    for (size_t r = 0; r < net.regions.size(); ++r) {
      const auto& region = net.regions[r];
      auto it = uc.regions.find(region);
      if (it == uc.regions.end()) {
        add(h, "ShapeMismatch", "missing region " + region);
        continue;
      }
      const auto& rh = it->second;
      double dem = traces.at(region).demand_mw[h];
      if (std::abs(rh.net_demand_mw - dem) > tol * std::max(1.0, dem))
        add(h, "NetDemandMismatch", region);

      double net_import = 0;
      for (size_t l = 0; l < net.lines.size(); ++l) {
        if (net.lines[l].to == region) net_import += uc.tie_flows_mw[l];
        if (net.lines[l].from == region) net_import -= uc.tie_flows_mw[l];
      }
      double imbalance = gen_r[r] + net_import - rh.net_demand_mw;
      if (std::abs(imbalance) > 1e-6 * std::max(1.0, rh.net_demand_mw))
        add(h, "PowerBalanceViolation", region + " off by " + std::to_string(imbalance));

      double reserve = 0, inertia = 0;
      for (size_t u = 0; u < portfolio.size(); ++u) {
        const auto& g = portfolio[u];
        if (g.region != region || !uc.units[u].on || !g.synchronous()) continue;
        inertia += g.inertia_mws();
        if (g.provides_energy()) reserve += g.capacity_mw - uc.units[u].p_mw;
      }
      if (std::abs(reserve - rh.reserve_mw) > tol * std::max(1.0, reserve))
        add(h, "ReserveFieldMismatch", region);
      if (std::abs(inertia - rh.inertia_mws) > tol * std::max(1.0, inertia))
        add(h, "InertiaFieldMismatch", region);
      if (reserve < frac * dem - tol * std::max(1.0, dem))
        add(h, "ReserveRequirementViolation",
            region + " reserve " + std::to_string(reserve) + " < " + std::to_string(frac * dem));
      double curt = ns_avail_r[region] - ns_disp_r[region];
      if (std::abs(curt - rh.curtailed_ns_mw) > tol * std::max(1.0, std::abs(curt)))
        add(h, "CurtailmentMismatch", region);

      if (opt.inertia_constraint == InertiaConstraintMode::Regional) {
        double cc = 0;
        for (size_t u = 0; u < portfolio.size(); ++u)
          if (portfolio[u].region == region && uc.units[u].on && portfolio[u].synchronous())
            cc = std::max(cc, uc.units[u].p_mw);
        if (cc > 0) {
          double need = min_inertia_requirement(cc, opt.f0_hz, opt.rocof_crit_hz_per_s);
          if (inertia < need - tol * std::max(1.0, need))
            add(h, "InertiaRequirementViolation",
                region + " " + std::to_string(inertia) + " < " + std::to_string(need));
        }
      }
    }

    // merit order audit (regional, excused by binding tags)
    for (const auto& region : net.regions) {
      for (size_t c = 0; c < portfolio.size(); ++c) {
        const auto& gc = portfolio[c];
        if (gc.region != region || !gc.synchronous() || !gc.provides_energy()) continue;
        if (!uc.units[c].on || uc.units[c].p_mw <= gc.min_mw() + tol) continue;
        for (size_t o = 0; o < portfolio.size(); ++o) {
          const auto& go = portfolio[o];
          if (go.region != region || !go.synchronous() || !go.provides_energy()) continue;
          if (uc.units[o].on || go.srmc >= gc.srmc) continue;
          bool excused = false;
          for (const auto& tag : uc.binding)
            if (tag.gen_id == go.id) excused = true;
          if (!excused)
            add(h, "MeritOrderViolation", go.id + " offline while " + gc.id + " runs above minimum");
        }
      }
    }

    // inter-hour constraints
    const UcHour* prev = i > 0 ? &result[i - 1] : nullptr;
    for (size_t u = 0; u < portfolio.size(); ++u) {
      const auto& g = portfolio[u];
      if (!g.synchronous() || !g.provides_energy()) continue;
      bool on = uc.units[u].on;
      bool was_on = prev && prev->units[u].on;
      double p = uc.units[u].p_mw, pp = prev ? prev->units[u].p_mw : 0;
      if (on && was_on && std::abs(p - pp) > g.ramp_mw_per_h + tol)
        add(h, "RampViolation", g.id + " moved " + std::to_string(p - pp));
      if (on && !was_on && p > g.min_mw() + g.ramp_mw_per_h + tol)
        add(h, "StartupRampViolation", g.id);
    }
  }

  // min up/down over commitment runs
  for (size_t u = 0; u < sc.portfolio.size(); ++u) {
    const auto& g = sc.portfolio[u];
    if (!g.synchronous() || !g.provides_energy()) continue;
    int run_start = -1;
    bool prev_on = false;
    int off_start = -1;
    for (size_t i = 0; i <= result.size(); ++i) {
      bool on = i < result.size() && result[i].units[u].on;
      if (on && !prev_on) {
        if (off_start >= 0) {
          int off_len = int(i) - off_start;
          if (off_len < g.min_down_h)
            add(result[i].hour, "MinDownViolation",
                g.id + " off only " + std::to_string(off_len) + " h (hours " +
                    std::to_string(result[off_start].hour) + ".." + std::to_string(result[i].hour) +
                    ")");
        }
        run_start = int(i);
      }
      if (!on && prev_on) {
        int run_len = int(i) - run_start;
        if (i < result.size() && run_len < g.min_up_h)
          add(result[i].hour, "MinUpViolation",
              g.id + " on only " + std::to_string(run_len) + " h (hours " +
                  std::to_string(result[run_start].hour) + ".." + std::to_string(result[i].hour) +
                  ")");
        off_start = int(i);
      }
      prev_on = on;
    }
  }
  return rep;
}

/// Total production cost of a UC trajectory. Units start the horizon off;
/// startup is charged on every off->on edge, shutdown on on->off edges.
inline double uc_total_cost(const std::vector<UcHour>& result, const Portfolio& portfolio) {
  double c = 0;
  for (size_t i = 0; i < result.size(); ++i) {
    for (size_t u = 0; u < portfolio.size(); ++u) {
      const auto& g = portfolio[u];
      if (!g.synchronous()) continue;  // converter units bid zero and carry no UC costs here
      bool on = result[i].units[u].on;
      bool was_on = i > 0 && result[i - 1].units[u].on;
      if (on) c += g.fixed_cost + g.srmc * result[i].units[u].p_mw + (was_on ? 0 : g.startup_cost);
      if (!on && was_on) c += g.shutdown_cost;
    }
  }
  return c;
}

/// Share of dispatched energy supplied by converter-interfaced sources.
inline double compute_nsap(const Scenario& sc, const std::vector<UcHour>& uc) {
  if (uc.empty()) raise(ErrorKind::EmptyHorizon, "no UC hours");
  double ns = 0, total = 0;
  for (const auto& h : uc)
    for (size_t u = 0; u < sc.portfolio.size(); ++u) {
      total += h.units[u].p_mw;
      if (!sc.portfolio[u].synchronous()) ns += h.units[u].p_mw;
    }
  if (total <= 0) raise(ErrorKind::ZeroDispatch, "no energy dispatched over the horizon");
  return ns / total;
}

// ---------------------------------------------------------------------------
// exports

inline void export_uc_units(const std::vector<UcHour>& result, const Portfolio& portfolio,
                            const std::filesystem::path& path) {
  csv::Writer w(path);
  w.raw("hour,gen_id,on,p_mw");
  for (const auto& uc : result)
    for (size_t u = 0; u < portfolio.size(); ++u)
      w.row({std::to_string(uc.hour), portfolio[u].id, uc.units[u].on ? "1" : "0",
             csv::fmt(uc.units[u].p_mw)});
}

/// Per-region hourly summary; tie_flow_mw is the region's net import.
inline void export_uc_regions(const std::vector<UcHour>& result, const Network& net,
                              const std::filesystem::path& path) {
  csv::Writer w(path);
  w.raw("hour,region,inertia_mws,reserve_mw,curtailed_mw,tie_flow_mw");
  for (const auto& uc : result)
    for (const auto& region : net.regions) {
      const auto& rh = uc.regions.at(region);
      double net_import = 0;
      for (size_t l = 0; l < net.lines.size(); ++l) {
        if (net.lines[l].to == region) net_import += uc.tie_flows_mw[l];
        if (net.lines[l].from == region) net_import -= uc.tie_flows_mw[l];
      }
      w.row({std::to_string(uc.hour), region, csv::fmt(rh.inertia_mws), csv::fmt(rh.reserve_mw),
             csv::fmt(rh.curtailed_ns_mw), csv::fmt(net_import)});
    }
}

}  // namespace gridfreq
