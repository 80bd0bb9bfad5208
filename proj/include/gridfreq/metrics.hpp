#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gridfreq/dispatch.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/trace.hpp"

namespace gridfreq {

struct FrequencyMetrics {
  double min_rocof = 0;  // Hz/s, signed; most negative windowed value
  double nadir_hz = 0;
  double t_nadir_s = 0;
  double settling_hz = 0;
  bool rocof_violation = false;
  bool nadir_violation = false;
};

struct MetricOptions {
  double rocof_window_s = 0.5;
  double rocof_crit_hz_per_s = 0.5;  // magnitude
  double nadir_floor_hz = 49.5;
};

/// Windowed difference quotient (f(t+w) - f(t)) / w on the sampling grid.
inline std::vector<double> windowed_rocof_series(const std::vector<double>& f, double dt_s,
                                                 double window_s) {
  if (window_s < dt_s) raise(ErrorKind::ValueOutOfRange, "window below sample spacing");
  const size_t k = size_t(window_s / dt_s + 0.5);
  std::vector<double> out(f.size(), 0.0);
  if (f.size() <= k) return out;
  for (size_t i = 0; i + k < f.size(); ++i) out[i] = (f[i + k] - f[i]) / (k * dt_s);
  // tail keeps the last computable value so the series stays plottable
  for (size_t i = f.size() - k; i < f.size(); ++i) out[i] = out[f.size() - k - 1];
  return out;
}

/// Most negative windowed RoCoF at or after the event.
inline double min_rocof(const FrequencyTrace& tr, const RegionId& region, double window_s = 0.5) {
  const auto& f = tr.f_hz[tr.region_index(region)];
  if (window_s < tr.dt_s) raise(ErrorKind::ValueOutOfRange, "window below sample spacing");
  const size_t k = size_t(window_s / tr.dt_s + 0.5);
  const size_t start = tr.event_index();
  if (start + k >= f.size())
    raise(ErrorKind::WindowTooLong, "window does not fit after the event");
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = start; i + k < f.size(); ++i)
    m = std::min(m, (f[i + k] - f[i]) / (k * tr.dt_s));
  return m;
}

/// Minimum sampled frequency and its time, first occurrence, from the event on.
inline std::pair<double, double> nadir(const FrequencyTrace& tr, const RegionId& region) {
  const auto& f = tr.f_hz[tr.region_index(region)];
  size_t best = tr.event_index();
  for (size_t i = tr.event_index(); i < f.size(); ++i)
    if (f[i] < f[best]) best = i;
  return {f[best], best * tr.dt_s};
}

/// Arithmetic mean of the final 5 s.
inline double settling_frequency(const FrequencyTrace& tr, const RegionId& region) {
  if (tr.duration_s < 10.0) raise(ErrorKind::TraceTooShort, "need at least 10 s of trace");
  const auto& f = tr.f_hz[tr.region_index(region)];
  const size_t k = size_t(5.0 / tr.dt_s + 0.5);
  double s = 0;
  for (size_t i = f.size() - k; i < f.size(); ++i) s += f[i];
  return s / double(k);
}

inline FrequencyMetrics extract_metrics(const FrequencyTrace& tr, const RegionId& region,
                                        const MetricOptions& opt = {}) {
  FrequencyMetrics m;
  m.min_rocof = min_rocof(tr, region, opt.rocof_window_s);
  auto [fmin, tmin] = nadir(tr, region);
  m.nadir_hz = fmin;
  m.t_nadir_s = tmin;
  m.settling_hz = settling_frequency(tr, region);
  m.rocof_violation = m.min_rocof < -opt.rocof_crit_hz_per_s;
  m.nadir_violation = m.nadir_hz < opt.nadir_floor_hz;
  return m;
}

/// Instantaneous share of converter-interfaced generation in one hour.
inline double nsip(const UcHour& uc, const Portfolio& portfolio) {
  double ns = 0, sg = 0;
  for (size_t u = 0; u < portfolio.size(); ++u) {
    if (!uc.units[u].on) continue;
    if (portfolio[u].synchronous())
      sg += uc.units[u].p_mw;
    else
      ns += uc.units[u].p_mw;
  }
  if (ns + sg <= 0) raise(ErrorKind::ZeroDispatch, "no dispatch in hour");
  return ns / (ns + sg);
}

// ---------------------------------------------------------------------------
// scan aggregation

struct ScanRecord {
  std::string case_label;
  int hour = 0;
  RegionId meter;
  double i_sys_mws = 0;
  double i_region_mws = 0;  // inertia of the contingency region
  double p_cc_mw = 0;
  double nsip = 0;
  FrequencyMetrics metrics;
};

struct Histogram {
  double lo = 0, hi = 0;  // bin edges span [lo, hi], equal width
  std::vector<long> counts;

  void add(double v) {
    if (counts.empty()) return;
    double w = (hi - lo) / double(counts.size());
    long b = w > 0 ? long(std::floor((v - lo) / w)) : 0;
    b = std::clamp(b, 0L, long(counts.size()) - 1);
    ++counts[size_t(b)];
  }
};

struct FamilySummary {
  long records = 0;
  double i_sys_min = std::numeric_limits<double>::infinity();
  double i_sys_max = -std::numeric_limits<double>::infinity();
  double i_sys_sum = 0;
  Histogram i_sys_hist;
  Histogram p_cc_hist;
  long rocof_violations = 0;
  long nadir_violations = 0;
  // violation fraction by NSIP decile
  std::array<long, 10> nsip_hours{};
  std::array<long, 10> nsip_rocof_violations{};

  double i_sys_mean() const { return records ? i_sys_sum / double(records) : 0; }
};

struct ScanSummaryOptions {
  double inertia_hist_max_mws = 300000.0;  // 300 GWs
  int inertia_bins = 30;
  double cc_hist_max_mw = 1000.0;
  int cc_bins = 20;
};

/// Commutative, associative fold over scan records, grouped per case family.
struct ScanSummary {
  ScanSummaryOptions opts;
  std::map<std::string, FamilySummary> families;
  FamilySummary total;

  explicit ScanSummary(const ScanSummaryOptions& o = {}) : opts(o) { init(total); }

  void init(FamilySummary& f) const {
    f.i_sys_hist = {0.0, opts.inertia_hist_max_mws,
                    std::vector<long>(size_t(opts.inertia_bins), 0)};
    f.p_cc_hist = {0.0, opts.cc_hist_max_mw, std::vector<long>(size_t(opts.cc_bins), 0)};
  }

  void add(const ScanRecord& r) {
    auto it = families.find(r.case_label);
    if (it == families.end()) {
      it = families.emplace(r.case_label, FamilySummary{}).first;
      init(it->second);
    }
    for (FamilySummary* f : {&it->second, &total}) {
      ++f->records;
      f->i_sys_min = std::min(f->i_sys_min, r.i_sys_mws);
      f->i_sys_max = std::max(f->i_sys_max, r.i_sys_mws);
      f->i_sys_sum += r.i_sys_mws;
      f->i_sys_hist.add(r.i_sys_mws);
      f->p_cc_hist.add(r.p_cc_mw);
      if (r.metrics.rocof_violation) ++f->rocof_violations;
      if (r.metrics.nadir_violation) ++f->nadir_violations;
      size_t d = size_t(std::clamp(int(r.nsip * 10.0), 0, 9));
      ++f->nsip_hours[d];
      if (r.metrics.rocof_violation) ++f->nsip_rocof_violations[d];
    }
  }

  void merge(const ScanSummary& other) {
    for (const auto& [label, f] : other.families) {
      auto it = families.find(label);
      if (it == families.end()) {
        families[label] = f;
      } else {
        merge_family(it->second, f);
      }
    }
    merge_family(total, other.total);
  }

  static void merge_family(FamilySummary& a, const FamilySummary& b) {
    a.records += b.records;
    a.i_sys_min = std::min(a.i_sys_min, b.i_sys_min);
    a.i_sys_max = std::max(a.i_sys_max, b.i_sys_max);
    a.i_sys_sum += b.i_sys_sum;
    for (size_t i = 0; i < a.i_sys_hist.counts.size(); ++i)
      a.i_sys_hist.counts[i] += b.i_sys_hist.counts[i];
    for (size_t i = 0; i < a.p_cc_hist.counts.size(); ++i)
      a.p_cc_hist.counts[i] += b.p_cc_hist.counts[i];
    a.rocof_violations += b.rocof_violations;
    a.nadir_violations += b.nadir_violations;
    for (size_t i = 0; i < 10; ++i) {
      a.nsip_hours[i] += b.nsip_hours[i];
      a.nsip_rocof_violations[i] += b.nsip_rocof_violations[i];
    }
  }
};

inline ScanSummary aggregate_scan(const std::vector<ScanRecord>& records,
                                  const ScanSummaryOptions& opts = {}) {
  ScanSummary s(opts);
  for (const auto& r : records) s.add(r);
  return s;
}

/// NSIP bracket of the violation boundary: the lowest NSIP that violated and
/// the highest that did not. Overlap (lo < hi) is expected and meaningful.
inline std::pair<double, double> critical_nsip_range(const std::vector<ScanRecord>& records) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool any_violation = false, any_clean = false;
  for (const auto& r : records) {
    if (r.metrics.rocof_violation) {
      any_violation = true;
      lo = std::min(lo, r.nsip);
    } else {
      any_clean = true;
      hi = std::max(hi, r.nsip);
    }
  }
  if (!any_violation) raise(ErrorKind::NoViolations, "no RoCoF violations in the record set");
  if (!any_clean) hi = lo;
  return {lo, hi};
}

}  // namespace gridfreq
