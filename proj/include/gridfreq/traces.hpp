#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gridfreq/csv.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/types.hpp"

namespace gridfreq {

/// Per-region hourly series for one study horizon. All regions share the
/// same contiguous 0-based hour axis.
struct RegionTrace {
  std::vector<double> demand_mw;
  std::vector<double> wind_cf;
  std::vector<double> solar_cf;
  std::vector<double> rooftop_pv_cf;
};

struct HourlyTraceSet {
  size_t hours = 0;
  std::vector<RegionId> regions;          // insertion order of first appearance
  std::map<RegionId, RegionTrace> data;

  bool has_region(const RegionId& r) const { return data.count(r) != 0; }

  const RegionTrace& at(const RegionId& r) const {
    auto it = data.find(r);
    if (it == data.end()) raise(ErrorKind::MissingRegion, "no trace for region " + r);
    return it->second;
  }

  double total_demand_mw(size_t hour) const {
    double s = 0;
    for (const auto& [_, tr] : data) s += tr.demand_mw[hour];
    return s;
  }
};

inline constexpr const char* kTraceHeader = "hour,region,demand_mw,wind_cf,solar_cf,rooftop_pv_cf";

/// Parses the trace CSV. Hours must be contiguous from 0 per region and the
/// region set must not change between hours.
inline HourlyTraceSet load_traces(const std::filesystem::path& path) {
  auto rows = csv::read_lines_checked(path, kTraceHeader);
  HourlyTraceSet ts;
  std::map<RegionId, long> next_hour;  // expected next hour per region

  long row_no = 1;  // header was row 0
  for (const auto& line : rows) {
    ++row_no;
    const std::string where = path.filename().string() + ":" + std::to_string(row_no);
    auto f = csv::split(line);
    if (f.size() != 6) raise(ErrorKind::ParseError, "expected 6 fields at " + where);

    long hour = csv::to_long(f[0], where);
    const RegionId& region = f[1];
    double demand = csv::to_double(f[2], where);
    double wind = csv::to_double(f[3], where);
    double solar = csv::to_double(f[4], where);
    double rooftop = csv::to_double(f[5], where);

    auto it = next_hour.find(region);
    if (it == next_hour.end()) {
      if (hour != 0)
        raise(ErrorKind::NonContiguousHours,
              "region " + region + " starts at hour " + std::to_string(hour) + " at " + where);
      next_hour[region] = 0;
      ts.regions.push_back(region);
      it = next_hour.find(region);
    }
    if (hour != it->second)
      raise(ErrorKind::NonContiguousHours, "region " + region + " expected hour " +
                                               std::to_string(it->second) + ", got " +
                                               std::to_string(hour) + " at " + where);
    it->second = hour + 1;

    if (demand <= 0) raise(ErrorKind::ValueOutOfRange, "demand_mw <= 0 at " + where);
    for (double cf : {wind, solar, rooftop})
      if (cf < 0 || cf > 1)
        raise(ErrorKind::ValueOutOfRange, "capacity factor outside [0,1] at " + where +
                                              " (hour " + std::to_string(hour) + ")");

    auto& tr = ts.data[region];
    tr.demand_mw.push_back(demand);
    tr.wind_cf.push_back(wind);
    tr.solar_cf.push_back(solar);
    tr.rooftop_pv_cf.push_back(rooftop);
  }

  if (ts.data.empty()) raise(ErrorKind::ParseError, "no data rows in " + path.string());

  size_t hours = ts.data.begin()->second.demand_mw.size();
  for (const auto& [region, tr] : ts.data)
    if (tr.demand_mw.size() != hours)
      raise(ErrorKind::MissingRegion, "region " + region + " has " +
                                          std::to_string(tr.demand_mw.size()) + " hours, others have " +
                                          std::to_string(hours));
  ts.hours = hours;
  return ts;
}

inline void save_traces(const HourlyTraceSet& ts, const std::filesystem::path& path) {
  csv::Writer w(path);
  w.raw(kTraceHeader);
  for (const auto& region : ts.regions) {
    const auto& tr = ts.data.at(region);
    for (size_t h = 0; h < ts.hours; ++h)
      w.row({std::to_string(h), region, csv::fmt(tr.demand_mw[h]), csv::fmt(tr.wind_cf[h]),
             csv::fmt(tr.solar_cf[h]), csv::fmt(tr.rooftop_pv_cf[h])});
  }
}

}  // namespace gridfreq
