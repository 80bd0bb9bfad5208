#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridfreq/csv.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/types.hpp"

namespace gridfreq {

/// Sampled post-contingency frequency response per region.
struct FrequencyTrace {
  double dt_s = 0.01;
  double duration_s = 50.0;
  double event_time_s = 1.0;
  double f0_hz = 50.0;
  std::vector<RegionId> regions;
  std::vector<std::vector<double>> f_hz;       // [region][step]
  std::vector<std::vector<double>> rocof;      // windowed, same shape
  std::vector<std::vector<double>> p_gov_mw;   // aggregate governor response
  std::vector<std::vector<double>> p_dev_mw;   // aggregate device response

  size_t steps() const { return f_hz.empty() ? 0 : f_hz[0].size(); }
  size_t event_index() const { return size_t(event_time_s / dt_s + 0.5); }

  int region_index(const RegionId& r) const {
    for (size_t i = 0; i < regions.size(); ++i)
      if (regions[i] == r) return int(i);
    raise(ErrorKind::MissingRegion, "region " + r + " not in trace");
  }
};

inline void export_trace(const FrequencyTrace& tr, const std::filesystem::path& path) {
  csv::Writer w(path);
  w.raw("t_s,region,f_hz,rocof_hz_per_s,p_gov_mw,p_dev_mw");
  for (size_t r = 0; r < tr.regions.size(); ++r)
    for (size_t i = 0; i < tr.steps(); ++i)
      w.row({csv::fmt(i * tr.dt_s), tr.regions[r], csv::fmt(tr.f_hz[r][i]),
             csv::fmt(tr.rocof[r][i]), csv::fmt(tr.p_gov_mw[r][i]), csv::fmt(tr.p_dev_mw[r][i])});
}

}  // namespace gridfreq
