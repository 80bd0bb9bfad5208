#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridfreq/csv.hpp"
#include "gridfreq/dispatch.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/types.hpp"

namespace gridfreq {

enum class ContingencyKind { Variable, Fixed };
enum class LoadModelKind { Static, Dynamic };

/// What gets tripped: the in-feed loss the dynamics will step.
struct ContingencyCase {
  RegionId region;
  double size_mw = 0;
  ContingencyKind kind = ContingencyKind::Variable;
  std::optional<std::string> tripped_unit;
};

/// One cell of the scenario x sensitivity grid.
struct SensitivityCase {
  std::string scenario;  // NSxx
  LoadModelKind load_model = LoadModelKind::Static;
  ContingencyKind contingency_kind = ContingencyKind::Variable;
  RegionId location;
  RegionId meter;
};

/// Largest dispatched synchronous unit in the hour; ties go to the lowest id.
inline std::optional<ContingencyCase> try_identify_system_cc(const UcHour& uc,
                                                             const Portfolio& portfolio) {
  int best = -1;
  for (size_t u = 0; u < portfolio.size(); ++u) {
    if (!uc.units[u].on || !portfolio[u].synchronous() || uc.units[u].p_mw <= 0) continue;
    if (best < 0 || uc.units[u].p_mw > uc.units[best].p_mw ||
        (uc.units[u].p_mw == uc.units[best].p_mw && portfolio[u].id < portfolio[best].id))
      best = int(u);
  }
  if (best < 0) return std::nullopt;
  return ContingencyCase{portfolio[best].region, uc.units[best].p_mw, ContingencyKind::Variable,
                         portfolio[best].id};
}

inline ContingencyCase identify_system_cc(const UcHour& uc, const Portfolio& portfolio) {
  auto cc = try_identify_system_cc(uc, portfolio);
  if (!cc) raise(ErrorKind::NoSynchronousUnit, "no synchronous unit dispatched");
  return *cc;
}

inline std::optional<ContingencyCase> try_identify_regional_cc(const UcHour& uc,
                                                               const Portfolio& portfolio,
                                                               const RegionId& region) {
  int best = -1;
  for (size_t u = 0; u < portfolio.size(); ++u) {
    if (portfolio[u].region != region) continue;
    if (!uc.units[u].on || !portfolio[u].synchronous() || uc.units[u].p_mw <= 0) continue;
    if (best < 0 || uc.units[u].p_mw > uc.units[best].p_mw ||
        (uc.units[u].p_mw == uc.units[best].p_mw && portfolio[u].id < portfolio[best].id))
      best = int(u);
  }
  if (best < 0) return std::nullopt;
  return ContingencyCase{region, uc.units[best].p_mw, ContingencyKind::Variable,
                         portfolio[best].id};
}

inline ContingencyCase identify_regional_cc(const UcHour& uc, const Portfolio& portfolio,
                                            const RegionId& region) {
  auto cc = try_identify_regional_cc(uc, portfolio, region);
  if (!cc) raise(ErrorKind::NoSynchronousUnit, "no synchronous unit dispatched in " + region);
  return *cc;
}

/// Benchmark loss of a fixed block of generation (default 666 MW).
inline ContingencyCase fixed_cc(const RegionId& location, double size_mw = 666.0) {
  return ContingencyCase{location, size_mw, ContingencyKind::Fixed, std::nullopt};
}

/// `NSxx-L{s|d}C{v|f}LOCATION-METER`
inline std::string case_label(const SensitivityCase& c) {
  std::string s = c.scenario;
  s += "-L";
  s += (c.load_model == LoadModelKind::Static) ? 's' : 'd';
  s += 'C';
  s += (c.contingency_kind == ContingencyKind::Variable) ? 'v' : 'f';
  s += c.location;
  s += '-';
  s += c.meter;
  return s;
}

inline SensitivityCase parse_case_label(const std::string& label) {
  auto bad = [&]() -> SensitivityCase {
    raise(ErrorKind::ParseError, "malformed case label '" + label + "'");
  };
  size_t dash2 = label.rfind('-');
  if (dash2 == std::string::npos || dash2 + 1 >= label.size()) return bad();
  size_t dash1 = label.find('-');
  if (dash1 == std::string::npos || dash1 == dash2) return bad();
  SensitivityCase c;
  c.scenario = label.substr(0, dash1);
  nsap_from_label(c.scenario);  // validates NSxx
  std::string mid = label.substr(dash1 + 1, dash2 - dash1 - 1);
  if (mid.size() < 5 || mid[0] != 'L' || (mid[1] != 's' && mid[1] != 'd') || mid[2] != 'C' ||
      (mid[3] != 'v' && mid[3] != 'f'))
    return bad();
  c.load_model = (mid[1] == 's') ? LoadModelKind::Static : LoadModelKind::Dynamic;
  c.contingency_kind = (mid[3] == 'v') ? ContingencyKind::Variable : ContingencyKind::Fixed;
  c.location = mid.substr(4);
  c.meter = label.substr(dash2 + 1);
  if (c.location.empty() || c.meter.empty()) return bad();
  return c;
}

/// Full cross product scenario x load model x contingency kind x location,
/// metered at the contingency location, in deterministic order.
inline std::vector<SensitivityCase> enumerate_cases(const std::vector<std::string>& scenarios,
                                                    const std::vector<RegionId>& regions) {
  std::vector<SensitivityCase> out;
  out.reserve(scenarios.size() * 4 * regions.size());
  for (const auto& s : scenarios)
    for (auto lm : {LoadModelKind::Static, LoadModelKind::Dynamic})
      for (auto ck : {ContingencyKind::Variable, ContingencyKind::Fixed})
        for (const auto& r : regions) out.push_back({s, lm, ck, r, r});
  return out;
}

inline void export_cases(const std::vector<SensitivityCase>& cases,
                         const std::filesystem::path& path) {
  csv::Writer w(path);
  w.raw("label,scenario,load_model,kind,location,meter");
  for (const auto& c : cases)
    w.row({case_label(c), c.scenario, c.load_model == LoadModelKind::Static ? "static" : "dynamic",
           c.contingency_kind == ContingencyKind::Variable ? "variable" : "fixed", c.location,
           c.meter});
}

}  // namespace gridfreq
