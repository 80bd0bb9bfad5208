#pragma once

#include <string>
#include <vector>

#include "gridfreq/errors.hpp"

namespace gridfreq {

using RegionId = std::string;

enum class Tech { Hydro, Coal, CCGT, OCGT, CSP, Wind, UtilityPV, SynCon };

inline const char* to_string(Tech t) {
  switch (t) {
    case Tech::Hydro: return "Hydro";
    case Tech::Coal: return "Coal";
    case Tech::CCGT: return "CCGT";
    case Tech::OCGT: return "OCGT";
    case Tech::CSP: return "CSP";
    case Tech::Wind: return "Wind";
    case Tech::UtilityPV: return "UtilityPV";
    case Tech::SynCon: return "SynCon";
  }
  return "?";
}

inline Tech tech_from_string(const std::string& s) {
  if (s == "Hydro") return Tech::Hydro;
  if (s == "Coal") return Tech::Coal;
  if (s == "CCGT") return Tech::CCGT;
  if (s == "OCGT") return Tech::OCGT;
  if (s == "CSP") return Tech::CSP;
  if (s == "Wind") return Tech::Wind;
  if (s == "UtilityPV") return Tech::UtilityPV;
  if (s == "SynCon") return Tech::SynCon;
  raise(ErrorKind::ParseError, "unknown tech '" + s + "'");
}

/// Converter-interfaced sources; everything else runs a synchronous machine.
inline bool is_non_synchronous(Tech t) { return t == Tech::Wind || t == Tech::UtilityPV; }
inline bool is_synchronous(Tech t) { return !is_non_synchronous(t); }

/// One generating unit (or synchronous condenser). Rated MVA is taken
/// numerically equal to capacity_mw at unity power factor.
struct GeneratorSpec {
  std::string id;
  RegionId region;
  Tech tech = Tech::Coal;
  double capacity_mw = 0;
  double inertia_h_s = 0;        // inertia constant H, seconds
  double srmc = 0;               // $/MWh
  double fixed_cost = 0;         // $/h while committed
  double startup_cost = 0;       // $
  double shutdown_cost = 0;      // $
  double min_stable = 0;         // fraction of capacity
  double ramp_mw_per_h = 1e12;   // MW/h
  int min_up_h = 1;
  int min_down_h = 1;
  double droop = 0;              // per-unit on unit base; 0 = no governor
  double gov_time_const_s = 0.5;

  /// A SynCon spins but never delivers energy.
  bool provides_energy() const { return tech != Tech::SynCon; }
  bool synchronous() const { return is_synchronous(tech); }
  double min_mw() const { return min_stable * capacity_mw; }
  double inertia_mws() const { return synchronous() ? inertia_h_s * capacity_mw : 0.0; }
};

inline void check_generator(const GeneratorSpec& g) {
  if (g.capacity_mw <= 0) raise(ErrorKind::ValueOutOfRange, "unit " + g.id + ": capacity must be > 0");
  if (g.min_stable < 0 || g.min_stable > 1)
    raise(ErrorKind::ValueOutOfRange, "unit " + g.id + ": min_stable outside [0,1]");
  if (g.inertia_h_s < 0) raise(ErrorKind::ValueOutOfRange, "unit " + g.id + ": negative inertia constant");
  bool ns = is_non_synchronous(g.tech);
  if (ns && g.inertia_h_s != 0)
    raise(ErrorKind::ValueOutOfRange, "unit " + g.id + ": converter-interfaced unit must have H = 0");
  if (!ns && g.inertia_h_s == 0)
    raise(ErrorKind::ValueOutOfRange, "unit " + g.id + ": synchronous unit must have H > 0");
  if (g.tech == Tech::SynCon && g.min_stable != 0)
    raise(ErrorKind::ValueOutOfRange, "unit " + g.id + ": SynCon must have min_stable = 0");
  if (g.ramp_mw_per_h < 0) raise(ErrorKind::ValueOutOfRange, "unit " + g.id + ": negative ramp");
  if (g.min_up_h < 1 || g.min_down_h < 1)
    raise(ErrorKind::ValueOutOfRange, "unit " + g.id + ": min up/down must be >= 1 h");
}

using Portfolio = std::vector<GeneratorSpec>;

inline void check_portfolio(const Portfolio& p) {
  for (const auto& g : p) check_generator(g);
}

}  // namespace gridfreq
