#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "gridfreq/csv.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/metrics.hpp"

namespace gridfreq {

inline constexpr const char* kRecordHeader =
    "case_label,hour,meter,i_sys_mws,i_region_mws,p_cc_mw,nsip,min_rocof,nadir_hz,t_nadir_s,"
    "settling_hz,rocof_viol,nadir_viol";

inline std::string record_row(const ScanRecord& r) {
  std::string s;
  s += r.case_label;
  s += ',' + std::to_string(r.hour);
  s += ',' + r.meter;
  s += ',' + csv::fmt(r.i_sys_mws);
  s += ',' + csv::fmt(r.i_region_mws);
  s += ',' + csv::fmt(r.p_cc_mw);
  s += ',' + csv::fmt(r.nsip);
  s += ',' + csv::fmt(r.metrics.min_rocof);
  s += ',' + csv::fmt(r.metrics.nadir_hz);
  s += ',' + csv::fmt(r.metrics.t_nadir_s);
  s += ',' + csv::fmt(r.metrics.settling_hz);
  s += r.metrics.rocof_violation ? ",1" : ",0";
  s += r.metrics.nadir_violation ? ",1" : ",0";
  return s;
}

inline ScanRecord parse_record_row(const std::string& line) {
  auto f = csv::split(line);
  if (f.size() != 13) raise(ErrorKind::ParseError, "bad record row: " + line);
  ScanRecord r;
  r.case_label = f[0];
  r.hour = int(csv::to_long(f[1], "record"));
  r.meter = f[2];
  r.i_sys_mws = csv::to_double(f[3], "record");
  r.i_region_mws = csv::to_double(f[4], "record");
  r.p_cc_mw = csv::to_double(f[5], "record");
  r.nsip = csv::to_double(f[6], "record");
  r.metrics.min_rocof = csv::to_double(f[7], "record");
  r.metrics.nadir_hz = csv::to_double(f[8], "record");
  r.metrics.t_nadir_s = csv::to_double(f[9], "record");
  r.metrics.settling_hz = csv::to_double(f[10], "record");
  r.metrics.rocof_violation = f[11] == "1";
  r.metrics.nadir_violation = f[12] == "1";
  return r;
}

/// Directory-backed scan output: one CSV shard per sensitivity case plus a
/// manifest carrying the config hash and the completed-hour index. Shards
/// only ever hold a contiguous hour prefix; the manifest commits it.
class ResultStore {
 public:
  static ResultStore create(const std::filesystem::path& dir, const std::string& config_hash,
                            int hour_begin, int hour_end,
                            const std::vector<std::string>& case_labels) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "records");
    for (const auto& e : fs::directory_iterator(dir / "records")) fs::remove(e.path());
    ResultStore st;
    st.dir_ = dir;
    st.config_hash_ = config_hash;
    st.hour_begin_ = hour_begin;
    st.hour_end_ = hour_end;
    for (const auto& l : case_labels) st.completed_[l] = 0;
    st.write_manifest();
    return st;
  }

  static ResultStore open(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) raise(ErrorKind::IoError, "no manifest in " + dir.string());
    json j;
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      raise(ErrorKind::ParseError, std::string("manifest: ") + e.what());
    }
    ResultStore st;
    st.dir_ = dir;
    st.config_hash_ = j.at("config_hash").get<std::string>();
    st.hour_begin_ = j.at("hour_begin").get<int>();
    st.hour_end_ = j.at("hour_end").get<int>();
    for (auto& [k, v] : j.at("completed_hours").items()) st.completed_[k] = v.get<long>();
    for (auto& [k, v] : j.at("scenario_skips").items())
      st.scenario_skips_[k] = v.get<std::string>();
    for (const auto& e : j.at("case_hour_skips"))
      st.case_hour_skips_.push_back({e.at(0).get<std::string>(), e.at(1).get<int>(),
                                     e.at(2).get<std::string>()});
    return st;
  }

  const std::filesystem::path& dir() const { return dir_; }
  const std::string& config_hash() const { return config_hash_; }
  int hour_begin() const { return hour_begin_; }
  int hour_end() const { return hour_end_; }
  const std::map<std::string, long>& completed_hours() const { return completed_; }
  const std::map<std::string, std::string>& scenario_skips() const { return scenario_skips_; }

  std::filesystem::path shard_path(const std::string& label) const {
    return dir_ / "records" / (label + ".csv");
  }

  long completed(const std::string& label) const {
    auto it = completed_.find(label);
    return it == completed_.end() ? 0 : it->second;
  }

  /// Appends rows for hours [completed, new_prefix) of this case.
  void append_rows(const std::string& label, long new_prefix_hours,
                   const std::vector<std::string>& rows) {
    namespace fs = std::filesystem;
    auto p = shard_path(label);
    bool fresh = !fs::exists(p);
    std::ofstream out(p, std::ios::app);
    if (!out) raise(ErrorKind::IoError, "cannot append to " + p.string());
    if (fresh) out << kRecordHeader << '\n';
    for (const auto& r : rows) out << r << '\n';
    out.flush();
    completed_[label] = new_prefix_hours;
  }

  void record_scenario_skip(const std::string& scenario, const std::string& reason) {
    scenario_skips_[scenario] = reason;
  }

  void record_case_hour_skip(const std::string& label, int hour, const std::string& reason) {
    case_hour_skips_.push_back({label, hour, reason});
  }

  /// Atomically commits the completed-hour index.
  void write_manifest() {
    json j;
    j["config_hash"] = config_hash_;
    j["hour_begin"] = hour_begin_;
    j["hour_end"] = hour_end_;
    j["completed_hours"] = json::object();
    for (const auto& [k, v] : completed_) j["completed_hours"][k] = v;
    j["scenario_skips"] = json::object();
    for (const auto& [k, v] : scenario_skips_) j["scenario_skips"][k] = v;
    auto skips = json::array();
    for (const auto& [label, hour, reason] : case_hour_skips_)
      skips.push_back(json::array({label, hour, reason}));
    j["case_hour_skips"] = skips;

    auto tmp = dir_ / "manifest.json.tmp";
    {
      std::ofstream out(tmp);
      if (!out) raise(ErrorKind::IoError, "cannot write " + tmp.string());
      out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, dir_ / "manifest.json");
  }

  /// Drops any shard rows past the manifest's committed prefix (rows written
  /// after the last checkpoint of an interrupted run).
  void truncate_to_manifest() {
    for (const auto& [label, prefix] : completed_) {
      auto p = shard_path(label);
      if (!std::filesystem::exists(p)) continue;
      auto rows = csv::read_lines_checked(p, kRecordHeader);
      std::vector<std::string> keep;
      bool dropped = false;
      for (const auto& r : rows) {
        auto fields = csv::split(r);
        long hour = csv::to_long(fields.at(1), "record");
        if (hour < hour_begin_ + prefix)
          keep.push_back(r);
        else
          dropped = true;
      }
      if (dropped) {
        csv::Writer w(p);
        w.raw(kRecordHeader);
        for (const auto& r : keep) w.raw(r);
      }
    }
  }

  std::vector<ScanRecord> read_records(const std::string& label) const {
    auto p = shard_path(label);
    std::vector<ScanRecord> out;
    if (!std::filesystem::exists(p)) return out;
    for (const auto& line : csv::read_lines_checked(p, kRecordHeader))
      out.push_back(parse_record_row(line));
    return out;
  }

  std::vector<ScanRecord> read_all_records() const {
    std::vector<ScanRecord> out;
    for (const auto& [label, _] : completed_)
      for (auto& r : read_records(label)) out.push_back(std::move(r));
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::string config_hash_;
  int hour_begin_ = 0, hour_end_ = 0;
  std::map<std::string, long> completed_;
  std::map<std::string, std::string> scenario_skips_;
  std::vector<std::tuple<std::string, int, std::string>> case_hour_skips_;
};

}  // namespace gridfreq
