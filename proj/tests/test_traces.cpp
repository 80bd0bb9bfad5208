#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "gridfreq/traces.hpp"
#include "helpers.hpp"

using namespace gridfreq;
using testutil::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

}  // namespace

TEST_CASE("load_traces parses a well-formed multi-region file") {
  TempDir tmp;
  auto p = tmp.path() / "traces.csv";
  std::string body = std::string(kTraceHeader) + "\n";
  for (const std::string region : {"QLD", "NSW", "VIC", "SA"})
    for (int h = 0; h < 24; ++h)
      body += std::to_string(h) + "," + region + ",1000,0.3,0.5,0.4\n";
  write_file(p, body);

  auto ts = load_traces(p);
  CHECK(ts.hours == 24);
  CHECK(ts.regions.size() == 4);
  CHECK(ts.at("QLD").demand_mw[7] == 1000.0);
  CHECK(ts.at("SA").wind_cf[23] == 0.3);
}

TEST_CASE("load_traces rejects an out-of-range capacity factor, naming the hour") {
  TempDir tmp;
  auto p = tmp.path() / "traces.csv";
  std::string body = std::string(kTraceHeader) + "\n";
  for (int h = 0; h < 12; ++h) {
    double wind = (h == 7) ? 1.2 : 0.3;
    body += std::to_string(h) + ",R1,500," + std::to_string(wind) + ",0,0\n";
  }
  write_file(p, body);

  try {
    load_traces(p);
    FAIL("expected ValueOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValueOutOfRange);
    CHECK(std::string(e.what()).find("hour 7") != std::string::npos);
  }
}

TEST_CASE("load_traces rejects non-contiguous hours") {
  TempDir tmp;
  auto p = tmp.path() / "traces.csv";
  write_file(p, std::string(kTraceHeader) + "\n0,R1,500,0.3,0,0\n2,R1,500,0.3,0,0\n");
  try {
    load_traces(p);
    FAIL("expected NonContiguousHours");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonContiguousHours);
  }
}

TEST_CASE("load_traces rejects region hour-count mismatch") {
  TempDir tmp;
  auto p = tmp.path() / "traces.csv";
  std::string body = std::string(kTraceHeader) + "\n";
  for (int h = 0; h < 4; ++h) body += std::to_string(h) + ",A,500,0.3,0,0\n";
  for (int h = 0; h < 3; ++h) body += std::to_string(h) + ",B,500,0.3,0,0\n";
  write_file(p, body);
  try {
    load_traces(p);
    FAIL("expected MissingRegion");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingRegion);
  }
}

TEST_CASE("load_traces rejects bad numerics and zero demand") {
  TempDir tmp;
  auto p = tmp.path() / "traces.csv";
  write_file(p, std::string(kTraceHeader) + "\n0,R1,abc,0.3,0,0\n");
  CHECK_THROWS_AS(load_traces(p), Error);

  write_file(p, std::string(kTraceHeader) + "\n0,R1,0,0.3,0,0\n");
  try {
    load_traces(p);
    FAIL("expected ValueOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValueOutOfRange);
  }
}

TEST_CASE("save/load round trip preserves values bit-exactly") {
  TempDir tmp;
  auto ts = testutil::flat_traces({{"A", 123.456789012345}, {"B", 77.1}}, 24, 0.31415, 0.2718, 0.1);
  auto p = tmp.path() / "rt.csv";
  save_traces(*ts, p);
  auto back = load_traces(p);
  REQUIRE(back.hours == 24);
  for (const auto& region : back.regions)
    for (size_t h = 0; h < back.hours; ++h) {
      CHECK(back.at(region).demand_mw[h] == ts->at(region).demand_mw[h]);
      CHECK(back.at(region).wind_cf[h] == ts->at(region).wind_cf[h]);
    }
}
