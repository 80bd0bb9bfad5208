#include <catch2/catch_amalgamated.hpp>

#include "gridfreq/network.hpp"
#include "helpers.hpp"

using namespace gridfreq;
using testutil::chain;

TEST_CASE("two-node balance") {
  auto net = chain({"A", "B"}, 100.0);
  auto res = solve_tie_flows(net, {50.0, -50.0});
  REQUIRE(res.flows_mw.size() == 1);
  CHECK(res.flows_mw[0] == Catch::Approx(50.0));
  CHECK(res.violations.empty());
}

TEST_CASE("4-node chain with end-to-end transfer loads every line equally") {
  auto net = chain({"A", "B", "C", "D"}, 1000.0);
  auto res = solve_tie_flows(net, {100.0, 0.0, 0.0, -100.0});
  REQUIRE(res.flows_mw.size() == 3);
  for (double f : res.flows_mw) CHECK(f == Catch::Approx(100.0));
}

TEST_CASE("balanced regions produce zero flows") {
  auto net = chain({"A", "B", "C"}, 10.0);
  auto res = solve_tie_flows(net, {0.0, 0.0, 0.0});
  for (double f : res.flows_mw) CHECK(f == Catch::Approx(0.0));
}

TEST_CASE("unbalanced injections raise UnbalancedSystem") {
  auto net = chain({"A", "B"}, 100.0);
  try {
    solve_tie_flows(net, {50.0, -20.0});
    FAIL("expected UnbalancedSystem");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnbalancedSystem);
  }
}

TEST_CASE("limit violations are reported as data") {
  auto net = chain({"A", "B"}, 30.0);
  auto res = solve_tie_flows(net, {50.0, -50.0});
  REQUIRE(res.violations.size() == 1);
  CHECK(res.violations[0].line == 0);
  CHECK(res.violations[0].flow_mw == Catch::Approx(50.0));
  CHECK(res.violations[0].limit_mw == Catch::Approx(30.0));
}

TEST_CASE("meshed DC flow splits a transfer across parallel paths") {
  Network net;
  net.regions = {"A", "B", "C"};
  // triangle, equal susceptances: A->B direct and A->C->B path
  net.lines.push_back({"A", "B", 1000.0, 500.0});
  net.lines.push_back({"B", "C", 1000.0, 500.0});
  net.lines.push_back({"A", "C", 1000.0, 500.0});
  auto res = solve_tie_flows(net, {90.0, -90.0, 0.0});
  // direct path carries twice the two-hop path
  CHECK(res.flows_mw[0] == Catch::Approx(60.0));
  CHECK(res.flows_mw[1] == Catch::Approx(-30.0));
  CHECK(res.flows_mw[2] == Catch::Approx(30.0));
}

TEST_CASE("DC flow on a tree equals the nodal-balance solution") {
  auto net = chain({"A", "B", "C", "D"}, 1e9);
  std::vector<double> inj = {120.0, -40.0, -30.0, -50.0};
  auto tree = detail::tree_flows(net, inj);
  auto dc = detail::dc_flows(net, inj);
  for (size_t l = 0; l < tree.size(); ++l) CHECK(tree[l] == Catch::Approx(dc[l]).margin(1e-9));
}

TEST_CASE("network validation catches bad shapes") {
  Network disconnected;
  disconnected.regions = {"A", "B"};
  CHECK_THROWS_AS(check_network(disconnected), Error);

  Network dash;
  dash.regions = {"A-1"};
  CHECK_THROWS_AS(check_network(dash), Error);
}
