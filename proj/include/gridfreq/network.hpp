#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gridfreq/errors.hpp"
#include "gridfreq/types.hpp"

namespace gridfreq {

struct Line {
  RegionId from;
  RegionId to;
  double limit_mw = 0;
  double sync_coeff_mw_per_rad = 500.0;
};

/// Inter-regional transmission. The reference case is a radial chain, but
/// meshed graphs are accepted (flows then come from a DC solve).
struct Network {
  std::vector<RegionId> regions;
  std::vector<Line> lines;

  int region_index(const RegionId& r) const {
    for (size_t i = 0; i < regions.size(); ++i)
      if (regions[i] == r) return int(i);
    raise(ErrorKind::MissingRegion, "region " + r + " not in network");
  }

  bool has_region(const RegionId& r) const {
    return std::find(regions.begin(), regions.end(), r) != regions.end();
  }
};

inline void check_network(const Network& net) {
  if (net.regions.empty()) raise(ErrorKind::ConfigError, "network has no regions");
  for (const auto& r : net.regions)
    if (r.find('-') != std::string::npos)
      raise(ErrorKind::ConfigError, "region name '" + r + "' must not contain '-'");
  std::vector<std::vector<int>> adj(net.regions.size());
  for (const auto& l : net.lines) {
    if (l.limit_mw <= 0) raise(ErrorKind::ConfigError, "line limit must be > 0");
    if (l.sync_coeff_mw_per_rad <= 0) raise(ErrorKind::ConfigError, "sync_coeff must be > 0");
    int a = net.region_index(l.from), b = net.region_index(l.to);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  // connectivity
  std::vector<char> seen(net.regions.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  for (size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) raise(ErrorKind::ConfigError, "network is disconnected at region " + net.regions[i]);
}

inline bool is_tree(const Network& net) {
  return net.lines.size() + 1 == net.regions.size();
}

namespace detail {

/// Flows on a tree are the unique solution of the nodal balances: the flow
/// on each edge equals the net injection of the subtree behind it.
inline std::vector<double> tree_flows(const Network& net, const std::vector<double>& injection) {
  const size_t n = net.regions.size();
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, line idx)
  for (size_t l = 0; l < net.lines.size(); ++l) {
    int a = net.region_index(net.lines[l].from), b = net.region_index(net.lines[l].to);
    adj[a].push_back({b, int(l)});
    adj[b].push_back({a, int(l)});
  }
  std::vector<double> subtree(injection);
  std::vector<double> flows(net.lines.size(), 0.0);
  std::vector<int> order, parent(n, -1), parent_line(n, -1);
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto [w, l] : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = v;
        parent_line[w] = l;
        stack.push_back(w);
      }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (parent[v] < 0) continue;
    subtree[parent[v]] += subtree[v];
    int l = parent_line[v];
    // positive flow runs along the line's from->to orientation
    double toward_parent = subtree[v];
    flows[l] = (net.region_index(net.lines[l].to) == parent[v]) ? toward_parent : -toward_parent;
  }
  return flows;
}

/// DC load flow with the synchronizing coefficient standing in for line
/// susceptance; slack at region 0. Plain Gaussian elimination, the systems
/// here are tiny.
inline std::vector<double> dc_flows(const Network& net, const std::vector<double>& injection) {
  const size_t n = net.regions.size();
  if (n == 1) return {};
  const size_t m = n - 1;  // reduced system without slack
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (const auto& l : net.lines) {
    int i = net.region_index(l.from), j = net.region_index(l.to);
    double b = l.sync_coeff_mw_per_rad;
    if (i > 0) a[i - 1][i - 1] += b;
    if (j > 0) a[j - 1][j - 1] += b;
    if (i > 0 && j > 0) {
      a[i - 1][j - 1] -= b;
      a[j - 1][i - 1] -= b;
    }
  }
  for (size_t i = 1; i < n; ++i) a[i - 1][m] = injection[i];

  for (size_t col = 0; col < m; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    if (std::abs(a[col][col]) < 1e-12)
      raise(ErrorKind::ConfigError, "singular DC flow matrix (disconnected network?)");
    for (size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      double k = a[r][col] / a[col][col];
      if (k == 0) continue;
      for (size_t c = col; c <= m; ++c) a[r][c] -= k * a[col][c];
    }
  }
  std::vector<double> theta(n, 0.0);
  for (size_t i = 1; i < n; ++i) theta[i] = a[i - 1][m] / a[i - 1][i - 1];

  std::vector<double> flows(net.lines.size());
  for (size_t l = 0; l < net.lines.size(); ++l) {
    int i = net.region_index(net.lines[l].from), j = net.region_index(net.lines[l].to);
    flows[l] = net.lines[l].sync_coeff_mw_per_rad * (theta[i] - theta[j]);
  }
  return flows;
}

}  // namespace detail

struct FlowLimitViolation {
  int line = 0;
  double flow_mw = 0;
  double limit_mw = 0;
};

struct TieFlowResult {
  std::vector<double> flows_mw;  // per line, from->to positive
  std::vector<FlowLimitViolation> violations;
};

/// Flows implied by regional net injections (generation minus demand).
/// Injections must balance to ~zero; limit violations are reported as data.
inline TieFlowResult solve_tie_flows(const Network& net, const std::vector<double>& injection_mw) {
  if (injection_mw.size() != net.regions.size())
    raise(ErrorKind::ConfigError, "injection vector size mismatch");
  double total = 0, mag = 0;
  for (double x : injection_mw) {
    total += x;
    mag += std::abs(x);
  }
  if (std::abs(total) > 1e-6 * std::max(1.0, mag))
    raise(ErrorKind::UnbalancedSystem,
          "regional injections sum to " + std::to_string(total) + " MW");

  TieFlowResult res;
  res.flows_mw = is_tree(net) ? detail::tree_flows(net, injection_mw)
                              : detail::dc_flows(net, injection_mw);
  for (size_t l = 0; l < net.lines.size(); ++l)
    if (std::abs(res.flows_mw[l]) > net.lines[l].limit_mw + 1e-6)
      res.violations.push_back({int(l), res.flows_mw[l], net.lines[l].limit_mw});
  return res;
}

}  // namespace gridfreq
