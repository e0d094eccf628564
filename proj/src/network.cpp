#include "routing/network.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace routing {

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw std::invalid_argument("network: " + what);
}

}  // namespace

NetworkCongestionGame::NetworkCongestionGame(std::vector<std::string> nodes,
                                             std::vector<NetworkEdge> edges,
                                             std::vector<Commodity> commodities)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      commodities_(std::move(commodities)) {
  if (nodes_.empty()) bad("node list is empty");
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (nodes_[i].empty()) bad("node name is empty");
    if (!node_index_.emplace(nodes_[i], i).second)
      bad("duplicate node '" + nodes_[i] + "'");
  }
  adjacency_.resize(nodes_.size());
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const NetworkEdge& edge = edges_[e];
    if (edge.id.empty()) bad("edge id is empty");
    if (!edge_index_.emplace(edge.id, e).second)
      bad("duplicate edge '" + edge.id + "'");
    const auto from = node_index_.find(edge.from);
    const auto to = node_index_.find(edge.to);
    if (from == node_index_.end())
      bad("edge '" + edge.id + "' leaves unknown node '" + edge.from + "'");
    if (to == node_index_.end())
      bad("edge '" + edge.id + "' enters unknown node '" + edge.to + "'");
    if (from->second == to->second)
      bad("edge '" + edge.id + "' is a self-loop");
    adjacency_[from->second].push_back({to->second, e, 1.0});
  }
  if (commodities_.empty()) bad("commodity list is empty");
  const std::vector<double> unit(edges_.size(), 1.0);
  for (const Commodity& c : commodities_) {
    if (node_index_.find(c.source) == node_index_.end())
      bad("commodity source '" + c.source + "' is not a node");
    if (node_index_.find(c.sink) == node_index_.end())
      bad("commodity sink '" + c.sink + "' is not a node");
    if (c.source == c.sink) bad("commodity source equals sink");
    if (!(c.demand >= 0.0)) bad("commodity demand must be nonnegative");
    if (!shortest_path(c.source, c.sink, unit).reachable)
      bad("commodity sink '" + c.sink + "' unreachable from '" + c.source +
          "'");
  }
}

int NetworkCongestionGame::node_index(const std::string& name) const {
  const auto it = node_index_.find(name);
  return it == node_index_.end() ? -1 : it->second;
}

int NetworkCongestionGame::edge_index(const std::string& id) const {
  const auto it = edge_index_.find(id);
  return it == edge_index_.end() ? -1 : it->second;
}

double NetworkCongestionGame::total_demand() const {
  double total = 0.0;
  for (const Commodity& c : commodities_) total += c.demand;
  return total;
}

bool NetworkCongestionGame::single_source() const {
  for (const Commodity& c : commodities_)
    if (c.source != commodities_.front().source) return false;
  return true;
}

detail::PathResult NetworkCongestionGame::shortest_path(
    const std::string& source, const std::string& sink,
    const std::vector<double>& edge_costs) const {
  if (static_cast<int>(edge_costs.size()) != num_edges())
    bad("edge cost vector has wrong length");
  const int s = node_index(source);
  const int t = node_index(sink);
  if (s < 0) bad("unknown source node '" + source + "'");
  if (t < 0) bad("unknown sink node '" + sink + "'");
  std::vector<std::vector<detail::Arc>> adjacency = adjacency_;
  for (auto& arcs : adjacency)
    for (detail::Arc& arc : arcs) arc.cost = edge_costs[arc.edge];
  return detail::lex_dijkstra(adjacency, nodes_, s, t);
}

std::vector<std::vector<int>> NetworkCongestionGame::enumerate_paths(
    const std::string& source, const std::string& sink, int limit) const {
  const int s = node_index(source);
  const int t = node_index(sink);
  if (s < 0) bad("unknown source node '" + source + "'");
  if (t < 0) bad("unknown sink node '" + sink + "'");

  // Sort out-arcs by head node key so the DFS emits paths in lexicographic
  // node order.
  std::vector<std::vector<detail::Arc>> adjacency = adjacency_;
  for (auto& arcs : adjacency)
    std::sort(arcs.begin(), arcs.end(),
              [&](const detail::Arc& a, const detail::Arc& b) {
                return nodes_[a.to] < nodes_[b.to];
              });

  std::vector<std::vector<int>> paths;
  std::vector<int> stack;
  std::vector<bool> on_path(nodes_.size(), false);
  std::function<void(int)> dfs = [&](int u) {
    if (u == t) {
      if (static_cast<int>(paths.size()) >= limit)
        throw std::length_error("network: more than " +
                                std::to_string(limit) + " simple paths");
      paths.push_back(stack);
      return;
    }
    on_path[u] = true;
    for (const detail::Arc& arc : adjacency[u]) {
      if (on_path[arc.to]) continue;
      stack.push_back(arc.edge);
      dfs(arc.to);
      stack.pop_back();
    }
    on_path[u] = false;
  };
  dfs(s);
  return paths;
}

bool NetworkCongestionGame::is_path_disjoint(int limit) const {
  struct Endpoint {
    int source;
    int sink;
  };
  std::vector<std::vector<int>> all_paths;
  std::vector<Endpoint> endpoints;
  std::set<std::pair<std::string, std::string>> seen;
  for (const Commodity& c : commodities_) {
    if (!seen.emplace(c.source, c.sink).second) continue;
    for (auto& path : enumerate_paths(c.source, c.sink, limit)) {
      all_paths.push_back(std::move(path));
      endpoints.push_back({node_index(c.source), node_index(c.sink)});
    }
  }
  // Collect each path's interior nodes; two paths may legitimately meet only
  // at endpoints they share.
  std::vector<std::vector<int>> interiors(all_paths.size());
  for (size_t i = 0; i < all_paths.size(); ++i) {
    for (size_t j = 0; j < all_paths[i].size(); ++j) {
      const NetworkEdge& edge = edges_[all_paths[i][j]];
      if (j > 0) interiors[i].push_back(node_index(edge.from));
    }
    std::sort(interiors[i].begin(), interiors[i].end());
  }
  for (size_t i = 0; i < all_paths.size(); ++i) {
    for (size_t j = i + 1; j < all_paths.size(); ++j) {
      std::vector<int> common;
      std::set_intersection(interiors[i].begin(), interiors[i].end(),
                            interiors[j].begin(), interiors[j].end(),
                            std::back_inserter(common));
      for (int v : common) {
        const bool endpoint_of_both =
            (v == endpoints[i].source || v == endpoints[i].sink) &&
            (v == endpoints[j].source || v == endpoints[j].sink);
        if (!endpoint_of_both) return false;
      }
    }
  }
  return true;
}

CongestionGame NetworkCongestionGame::explicit_game(int max_paths) const {
  std::vector<std::string> ids;
  std::vector<LatencyFunction> latencies;
  ids.reserve(edges_.size());
  latencies.reserve(edges_.size());
  for (const NetworkEdge& edge : edges_) {
    ids.push_back(edge.id);
    latencies.push_back(edge.latency);
  }
  std::vector<PlayerType> types;
  int budget = max_paths;
  for (const Commodity& c : commodities_) {
    auto paths = enumerate_paths(c.source, c.sink, budget);
    budget -= static_cast<int>(paths.size());
    PlayerType type;
    type.demand = c.demand;
    for (auto& path : paths) {
      std::sort(path.begin(), path.end());
      type.strategies.push_back(std::move(path));
    }
    types.push_back(std::move(type));
  }
  return CongestionGame(ids, latencies, types);
}

}  // namespace routing
