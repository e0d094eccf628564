#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "routing/dijkstra.hpp"
#include "routing/game.hpp"
#include "routing/latency.hpp"

namespace routing {

// One directed road segment. Flow on an edge is shared by every path that
// uses it, regardless of which commodity the path serves.
struct NetworkEdge {
  std::string id;
  std::string from;
  std::string to;
  LatencyFunction latency;
};

// Demand that must be routed from `source` to `sink`.
struct Commodity {
  std::string source;
  std::string sink;
  double demand = 0.0;
};

// A routing game on a directed graph. Strategies are simple source-sink
// paths; they are not materialized up front because realistic graphs have
// exponentially many. Use shortest_path() for best response queries and
// explicit_game() to freeze a chosen path set into a CongestionGame.
class NetworkCongestionGame {
 public:
  NetworkCongestionGame(std::vector<std::string> nodes,
                        std::vector<NetworkEdge> edges,
                        std::vector<Commodity> commodities);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_commodities() const { return static_cast<int>(commodities_.size()); }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<NetworkEdge>& edges() const { return edges_; }
  const std::vector<Commodity>& commodities() const { return commodities_; }

  // Index lookups return -1 when the name is unknown.
  int node_index(const std::string& name) const;
  int edge_index(const std::string& id) const;

  double total_demand() const;

  // True when every commodity departs from the same source node.
  bool single_source() const;

  // Cheapest simple path from `source` to `sink` under the given per-edge
  // costs (one entry per edge, same order as edges()). Equal-cost ties are
  // broken toward the lexicographically smallest node sequence so repeated
  // calls are deterministic. Costs must be nonnegative.
  detail::PathResult shortest_path(const std::string& source,
                                   const std::string& sink,
                                   const std::vector<double>& edge_costs) const;

  // All simple paths from `source` to `sink` as edge-index sequences, in
  // lexicographic node order. Stops and throws std::length_error once more
  // than `limit` paths exist; keep the limit small on dense graphs.
  std::vector<std::vector<int>> enumerate_paths(const std::string& source,
                                                const std::string& sink,
                                                int limit = 10000) const;

  // True when, across the union of all commodities' simple paths, no two
  // distinct paths share a node other than a common source or sink.
  // Enumerates paths internally, so the same `limit` caveat applies.
  bool is_path_disjoint(int limit = 10000) const;

  // Materialize a CongestionGame whose resources are the edges and whose
  // strategies are the enumerated simple paths of each commodity (at most
  // `max_paths` in total across commodities).
  CongestionGame explicit_game(int max_paths = 10000) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<NetworkEdge> edges_;
  std::vector<Commodity> commodities_;
  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> edge_index_;
  std::vector<std::vector<detail::Arc>> adjacency_;  // unit-cost template
};

}  // namespace routing
