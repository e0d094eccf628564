#pragma once

#include <string>
#include <vector>

namespace routing::detail {

// One outgoing arc of a node as seen by the shortest-path routine.
struct Arc {
  int to;
  int edge;  // caller-side edge index, echoed back in the result
  double cost;
};

struct PathResult {
  bool reachable = false;
  double distance = 0.0;
  std::vector<int> edges;  // edge indices along the path, in order
  std::vector<int> nodes;  // node sequence including endpoints
};

// Label-setting shortest path over nonnegative arc costs. Equal-cost ties are
// broken toward the lexicographically smallest node-key sequence, so the
// returned path is deterministic regardless of adjacency order.
PathResult lex_dijkstra(const std::vector<std::vector<Arc>>& adjacency,
                        const std::vector<std::string>& node_keys, int source,
                        int target);

}  // namespace routing::detail
