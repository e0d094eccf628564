#include "routing/dijkstra.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace routing::detail {

namespace {

// Node-key sequence of the tentative path to `node`, reconstructed from
// parent pointers. Paths are short relative to graph size, so rebuilding on
// demand beats storing every sequence.
std::vector<const std::string*> key_sequence(
    const std::vector<int>& parent_node,
    const std::vector<std::string>& node_keys, int node) {
  std::vector<const std::string*> seq;
  for (int v = node; v >= 0; v = parent_node[v]) seq.push_back(&node_keys[v]);
  std::reverse(seq.begin(), seq.end());
  return seq;
}

bool lex_less(const std::vector<const std::string*>& a,
              const std::vector<const std::string*>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const std::string* x, const std::string* y) { return *x < *y; });
}

}  // namespace

PathResult lex_dijkstra(const std::vector<std::vector<Arc>>& adjacency,
                        const std::vector<std::string>& node_keys, int source,
                        int target) {
  const int n = static_cast<int>(adjacency.size());
  if (source < 0 || source >= n || target < 0 || target >= n)
    throw std::invalid_argument("dijkstra: node index out of range");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> parent_node(n, -1), parent_edge(n, -1);
  std::vector<bool> settled(n, false);

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);

  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (settled[u] || d > dist[u]) continue;
    settled[u] = true;
    if (u == target) break;
    for (const Arc& arc : adjacency[u]) {
      if (arc.cost < 0.0)
        throw std::invalid_argument("dijkstra: negative arc cost");
      const double nd = d + arc.cost;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        parent_node[arc.to] = u;
        parent_edge[arc.to] = arc.edge;
        queue.emplace(nd, arc.to);
      } else if (nd == dist[arc.to] && !settled[arc.to]) {
        auto candidate = key_sequence(parent_node, node_keys, u);
        candidate.push_back(&node_keys[arc.to]);
        const auto incumbent =
            key_sequence(parent_node, node_keys, arc.to);
        if (lex_less(candidate, incumbent)) {
          parent_node[arc.to] = u;
          parent_edge[arc.to] = arc.edge;
        }
      }
    }
  }

  PathResult result;
  if (dist[target] == inf) return result;
  result.reachable = true;
  result.distance = dist[target];
  for (int v = target; v != source; v = parent_node[v])
    result.edges.push_back(parent_edge[v]);
  std::reverse(result.edges.begin(), result.edges.end());
  for (int v = target; v >= 0; v = parent_node[v]) result.nodes.push_back(v);
  std::reverse(result.nodes.begin(), result.nodes.end());
  return result;
}

}  // namespace routing::detail
