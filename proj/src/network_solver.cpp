#include "routing/network_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace routing {

namespace {

constexpr int kMaxOuterRounds = 100;

// Column-generation state: per-commodity discovered paths, stored both in
// traversal order (for reporting) and as sorted edge sets (as strategies).
struct PathSets {
  std::vector<std::vector<std::vector<int>>> ordered;  // per commodity
  std::vector<std::set<std::vector<int>>> known;       // sorted, for dedup

  explicit PathSets(int commodities)
      : ordered(commodities), known(commodities) {}

  bool add(int commodity, const std::vector<int>& path) {
    std::vector<int> sorted = path;
    std::sort(sorted.begin(), sorted.end());
    if (!known[commodity].insert(std::move(sorted)).second) return false;
    ordered[commodity].push_back(path);
    return true;
  }
};

CongestionGame freeze(const NetworkCongestionGame& network,
                      const PathSets& sets) {
  std::vector<std::string> ids;
  std::vector<LatencyFunction> latencies;
  for (const NetworkEdge& edge : network.edges()) {
    ids.push_back(edge.id);
    latencies.push_back(edge.latency);
  }
  std::vector<PlayerType> types;
  for (int i = 0; i < network.num_commodities(); ++i) {
    PlayerType type;
    type.demand = network.commodities()[i].demand;
    for (const auto& path : sets.ordered[i]) {
      std::vector<int> strategy = path;
      std::sort(strategy.begin(), strategy.end());
      type.strategies.push_back(std::move(strategy));
    }
    types.push_back(std::move(type));
  }
  return CongestionGame(std::move(ids), std::move(latencies),
                        std::move(types));
}

std::vector<double> edge_cost_vector(const NetworkCongestionGame& network,
                                     const Eigen::VectorXd& loads,
                                     bool marginal) {
  std::vector<double> costs(network.num_edges());
  for (int e = 0; e < network.num_edges(); ++e) {
    const LatencyFunction& latency = network.edges()[e].latency;
    costs[e] = marginal ? latency.marginal(loads[e]) : latency(loads[e]);
  }
  return costs;
}

PathSolution solve_paths(const NetworkCongestionGame& network,
                         const SolveOptions& options, bool marginal) {
  PathSets sets(network.num_commodities());

  // Seed every commodity with its free-flow cheapest path.
  const std::vector<double> free_flow =
      edge_cost_vector(network, Eigen::VectorXd::Zero(network.num_edges()),
                       marginal);
  for (int i = 0; i < network.num_commodities(); ++i) {
    const Commodity& commodity = network.commodities()[i];
    const auto seed =
        network.shortest_path(commodity.source, commodity.sink, free_flow);
    // Reachability was validated at construction.
    sets.add(i, seed.edges);
  }

  long total_iterations = 0;
  for (int round = 0; round < kMaxOuterRounds; ++round) {
    CongestionGame game = freeze(network, sets);
    SolveReport inner = marginal ? solve_optimum(game, options)
                                 : solve_equilibrium(game, options);
    total_iterations += inner.iterations;

    // Certify against the whole path polytope: compare carried path costs
    // with the true cheapest path under the current loads, both priced with
    // the objective's weights (marginal costs for optimum solves).
    const Eigen::VectorXd loads = edge_loads(game, inner.profile);
    const std::vector<double> edge_costs =
        edge_cost_vector(network, loads, marginal);
    Eigen::VectorXd costs(game.num_strategies());
    {
      int flat = 0;
      for (int i = 0; i < game.num_types(); ++i) {
        for (const auto& strategy : game.type(i).strategies) {
          double total = 0.0;
          for (int e : strategy) total += edge_costs[e];
          costs[flat++] = total;
        }
      }
    }

    double numerator = 0.0;
    double denominator = 0.0;
    std::vector<std::vector<int>> best_paths(network.num_commodities());
    for (int i = 0; i < network.num_commodities(); ++i) {
      const Commodity& commodity = network.commodities()[i];
      const auto best = network.shortest_path(commodity.source,
                                              commodity.sink, edge_costs);
      const int offset = game.strategy_offset(i);
      const int count = static_cast<int>(game.type(i).strategies.size());
      for (int s = 0; s < count; ++s)
        numerator += inner.profile(i, s) *
                     std::max(costs[offset + s] - best.distance, 0.0);
      denominator += commodity.demand * (1.0 + best.distance);
      best_paths[i] = best.edges;
    }
    const double true_gap = numerator / std::max(denominator, 1e-15);

    bool discovered = false;
    if (true_gap > options.tol && inner.converged)
      for (int i = 0; i < network.num_commodities(); ++i)
        discovered |= sets.add(i, best_paths[i]);

    if (true_gap <= options.tol || !discovered || !inner.converged) {
      // The working set matches `game` here: new paths are only folded in
      // when another round actually runs.
      PathSolution solution{std::move(game), {}, std::move(inner)};
      for (const auto& commodity_paths : sets.ordered)
        for (const auto& path : commodity_paths)
          solution.paths.push_back(path);
      solution.report.wardrop_gap = true_gap;
      solution.report.converged =
          solution.report.converged && true_gap <= options.tol;
      solution.report.iterations = total_iterations;
      return solution;
    }
  }
  throw convergence_error(
      "network solve kept discovering paths without certifying the gap");
}

}  // namespace

PathSolution solve_equilibrium_paths(const NetworkCongestionGame& network,
                                     const SolveOptions& options) {
  return solve_paths(network, options, /*marginal=*/false);
}

PathSolution solve_optimum_paths(const NetworkCongestionGame& network,
                                 const SolveOptions& options) {
  return solve_paths(network, options, /*marginal=*/true);
}

NetworkPoAReport network_price_of_anarchy(const NetworkCongestionGame& network,
                                          double tol) {
  SolveOptions options;
  options.tol = tol;
  PathSolution eq = solve_equilibrium_paths(network, options);
  if (!eq.report.converged)
    throw convergence_error("network equilibrium solve did not converge");
  PathSolution opt = solve_optimum_paths(network, options);
  if (!opt.report.converged)
    throw convergence_error("network optimum solve did not converge");
  const double eq_cost = total_latency(eq.path_game, eq.report.profile);
  const double opt_cost = total_latency(opt.path_game, opt.report.profile);
  const double ratio = opt_cost > 1e-15 ? eq_cost / opt_cost : 1.0;
  return NetworkPoAReport{eq_cost, opt_cost, ratio, std::move(eq),
                          std::move(opt)};
}

}  // namespace routing
