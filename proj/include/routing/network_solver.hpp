#pragma once

#include <vector>

#include "routing/network.hpp"
#include "routing/solver.hpp"

namespace routing {

// A solved network flow restricted to the paths discovered during column
// generation. `path_game` has one resource per network edge and one
// strategy per discovered path; `paths[k]` is the edge sequence (traversal
// order) behind flat strategy index k; `report.profile` lives on that game.
// The report's wardrop_gap is measured against the full path polytope via
// shortest-path queries, not just the discovered paths.
struct PathSolution {
  CongestionGame path_game;
  std::vector<std::vector<int>> paths;
  SolveReport report;
};

// Equilibrium on a network: conditional gradient over commodity paths, with
// the per-iteration cheapest path supplied by Dijkstra and new paths folded
// into the working set as they are discovered.
PathSolution solve_equilibrium_paths(const NetworkCongestionGame& network,
                                     const SolveOptions& options = {});

// Social optimum on a network: same scheme driven by marginal edge costs.
PathSolution solve_optimum_paths(const NetworkCongestionGame& network,
                                 const SolveOptions& options = {});

// Both network solves side by side; ratio = eq_cost / opt_cost of total
// latency over network edges.
struct NetworkPoAReport {
  double eq_cost = 0.0;
  double opt_cost = 0.0;
  double ratio = 1.0;
  PathSolution eq;
  PathSolution opt;
};

// Throws convergence_error when either solve fails to certify `tol`.
NetworkPoAReport network_price_of_anarchy(const NetworkCongestionGame& network,
                                          double tol = 1e-8);

}  // namespace routing
