#pragma once

#include "routing/errors.hpp"
#include "routing/game.hpp"

namespace routing {

// Starting point for the iterative solves. Uniform spreads each demand
// evenly, FirstStrategy concentrates it on the first strategy, Random draws
// a seeded random split (useful for essential-uniqueness checks).
enum class InitialProfile { Uniform, FirstStrategy, Random };

struct SolveOptions {
  double tol = 1e-8;        // normalized duality-gap target
  long max_iters = 200000;  // conditional-gradient iteration budget
  InitialProfile init = InitialProfile::Uniform;
  unsigned seed = 0;        // used by InitialProfile::Random
};

// Outcome of one convex solve. `objective` is the minimized quantity: the
// congestion potential for equilibrium solves, total latency for optimum
// solves. `wardrop_gap` is the normalized linearized-subproblem gap at the
// returned profile — the equilibrium-condition violation for equilibrium
// solves, the optimality certificate for optimum solves.
struct SolveReport {
  FlowProfile profile;
  double objective = 0.0;
  double wardrop_gap = 0.0;
  long iterations = 0;
  bool converged = false;
};

// Equilibrium flow: minimizes the potential sum_e integral_0^{k_e} l_e. On
// convergence, every strategy carrying more than 10 * tol * r_i flow costs
// at most min + tol * (1 + min) within its type. Non-convergence is
// reported via converged=false, never thrown.
SolveReport solve_equilibrium(const CongestionGame& game,
                              const SolveOptions& options = {});
SolveReport solve_equilibrium(const CongestionGame& game, double tol,
                              long max_iters);

// Social optimum: minimizes sum_e k_e l_e(k_e) via marginal costs
// l_e(x) + x l'_e(x) (convex for nonnegative-coefficient polynomials).
SolveReport solve_optimum(const CongestionGame& game,
                          const SolveOptions& options = {});
SolveReport solve_optimum(const CongestionGame& game, double tol,
                          long max_iters);

// Normalized equilibrium violation of a feasible profile:
//
//   sum_i sum_S sigma_{i,S} (c_S - min_i) / max(sum_i r_i (1 + min_i), 1e-15)
//
// where min_i is type i's cheapest strategy cost under the profile's loads.
// Zero exactly at equilibria. Throws std::invalid_argument when the profile
// does not conserve demands.
double wardrop_gap(const CongestionGame& game, const FlowProfile& profile);

// Equilibrium and optimum solves side by side; ratio = eq_cost / opt_cost.
struct PoAReport {
  double eq_cost = 0.0;
  double opt_cost = 0.0;
  double ratio = 1.0;
  SolveReport eq;
  SolveReport opt;
};

// Price of anarchy via the two converged solves. Throws convergence_error
// when either solve fails to reach `tol`.
PoAReport price_of_anarchy(const CongestionGame& game, double tol = 1e-8);

// Exhaustive grid oracle for tiny instances: each type's demand is split
// into grid_resolution equal steps and every composition is examined. The
// equilibrium report carries the minimum-gap profile, the optimum report
// the minimum-SUM profile. Throws std::invalid_argument when the game has
// more than 6 strategies in total or the grid would exceed ~4e8 points.
PoAReport brute_force_poa(const CongestionGame& game, int grid_resolution);

}  // namespace routing
