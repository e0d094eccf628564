#include "routing/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace routing {

namespace {

constexpr double kDenominatorGuard = 1e-15;

FlowProfile initial_profile(const CongestionGame& game,
                            const SolveOptions& options) {
  switch (options.init) {
    case InitialProfile::FirstStrategy:
      return FlowProfile::single(game,
                                 std::vector<int>(game.num_types(), 0));
    case InitialProfile::Random: {
      std::mt19937_64 rng(options.seed);
      std::uniform_real_distribution<double> uniform(0.1, 1.0);
      Eigen::VectorXd flat(game.num_strategies());
      for (int i = 0; i < game.num_types(); ++i) {
        const int offset = game.strategy_offset(i);
        const int count = static_cast<int>(game.type(i).strategies.size());
        double sum = 0.0;
        for (int s = 0; s < count; ++s) {
          flat[offset + s] = uniform(rng);
          sum += flat[offset + s];
        }
        for (int s = 0; s < count; ++s)
          flat[offset + s] *= game.type(i).demand / sum;
      }
      return FlowProfile(game, std::move(flat));
    }
    case InitialProfile::Uniform:
      break;
  }
  return FlowProfile::uniform(game);
}

// Weights driving the linearized subproblem: plain latencies for the
// potential (equilibrium), marginal costs for total latency (optimum).
Eigen::VectorXd edge_weights(const CongestionGame& game,
                             const Eigen::VectorXd& loads, bool marginal) {
  Eigen::VectorXd weights(game.num_resources());
  for (int e = 0; e < game.num_resources(); ++e)
    weights[e] = marginal ? game.latency(e).marginal(loads[e])
                          : game.latency(e)(loads[e]);
  return weights;
}

double objective_value(const CongestionGame& game,
                       const Eigen::VectorXd& loads, bool marginal) {
  double value = 0.0;
  for (int e = 0; e < game.num_resources(); ++e)
    value += marginal ? loads[e] * game.latency(e)(loads[e])
                      : game.latency(e).antiderivative(loads[e]);
  return value;
}

struct GapInfo {
  double normalized = 0.0;
  double absolute = 0.0;           // c.x - sum_i r_i min_i
  double away_total = 0.0;         // sum_i r_i c_{worst active strategy}
  double current_total = 0.0;      // c.x
  std::vector<int> best;           // per-type cheapest strategy
  std::vector<int> worst_active;   // per-type costliest carrying strategy
};

// One sweep over strategy costs: duality gap, its normalization, and the
// per-type best / worst-active strategies used as step directions.
GapInfo measure_gap(const CongestionGame& game, const Eigen::VectorXd& flow,
                    const Eigen::VectorXd& costs) {
  GapInfo info;
  info.best.assign(game.num_types(), 0);
  info.worst_active.assign(game.num_types(), 0);
  double denominator = 0.0;
  for (int i = 0; i < game.num_types(); ++i) {
    const double demand = game.type(i).demand;
    const int offset = game.strategy_offset(i);
    const int count = static_cast<int>(game.type(i).strategies.size());
    int best = 0;
    int worst = -1;
    for (int s = 0; s < count; ++s) {
      const double cost = costs[offset + s];
      if (cost < costs[offset + best]) best = s;
      if (flow[offset + s] > 1e-12 * std::max(demand, 1.0) &&
          (worst < 0 || cost > costs[offset + worst]))
        worst = s;
    }
    info.best[i] = best;
    info.worst_active[i] = worst < 0 ? best : worst;
    if (demand <= 0.0) continue;
    for (int s = 0; s < count; ++s)
      info.current_total += flow[offset + s] * costs[offset + s];
    info.absolute -= demand * costs[offset + best];
    info.away_total += demand * costs[offset + info.worst_active[i]];
    denominator += demand * (1.0 + costs[offset + best]);
  }
  info.absolute += info.current_total;
  info.normalized = info.absolute / std::max(denominator, kDenominatorGuard);
  return info;
}

// Clamp stray negatives and restore exact per-type conservation.
void project_feasible(const CongestionGame& game, Eigen::VectorXd& flow) {
  for (int i = 0; i < game.num_types(); ++i) {
    const double demand = game.type(i).demand;
    const int offset = game.strategy_offset(i);
    const int count = static_cast<int>(game.type(i).strategies.size());
    double sum = 0.0;
    for (int s = 0; s < count; ++s) {
      if (flow[offset + s] < 0.0) flow[offset + s] = 0.0;
      sum += flow[offset + s];
    }
    if (sum <= 0.0) {
      for (int s = 0; s < count; ++s) flow[offset + s] = 0.0;
      flow[offset] = demand;
    } else if (sum != demand) {
      const double scale = demand / sum;
      for (int s = 0; s < count; ++s) flow[offset + s] *= scale;
    }
  }
}

// Exact line search: phi(t) is convex on [0, limit], so its derivative
//   phi'(t) = sum_e w_e(load_e + t d_e) d_e
// is nondecreasing; bisect for the root.
double line_search(const CongestionGame& game, const Eigen::VectorXd& loads,
                   const Eigen::VectorXd& dloads, double limit,
                   bool marginal) {
  std::vector<int> support;
  for (int e = 0; e < game.num_resources(); ++e)
    if (dloads[e] != 0.0) support.push_back(e);
  const auto slope = [&](double t) {
    double value = 0.0;
    for (int e : support) {
      const double load = loads[e] + t * dloads[e];
      value += (marginal ? game.latency(e).marginal(load)
                         : game.latency(e)(load)) *
               dloads[e];
    }
    return value;
  };
  if (slope(0.0) >= 0.0) return 0.0;
  if (slope(limit) <= 0.0) return limit;
  double lo = 0.0;
  double hi = limit;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SolveReport run_conditional_gradient(const CongestionGame& game,
                                     const SolveOptions& options,
                                     bool marginal) {
  if (!(options.tol > 0.0))
    throw std::invalid_argument("solver: tol must be positive");
  if (options.max_iters < 1)
    throw std::invalid_argument("solver: max_iters must be positive");

  const Eigen::SparseMatrix<double> incidence = strategy_incidence(game);
  Eigen::VectorXd flow = initial_profile(game, options).flat();
  Eigen::VectorXd loads = incidence * flow;

  long iterations = 0;
  bool converged = false;
  double last_gap = std::numeric_limits<double>::infinity();

  for (; iterations < options.max_iters; ++iterations) {
    const Eigen::VectorXd weights = edge_weights(game, loads, marginal);
    const Eigen::VectorXd costs = incidence.transpose() * weights;
    GapInfo gap = measure_gap(game, flow, costs);
    if (gap.normalized <= options.tol) {
      // Replayed on exactly recomputed loads before declaring success, since
      // the incremental load updates can drift.
      loads = incidence * flow;
      const Eigen::VectorXd exact_costs =
          incidence.transpose() * edge_weights(game, loads, marginal);
      gap = measure_gap(game, flow, exact_costs);
      if (gap.normalized <= options.tol) {
        last_gap = gap.normalized;
        converged = true;
        break;
      }
    }
    last_gap = gap.normalized;

    // Toward-vertex direction: each type moves onto its cheapest strategy.
    // Away direction: each type moves off its costliest carrying strategy.
    // Pick the one with the larger first-order improvement.
    const double toward_gain = gap.absolute;
    const double away_gain = gap.away_total - gap.current_total;
    double away_limit = std::numeric_limits<double>::infinity();
    for (int i = 0; i < game.num_types(); ++i) {
      const double demand = game.type(i).demand;
      if (demand <= 0.0) continue;
      const double carrying =
          flow[game.strategy_offset(i) + gap.worst_active[i]];
      if (carrying < demand)
        away_limit = std::min(away_limit, carrying / (demand - carrying));
    }
    const bool use_away = away_gain > toward_gain &&
                          away_limit > 0.0 &&
                          std::isfinite(away_limit);

    Eigen::VectorXd direction = -flow;
    if (use_away) direction = flow;
    for (int i = 0; i < game.num_types(); ++i) {
      const double demand = game.type(i).demand;
      if (demand <= 0.0) {
        direction.segment(game.strategy_offset(i),
                          game.type(i).strategies.size()).setZero();
        continue;
      }
      const int target = use_away ? gap.worst_active[i] : gap.best[i];
      direction[game.strategy_offset(i) + target] +=
          use_away ? -demand : demand;
    }

    const Eigen::VectorXd dloads = incidence * direction;
    const double limit = use_away ? away_limit : 1.0;
    const double step =
        line_search(game, loads, dloads, limit, marginal);
    if (step <= 0.0) break;  // no descent left at this precision

    flow += step * direction;
    project_feasible(game, flow);
    loads += step * dloads;
    if ((iterations + 1) % 1000 == 0) loads = incidence * flow;
  }

  loads = incidence * flow;
  SolveReport report{FlowProfile(game, flow),
                     objective_value(game, loads, marginal), last_gap,
                     iterations, converged};
  if (!converged) {
    // Final honest gap measurement for the report.
    const Eigen::VectorXd costs =
        incidence.transpose() * edge_weights(game, loads, marginal);
    report.wardrop_gap =
        measure_gap(game, report.profile.flat(), costs).normalized;
    report.converged = report.wardrop_gap <= options.tol;
  }
  return report;
}

// Composition enumeration shared by the brute-force oracle: visit every way
// of splitting `resolution` grid steps across `parts`.
void for_each_composition(int parts, int resolution,
                          std::vector<int>& counts,
                          const std::function<void()>& visit, int part = 0,
                          int remaining = -1) {
  if (remaining < 0) remaining = resolution;
  if (part == parts - 1) {
    counts[part] = remaining;
    visit();
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    counts[part] = c;
    for_each_composition(parts, resolution, counts, visit, part + 1,
                         remaining - c);
  }
}

double composition_count(int parts, int resolution) {
  double count = 1.0;
  for (int j = 1; j < parts; ++j)
    count *= static_cast<double>(resolution + j) / j;
  return count;
}

}  // namespace

SolveReport solve_equilibrium(const CongestionGame& game,
                              const SolveOptions& options) {
  return run_conditional_gradient(game, options, /*marginal=*/false);
}

SolveReport solve_equilibrium(const CongestionGame& game, double tol,
                              long max_iters) {
  SolveOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  return solve_equilibrium(game, options);
}

SolveReport solve_optimum(const CongestionGame& game,
                          const SolveOptions& options) {
  SolveReport report = run_conditional_gradient(game, options,
                                                /*marginal=*/true);
  return report;
}

SolveReport solve_optimum(const CongestionGame& game, double tol,
                          long max_iters) {
  SolveOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  return solve_optimum(game, options);
}

double wardrop_gap(const CongestionGame& game, const FlowProfile& profile) {
  if (!profile.conserves(game))
    throw std::invalid_argument("wardrop_gap: profile violates conservation");
  const Eigen::VectorXd loads = edge_loads(game, profile);
  const Eigen::VectorXd costs = strategy_costs(game, loads);
  double numerator = 0.0;
  double denominator = 0.0;
  for (int i = 0; i < game.num_types(); ++i) {
    const int offset = game.strategy_offset(i);
    const int count = static_cast<int>(game.type(i).strategies.size());
    double minimum = costs[offset];
    for (int s = 1; s < count; ++s)
      minimum = std::min(minimum, costs[offset + s]);
    for (int s = 0; s < count; ++s)
      numerator += profile(i, s) * (costs[offset + s] - minimum);
    denominator += game.type(i).demand * (1.0 + minimum);
  }
  return numerator / std::max(denominator, kDenominatorGuard);
}

PoAReport price_of_anarchy(const CongestionGame& game, double tol) {
  SolveOptions options;
  options.tol = tol;
  SolveReport eq = solve_equilibrium(game, options);
  if (!eq.converged)
    throw convergence_error("equilibrium solve did not reach tolerance");
  SolveReport opt = solve_optimum(game, options);
  if (!opt.converged)
    throw convergence_error("optimum solve did not reach tolerance");
  PoAReport report{total_latency(game, eq.profile),
                   total_latency(game, opt.profile), 1.0, std::move(eq),
                   std::move(opt)};
  report.ratio = report.opt_cost > kDenominatorGuard
                     ? report.eq_cost / report.opt_cost
                     : 1.0;
  return report;
}

PoAReport brute_force_poa(const CongestionGame& game, int grid_resolution) {
  if (grid_resolution < 1)
    throw std::invalid_argument("brute force: resolution must be positive");
  if (game.num_strategies() > 6)
    throw std::invalid_argument(
        "brute force: instance too large (more than 6 strategies)");
  double total_points = 1.0;
  for (int i = 0; i < game.num_types(); ++i)
    total_points *= composition_count(
        static_cast<int>(game.type(i).strategies.size()), grid_resolution);
  if (total_points > 4e8)
    throw std::invalid_argument("brute force: grid too large");

  const int resolution = grid_resolution;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_gap_sum = std::numeric_limits<double>::infinity();
  double best_sum = std::numeric_limits<double>::infinity();
  Eigen::VectorXd eq_flow(game.num_strategies());
  Eigen::VectorXd opt_flow(game.num_strategies());

  if (game.num_types() == 1 && game.is_parallel_link()) {
    // Fast path: precompute per-link latency and load*latency tables, then
    // walk the compositions with O(#links) work per point.
    const double demand = game.type(0).demand;
    const int links = static_cast<int>(game.type(0).strategies.size());
    std::vector<std::vector<double>> latency_at(links),
        weighted_at(links);
    for (int j = 0; j < links; ++j) {
      const int edge = game.type(0).strategies[j][0];
      latency_at[j].resize(resolution + 1);
      weighted_at[j].resize(resolution + 1);
      for (int c = 0; c <= resolution; ++c) {
        const double load = demand * c / resolution;
        latency_at[j][c] = game.latency(edge)(load);
        weighted_at[j][c] = load * latency_at[j][c];
      }
    }
    std::vector<int> counts(links, 0);
    std::vector<int> eq_counts(links, 0), opt_counts(links, 0);
    for_each_composition(links, resolution, counts, [&] {
      double sum = 0.0;
      double cheapest = std::numeric_limits<double>::infinity();
      for (int j = 0; j < links; ++j) {
        sum += weighted_at[j][counts[j]];
        cheapest = std::min(cheapest, latency_at[j][counts[j]]);
      }
      const double gap = (sum - demand * cheapest) /
                         std::max(demand * (1.0 + cheapest),
                                  kDenominatorGuard);
      if (gap < best_gap) {
        best_gap = gap;
        best_gap_sum = sum;
        eq_counts = counts;
      }
      if (sum < best_sum) {
        best_sum = sum;
        opt_counts = counts;
      }
    });
    for (int j = 0; j < links; ++j) {
      eq_flow[j] = demand * eq_counts[j] / resolution;
      opt_flow[j] = demand * opt_counts[j] / resolution;
    }
  } else {
    // Generic path: recurse over types, each type over its compositions.
    std::vector<std::vector<int>> counts(game.num_types());
    for (int i = 0; i < game.num_types(); ++i)
      counts[i].assign(game.type(i).strategies.size(), 0);
    Eigen::VectorXd flow(game.num_strategies());
    std::function<void(int)> recurse = [&](int type) {
      if (type == game.num_types()) {
        const FlowProfile profile(game, flow);
        const double sum = total_latency(game, profile);
        const double gap = wardrop_gap(game, profile);
        if (gap < best_gap) {
          best_gap = gap;
          best_gap_sum = sum;
          eq_flow = flow;
        }
        if (sum < best_sum) {
          best_sum = sum;
          opt_flow = flow;
        }
        return;
      }
      const int parts = static_cast<int>(game.type(type).strategies.size());
      const double demand = game.type(type).demand;
      for_each_composition(parts, resolution, counts[type], [&] {
        for (int s = 0; s < parts; ++s)
          flow[game.strategy_offset(type) + s] =
              demand * counts[type][s] / resolution;
        recurse(type + 1);
      });
    };
    recurse(0);
  }

  FlowProfile eq_profile(game, eq_flow);
  FlowProfile opt_profile(game, opt_flow);
  const Eigen::VectorXd eq_loads = edge_loads(game, eq_profile);
  const double opt_gap = wardrop_gap(game, opt_profile);
  const double ratio =
      best_sum > kDenominatorGuard ? best_gap_sum / best_sum : 1.0;
  return PoAReport{
      best_gap_sum, best_sum, ratio,
      SolveReport{std::move(eq_profile),
                  objective_value(game, eq_loads, false), best_gap, 0, true},
      SolveReport{std::move(opt_profile), best_sum, opt_gap, 0, true}};
}

}  // namespace routing
