#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "routing/latency.hpp"

namespace routing {

// One population of infinitesimal players: `demand` units of flow to be split
// across `strategies`, each strategy a subset of resource indices.
struct PlayerType {
  double demand = 0.0;
  std::vector<std::vector<int>> strategies;
};

// Non-atomic congestion game with explicit strategy sets.
class CongestionGame {
 public:
  // Throws std::invalid_argument on: duplicate/empty resource ids, size
  // mismatch, negative demand, empty strategy lists/strategies, out-of-range
  // or duplicate resources inside a strategy. Strategies are stored sorted.
  CongestionGame(std::vector<std::string> resource_ids,
                 std::vector<LatencyFunction> latencies,
                 std::vector<PlayerType> types);

  // Single population of `demand` choosing among the given links.
  static CongestionGame parallel_links(std::vector<LatencyFunction> latencies,
                                       double demand);

  int num_resources() const { return static_cast<int>(latencies_.size()); }
  int num_types() const { return static_cast<int>(types_.size()); }
  const std::string& resource_id(int e) const { return resource_ids_[e]; }
  int resource_index(const std::string& id) const;  // -1 when unknown
  const LatencyFunction& latency(int e) const { return latencies_[e]; }
  const std::vector<LatencyFunction>& latencies() const { return latencies_; }
  const PlayerType& type(int i) const { return types_[i]; }
  const std::vector<PlayerType>& types() const { return types_; }

  // Strategies of all types flattened into one index range; offset(i) is the
  // flat index of type i's first strategy.
  int num_strategies() const { return offsets_.back(); }
  int strategy_offset(int i) const { return offsets_[i]; }

  double total_demand() const;
  bool is_load_balancing() const;  // every strategy is a singleton
  bool is_parallel_link() const;   // load-balancing + shared strategy set

 private:
  std::vector<std::string> resource_ids_;
  std::vector<LatencyFunction> latencies_;
  std::vector<PlayerType> types_;
  std::vector<int> offsets_;
};

// Flow split sigma_{i,S}, stored flat in the game's strategy order.
class FlowProfile {
 public:
  FlowProfile(const CongestionGame& game, Eigen::VectorXd flat);

  static FlowProfile zeros(const CongestionGame& game);
  // r_i spread evenly over type i's strategies.
  static FlowProfile uniform(const CongestionGame& game);
  // All of r_i on strategy choice[i].
  static FlowProfile single(const CongestionGame& game,
                            const std::vector<int>& choice);

  double operator()(int type, int strategy) const {
    return flat_[offsets_[type] + strategy];
  }
  const Eigen::VectorXd& flat() const { return flat_; }

  // Per-type conservation |sum_S sigma_{i,S} - r_i| <= tol.
  bool conserves(const CongestionGame& game, double tol = 1e-9) const;

 private:
  Eigen::VectorXd flat_;
  std::vector<int> offsets_;
};

// Load k_e = sum of flow over strategies containing e; indexed by resource.
Eigen::VectorXd edge_loads(const CongestionGame& game,
                           const FlowProfile& profile);

// l_e(k_e) for every resource.
Eigen::VectorXd resource_latencies(const CongestionGame& game,
                                   const Eigen::VectorXd& loads);

// Flat vector of strategy costs c_S = sum_{e in S} l_e(k_e) at given loads.
Eigen::VectorXd strategy_costs(const CongestionGame& game,
                               const Eigen::VectorXd& loads);

// Cost of one strategy under `profile`; throws std::out_of_range on a bad
// (type, strategy) index.
double strategy_cost(const CongestionGame& game, const FlowProfile& profile,
                     int type, int strategy);

// SUM(sigma) = sum_e k_e * l_e(k_e).
double total_latency(const CongestionGame& game, const FlowProfile& profile);

// Cost of a strategy at zero congestion: sum of constant terms.
double free_flow_cost(const CongestionGame& game,
                      const std::vector<int>& strategy);
double free_flow_cost(const CongestionGame& game, int type, int strategy);

// Least theta such that the game is theta-free-flow: max over types of the
// spread between their strategies' free-flow costs, minus one. A type whose
// free-flow costs are all zero is unconstrained (ratio 1); a positive cost
// against a zero cost yields +infinity.
double compute_theta(const CongestionGame& game);

// compute_theta(game) <= theta, with 1e-12 relative tolerance on the ratio.
// Throws std::invalid_argument for theta < 0.
bool is_theta_free_flow(const CongestionGame& game, double theta);

// Sparse resource x flat-strategy incidence; loads = incidence * flow.
Eigen::SparseMatrix<double> strategy_incidence(const CongestionGame& game);

}  // namespace routing
