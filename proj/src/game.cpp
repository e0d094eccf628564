#include "routing/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace routing {

namespace {

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument("game: " + msg);
}

}  // namespace

CongestionGame::CongestionGame(std::vector<std::string> resource_ids,
                               std::vector<LatencyFunction> latencies,
                               std::vector<PlayerType> types)
    : resource_ids_(std::move(resource_ids)),
      latencies_(std::move(latencies)),
      types_(std::move(types)) {
  if (resource_ids_.size() != latencies_.size())
    bad("one latency per resource required");
  if (resource_ids_.empty()) bad("at least one resource required");
  std::set<std::string> seen;
  for (const auto& id : resource_ids_) {
    if (id.empty()) bad("empty resource id");
    if (!seen.insert(id).second) bad("duplicate resource id '" + id + "'");
  }
  const int num_res = num_resources();
  offsets_.assign(1, 0);
  for (auto& t : types_) {
    if (!(t.demand >= 0.0)) bad("demand must be >= 0");
    if (t.strategies.empty()) bad("every type needs at least one strategy");
    for (auto& s : t.strategies) {
      if (s.empty()) bad("empty strategy");
      std::sort(s.begin(), s.end());
      if (std::adjacent_find(s.begin(), s.end()) != s.end())
        bad("duplicate resource inside a strategy");
      if (s.front() < 0 || s.back() >= num_res)
        bad("strategy references unknown resource");
    }
    offsets_.push_back(offsets_.back() + static_cast<int>(t.strategies.size()));
  }
}

CongestionGame CongestionGame::parallel_links(
    std::vector<LatencyFunction> latencies, double demand) {
  std::vector<std::string> ids;
  std::vector<std::vector<int>> strategies;
  for (std::size_t e = 0; e < latencies.size(); ++e) {
    ids.push_back("e" + std::to_string(e + 1));
    strategies.push_back({static_cast<int>(e)});
  }
  return {std::move(ids), std::move(latencies),
          {{demand, std::move(strategies)}}};
}

int CongestionGame::resource_index(const std::string& id) const {
  for (int e = 0; e < num_resources(); ++e)
    if (resource_ids_[e] == id) return e;
  return -1;
}

double CongestionGame::total_demand() const {
  double w = 0.0;
  for (const auto& t : types_) w += t.demand;
  return w;
}

bool CongestionGame::is_load_balancing() const {
  for (const auto& t : types_)
    for (const auto& s : t.strategies)
      if (s.size() != 1) return false;
  return true;
}

bool CongestionGame::is_parallel_link() const {
  if (!is_load_balancing()) return false;
  auto canonical = [](const PlayerType& t) {
    std::set<int> links;
    for (const auto& s : t.strategies) links.insert(s[0]);
    return links;
  };
  const auto shared = canonical(types_.front());
  for (const auto& t : types_)
    if (canonical(t) != shared) return false;
  return true;
}

FlowProfile::FlowProfile(const CongestionGame& game, Eigen::VectorXd flat)
    : flat_(std::move(flat)) {
  if (flat_.size() != game.num_strategies())
    bad("profile size does not match the game's strategy count");
  offsets_.resize(game.num_types());
  for (int i = 0; i < game.num_types(); ++i)
    offsets_[i] = game.strategy_offset(i);
}

FlowProfile FlowProfile::zeros(const CongestionGame& game) {
  return {game, Eigen::VectorXd::Zero(game.num_strategies())};
}

FlowProfile FlowProfile::uniform(const CongestionGame& game) {
  Eigen::VectorXd flat(game.num_strategies());
  for (int i = 0; i < game.num_types(); ++i) {
    const auto& t = game.type(i);
    const double share = t.demand / static_cast<double>(t.strategies.size());
    for (std::size_t s = 0; s < t.strategies.size(); ++s)
      flat[game.strategy_offset(i) + static_cast<int>(s)] = share;
  }
  return {game, std::move(flat)};
}

FlowProfile FlowProfile::single(const CongestionGame& game,
                                const std::vector<int>& choice) {
  if (static_cast<int>(choice.size()) != game.num_types())
    bad("one strategy choice per type required");
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(game.num_strategies());
  for (int i = 0; i < game.num_types(); ++i) {
    const auto& t = game.type(i);
    if (choice[i] < 0 || choice[i] >= static_cast<int>(t.strategies.size()))
      throw std::out_of_range("game: strategy choice out of range");
    flat[game.strategy_offset(i) + choice[i]] = t.demand;
  }
  return {game, std::move(flat)};
}

bool FlowProfile::conserves(const CongestionGame& game, double tol) const {
  for (int i = 0; i < game.num_types(); ++i) {
    double sum = 0.0;
    const auto& t = game.type(i);
    for (std::size_t s = 0; s < t.strategies.size(); ++s)
      sum += (*this)(i, static_cast<int>(s));
    if (std::abs(sum - t.demand) > tol) return false;
  }
  return true;
}

Eigen::VectorXd edge_loads(const CongestionGame& game,
                           const FlowProfile& profile) {
  Eigen::VectorXd loads = Eigen::VectorXd::Zero(game.num_resources());
  for (int i = 0; i < game.num_types(); ++i) {
    const auto& strategies = game.type(i).strategies;
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      const double flow = profile(i, static_cast<int>(s));
      if (flow == 0.0) continue;
      for (int e : strategies[s]) loads[e] += flow;
    }
  }
  return loads;
}

Eigen::VectorXd resource_latencies(const CongestionGame& game,
                                   const Eigen::VectorXd& loads) {
  Eigen::VectorXd lat(game.num_resources());
  for (int e = 0; e < game.num_resources(); ++e)
    lat[e] = game.latency(e)(loads[e]);
  return lat;
}

Eigen::VectorXd strategy_costs(const CongestionGame& game,
                               const Eigen::VectorXd& loads) {
  const Eigen::VectorXd lat = resource_latencies(game, loads);
  Eigen::VectorXd costs(game.num_strategies());
  for (int i = 0; i < game.num_types(); ++i) {
    const auto& strategies = game.type(i).strategies;
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      double c = 0.0;
      for (int e : strategies[s]) c += lat[e];
      costs[game.strategy_offset(i) + static_cast<int>(s)] = c;
    }
  }
  return costs;
}

double strategy_cost(const CongestionGame& game, const FlowProfile& profile,
                     int type, int strategy) {
  if (type < 0 || type >= game.num_types())
    throw std::out_of_range("game: unknown type index");
  const auto& strategies = game.type(type).strategies;
  if (strategy < 0 || strategy >= static_cast<int>(strategies.size()))
    throw std::out_of_range("game: unknown strategy index");
  const Eigen::VectorXd loads = edge_loads(game, profile);
  double c = 0.0;
  for (int e : strategies[strategy]) c += game.latency(e)(loads[e]);
  return c;
}

double total_latency(const CongestionGame& game, const FlowProfile& profile) {
  const Eigen::VectorXd loads = edge_loads(game, profile);
  return loads.dot(resource_latencies(game, loads));
}

double free_flow_cost(const CongestionGame& game,
                      const std::vector<int>& strategy) {
  double c = 0.0;
  for (int e : strategy) {
    if (e < 0 || e >= game.num_resources())
      throw std::out_of_range("game: unknown resource in strategy");
    c += game.latency(e).constant_term();
  }
  return c;
}

double free_flow_cost(const CongestionGame& game, int type, int strategy) {
  if (type < 0 || type >= game.num_types())
    throw std::out_of_range("game: unknown type index");
  const auto& strategies = game.type(type).strategies;
  if (strategy < 0 || strategy >= static_cast<int>(strategies.size()))
    throw std::out_of_range("game: unknown strategy index");
  return free_flow_cost(game, strategies[strategy]);
}

double compute_theta(const CongestionGame& game) {
  double worst_ratio = 1.0;
  for (int i = 0; i < game.num_types(); ++i) {
    const auto& strategies = game.type(i).strategies;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& s : strategies) {
      const double ff = free_flow_cost(game, s);
      lo = std::min(lo, ff);
      hi = std::max(hi, ff);
    }
    // hi == 0: all strategies free at zero load, vacuously unconstrained.
    const double ratio = hi == 0.0 ? 1.0
                         : lo == 0.0
                             ? std::numeric_limits<double>::infinity()
                             : hi / lo;
    worst_ratio = std::max(worst_ratio, ratio);
  }
  return worst_ratio - 1.0;
}

bool is_theta_free_flow(const CongestionGame& game, double theta) {
  if (!(theta >= 0.0)) bad("theta must be >= 0");
  return 1.0 + compute_theta(game) <= (1.0 + theta) * (1.0 + 1e-12);
}

Eigen::SparseMatrix<double> strategy_incidence(const CongestionGame& game) {
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < game.num_types(); ++i) {
    const auto& strategies = game.type(i).strategies;
    for (std::size_t s = 0; s < strategies.size(); ++s)
      for (int e : strategies[s])
        entries.emplace_back(e, game.strategy_offset(i) + static_cast<int>(s),
                             1.0);
  }
  Eigen::SparseMatrix<double> incidence(game.num_resources(),
                                        game.num_strategies());
  incidence.setFromTriplets(entries.begin(), entries.end());
  return incidence;
}

}  // namespace routing
