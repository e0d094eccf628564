#include "routing/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "routing/bounds.hpp"

namespace routing {
namespace {

constexpr double kIntegralityTol = 1e-9;
constexpr long long kMaxResources = 4'000'000;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("generators: " + message);
}

// Rounds `value` to the nearest integer; rejects values farther than
// kIntegralityTol (relative past 1) from an integer or below `minimum`.
long long as_integer(double value, const std::string& what,
                     long long minimum) {
  const double rounded = std::round(value);
  const double tol = kIntegralityTol * std::max(1.0, std::abs(value));
  if (!std::isfinite(value) || std::abs(value - rounded) > tol) {
    fail(what + " = " + std::to_string(value) + " is not an integer");
  }
  if (rounded < static_cast<double>(minimum)) {
    fail(what + " must be at least " + std::to_string(minimum));
  }
  return static_cast<long long>(rounded);
}

// Level geometry and closed-form SUM values shared by the multilevel
// construction and its network expansion. Vectors are 1-based on the level
// index s; entry 0 is unused.
struct MultiLevelLayout {
  int m = 0;
  long long fan_in = 0;             // l*n/k
  std::vector<long long> size;      // resources per level
  std::vector<long long> offset;    // first resource index of each level
  std::vector<double> alpha;        // 1 - (1+theta)^{s-m}
  std::vector<double> beta;         // (1+theta)^{s-m} * f(k)
  double fk = 0.0;
  double fl = 0.0;
  long long num_resources = 0;
  long long num_players = 0;        // populations, n per level-s resource
  double sum_eq = 0.0;              // SUM with loads k on levels 1..m-1
  double sum_opt = 0.0;             // SUM with loads l on levels 2..m
  double demand_total = 0.0;        // (k/n) * num_players
};

MultiLevelLayout multilevel_layout(double k, double l, const LatencyFunction& f,
                                   double theta, int n, int m) {
  if (!std::isfinite(k) || !std::isfinite(l) || !(l > 0.0) || !(k > l)) {
    fail("multilevel-lb requires k > l > 0");
  }
  if (!std::isfinite(theta) || !(theta > 0.0)) {
    fail("multilevel-lb requires finite theta > 0");
  }
  if (!f.homogeneous()) {
    fail("multilevel-lb requires a homogeneous base latency, got " +
         f.to_string());
  }
  if (n < 1) fail("multilevel-lb requires n >= 1");
  if (m < 2) fail("multilevel-lb requires m >= 2");

  MultiLevelLayout lay;
  lay.m = m;
  lay.fan_in = as_integer(l * n / k, "fan-in l*n/k", 1);
  lay.fk = f(k);
  lay.fl = f(l);
  lay.size.assign(m + 1, 0);
  lay.offset.assign(m + 1, 0);
  lay.alpha.assign(m + 1, 0.0);
  lay.beta.assign(m + 1, 0.0);

  // size(s) = n^{s-1} * fan_in^{m-s}; stepping up a level multiplies by
  // n/fan_in, which stays integral because fan_in^{m-s} divides size(s).
  lay.size[1] = 1;
  for (int s = 1; s < m; ++s) lay.size[1] *= lay.fan_in;
  for (int s = 1; s <= m; ++s) {
    if (s > 1) lay.size[s] = lay.size[s - 1] * n / lay.fan_in;
    lay.offset[s] = lay.num_resources;
    lay.num_resources += lay.size[s];
    if (s < m) lay.num_players += lay.size[s] * n;
    if (lay.num_resources > kMaxResources || lay.num_players > kMaxResources) {
      fail("multilevel-lb construction too large; reduce n or m");
    }
    const double spread = std::pow(1.0 + theta, s - m);
    lay.alpha[s] = 1.0 - spread;
    lay.beta[s] = spread * lay.fk;
  }

  for (int s = 1; s < m; ++s) {
    lay.sum_eq += static_cast<double>(lay.size[s]) * k * lay.fk;
  }
  for (int s = 2; s <= m; ++s) {
    lay.sum_opt += static_cast<double>(lay.size[s]) * l *
                   (lay.alpha[s] * lay.fl + lay.beta[s]);
  }
  lay.demand_total = (k / n) * static_cast<double>(lay.num_players);
  return lay;
}

// Both strategies of population `j` bridging levels s and s+1: resource
// j/n at level s (fan-out n) and resource j/fan_in at level s+1.
template <typename Visit>
void for_each_population(const MultiLevelLayout& lay, int n, Visit visit) {
  for (int s = 1; s < lay.m; ++s) {
    const long long count = lay.size[s] * n;
    for (long long j = 0; j < count; ++j) {
      visit(lay.offset[s] + j / n, lay.offset[s + 1] + j / lay.fan_in);
    }
  }
}

double find_parameter(const GeneratedInstance& instance,
                      const std::string& name) {
  for (const auto& [key, value] : instance.parameters) {
    if (key == name) return value;
  }
  fail("instance is missing parameter '" + name + "'");
}

double require_parameter(const GeneratorSpec& spec, const std::string& name) {
  auto it = spec.parameters.find(name);
  if (it == spec.parameters.end()) fail("missing parameter '" + name + "'");
  return it->second;
}

int require_int_parameter(const GeneratorSpec& spec, const std::string& name) {
  return static_cast<int>(as_integer(require_parameter(spec, name),
                                     "parameter '" + name + "'",
                                     std::numeric_limits<int>::min()));
}

LatencyFunction require_latency(const std::string& text, const char* which) {
  if (text.empty()) fail(std::string("missing ") + which + " formula");
  return LatencyFunction::parse(text);
}

}  // namespace

GeneratedInstance gen_pigou_like(double c) {
  if (!std::isfinite(c) || c < 0.0 || c > 1.0) {
    fail("pigou-like requires 0 <= c <= 1, got " + std::to_string(c));
  }
  CongestionGame game = CongestionGame::parallel_links(
      {LatencyFunction::constant(1.0), LatencyFunction::monomial(1, 1.0, c)},
      1.0);
  Eigen::VectorXd eq(2), opt(2);
  eq << c, 1.0 - c;
  opt << (1.0 + c) / 2.0, (1.0 - c) / 2.0;
  FlowProfile canonical_eq(game, eq);
  FlowProfile canonical_opt(game, opt);
  const double predicted = 4.0 / ((c + 1.0) * (3.0 - c));
  const double theta =
      c > 0.0 ? 1.0 / c - 1.0 : std::numeric_limits<double>::infinity();
  return GeneratedInstance{std::move(game),
                           std::nullopt,
                           std::move(canonical_eq),
                           std::move(canonical_opt),
                           predicted,
                           theta,
                           "pigou-like",
                           {{"c", c}},
                           std::nullopt};
}

GeneratedInstance gen_multilevel_lb(double k, double l,
                                    const LatencyFunction& f, double theta,
                                    int n, int m) {
  const MultiLevelLayout lay = multilevel_layout(k, l, f, theta, n, m);

  std::vector<std::string> ids;
  std::vector<LatencyFunction> latencies;
  ids.reserve(lay.num_resources);
  latencies.reserve(lay.num_resources);
  for (int s = 1; s <= m; ++s) {
    for (long long i = 0; i < lay.size[s]; ++i) {
      ids.push_back("r" + std::to_string(s) + "_" + std::to_string(i));
      latencies.push_back(LatencyFunction::scale_add(f, lay.alpha[s],
                                                     lay.beta[s]));
    }
  }

  std::vector<PlayerType> types;
  types.reserve(lay.num_players);
  for_each_population(lay, n, [&](long long tail, long long head) {
    types.push_back(PlayerType{k / n,
                               {{static_cast<int>(tail)},
                                {static_cast<int>(head)}}});
  });

  CongestionGame game(std::move(ids), std::move(latencies), std::move(types));
  const std::vector<int> on_tail(lay.num_players, 0);
  const std::vector<int> on_head(lay.num_players, 1);
  FlowProfile canonical_eq = FlowProfile::single(game, on_tail);
  FlowProfile canonical_opt = FlowProfile::single(game, on_head);
  return GeneratedInstance{std::move(game),
                           std::nullopt,
                           std::move(canonical_eq),
                           std::move(canonical_opt),
                           lay.sum_eq / lay.sum_opt,
                           theta,
                           "multilevel-lb",
                           {{"k", k},
                            {"l", l},
                            {"theta", theta},
                            {"n", static_cast<double>(n)},
                            {"m", static_cast<double>(m)}},
                           f};
}

GeneratedInstance gen_parallel_gamma(double k1, double l1,
                                     const LatencyFunction& f1, double k2,
                                     double l2, const LatencyFunction& f2,
                                     int n) {
  if (!std::isfinite(k1) || !(l1 > 0.0) || !(k1 > l1)) {
    fail("parallel-gamma requires k1 > l1 > 0");
  }
  if (!std::isfinite(l2) || !(k2 > 0.0) || !(l2 > k2)) {
    fail("parallel-gamma requires 0 < k2 < l2");
  }
  if (!f1.homogeneous()) {
    fail("parallel-gamma requires a homogeneous f1, got " + f1.to_string());
  }
  if (!f2.homogeneous()) {
    fail("parallel-gamma requires a homogeneous f2, got " + f2.to_string());
  }
  if (n < 1) fail("parallel-gamma requires n >= 1");
  const long long n_minus = as_integer((k1 - l1) / (l2 - k2) * n,
                                       "link count ((k1-l1)/(l2-k2))*n", 1);
  if (n + n_minus > kMaxResources) {
    fail("parallel-gamma construction too large; reduce n");
  }

  std::vector<LatencyFunction> latencies;
  latencies.reserve(n + n_minus);
  for (int i = 0; i < n; ++i) {
    latencies.push_back(LatencyFunction::scale_add(f1, f2(k2), 0.0));
  }
  for (long long i = 0; i < n_minus; ++i) {
    latencies.push_back(LatencyFunction::scale_add(f2, f1(k1), 0.0));
  }
  const double demand = n * k1 + static_cast<double>(n_minus) * k2;
  CongestionGame game = CongestionGame::parallel_links(std::move(latencies),
                                                       demand);

  Eigen::VectorXd eq(n + n_minus), opt(n + n_minus);
  eq.head(n).setConstant(k1);
  eq.tail(n_minus).setConstant(k2);
  opt.head(n).setConstant(l1);
  opt.tail(n_minus).setConstant(l2);
  FlowProfile canonical_eq(game, eq);
  FlowProfile canonical_opt(game, opt);
  return GeneratedInstance{std::move(game),
                           std::nullopt,
                           std::move(canonical_eq),
                           std::move(canonical_opt),
                           gamma_point(k1, l1, f1, k2, l2, f2),
                           0.0,
                           "parallel-gamma",
                           {{"k1", k1},
                            {"l1", l1},
                            {"k2", k2},
                            {"l2", l2},
                            {"n", static_cast<double>(n)}},
                           std::nullopt};
}

GeneratedInstance gen_twolink_eta(double k, double l, const LatencyFunction& f,
                                  double theta) {
  if (!std::isfinite(k) || !(l > 0.0) || !(k > l)) {
    fail("twolink-eta requires k > l > 0");
  }
  if (!std::isfinite(theta) || !(theta > 0.0)) {
    fail("twolink-eta requires finite theta > 0");
  }
  if (!f.homogeneous()) {
    fail("twolink-eta requires a homogeneous base latency, got " +
         f.to_string());
  }
  const double fk = f(k);
  CongestionGame game = CongestionGame::parallel_links(
      {LatencyFunction::scale_add(f, theta, fk),
       LatencyFunction::constant((1.0 + theta) * fk)},
      k);
  Eigen::VectorXd eq(2), opt(2);
  eq << k, 0.0;
  opt << l, k - l;
  FlowProfile canonical_eq(game, eq);
  FlowProfile canonical_opt(game, opt);
  return GeneratedInstance{std::move(game),
                           std::nullopt,
                           std::move(canonical_eq),
                           std::move(canonical_opt),
                           eta_theta_point(k, l, f, theta),
                           theta,
                           "twolink-eta",
                           {{"k", k}, {"l", l}, {"theta", theta}},
                           f};
}

GeneratedInstance expand_to_network(const GeneratedInstance& lb_instance,
                                    int h, double beta) {
  if (lb_instance.construction != "multilevel-lb") {
    fail("network expansion requires a multilevel-lb instance, got '" +
         lb_instance.construction + "'");
  }
  if (h < 1) fail("network expansion requires h >= 1");
  if (!std::isfinite(beta) || !(beta > 0.0)) {
    fail("network expansion requires beta > 0");
  }
  if (!lb_instance.base_latency) {
    fail("multilevel-lb instance is missing its base latency");
  }
  const double k = find_parameter(lb_instance, "k");
  const double l = find_parameter(lb_instance, "l");
  const double theta = find_parameter(lb_instance, "theta");
  const int n = static_cast<int>(find_parameter(lb_instance, "n"));
  const int m = static_cast<int>(find_parameter(lb_instance, "m"));
  const LatencyFunction& f = *lb_instance.base_latency;
  const MultiLevelLayout lay = multilevel_layout(k, l, f, theta, n, m);

  // Edge counts per chain; rejecting non-integral counts is what enforces
  // the rational-theta requirement, so the message says how to recover.
  std::vector<long long> poly_edges(m + 1, 0), const_edges(m + 1, 0);
  for (int s = 1; s <= m; ++s) {
    const std::string level = std::to_string(s);
    const std::string hint =
        "; pick h and beta so every level's edge counts are integral"
        " (perturb theta downward to a nearby rational if needed)";
    poly_edges[s] =
        as_integer(lay.alpha[s] * h, "alpha_" + level + "*h" + hint, 0);
    const_edges[s] = as_integer(lay.beta[s] * h / beta,
                                "beta_" + level + "*h/beta" + hint, 1);
  }

  // One chain per resource, all starting at the shared source: first the
  // latency-f edges, then the constant-beta tail down to the exit node.
  std::vector<std::string> nodes{"src"};
  std::vector<NetworkEdge> edges;
  std::vector<std::string> exit_node(lay.num_resources);
  long long resource = 0;
  for (int s = 1; s <= m; ++s) {
    for (long long i = 0; i < lay.size[s]; ++i, ++resource) {
      const std::string tag = std::to_string(resource);
      const long long chain = poly_edges[s] + const_edges[s];
      std::string prev = "src";
      for (long long t = 0; t < chain; ++t) {
        const bool last = t + 1 == chain;
        std::string next =
            last ? "x" + tag : "n" + tag + "_" + std::to_string(t);
        const bool poly = t < poly_edges[s];
        edges.push_back(NetworkEdge{
            (poly ? "pf" : "pc") + tag + "_" + std::to_string(t), prev, next,
            poly ? f : LatencyFunction::constant(beta)});
        nodes.push_back(std::move(next));
        prev = nodes.back();
      }
      exit_node[resource] = prev;
    }
  }

  // One commodity per population, with its own sink fed by one extra
  // constant edge from each of its two chains.
  std::vector<Commodity> commodities;
  long long population = 0;
  for_each_population(lay, n, [&](long long tail, long long head) {
    const std::string tag = std::to_string(population++);
    const std::string sink = "snk" + tag;
    nodes.push_back(sink);
    edges.push_back(NetworkEdge{"lo" + tag, exit_node[tail], sink,
                                LatencyFunction::constant(beta)});
    edges.push_back(NetworkEdge{"hi" + tag, exit_node[head], sink,
                                LatencyFunction::constant(beta)});
    commodities.push_back(Commodity{"src", sink, k / n});
  });

  NetworkCongestionGame network(std::move(nodes), std::move(edges),
                                std::move(commodities));
  const int path_budget = static_cast<int>(2 * lay.num_players + 8);
  CongestionGame game = network.explicit_game(std::max(10000, path_budget));

  // Identify each population's equilibrium strategy (the one through its
  // tail chain) by membership of its population-specific edge.
  std::vector<int> on_tail(lay.num_players, -1), on_head(lay.num_players, -1);
  for (long long i = 0; i < lay.num_players; ++i) {
    const int lo = network.edge_index("lo" + std::to_string(i));
    const auto& strategies = game.type(static_cast<int>(i)).strategies;
    if (strategies.size() != 2) {
      throw std::logic_error(
          "generators: network expansion produced an unexpected path count");
    }
    const bool first_is_tail = std::binary_search(strategies[0].begin(),
                                                  strategies[0].end(), lo);
    on_tail[i] = first_is_tail ? 0 : 1;
    on_head[i] = first_is_tail ? 1 : 0;
  }
  FlowProfile canonical_eq = FlowProfile::single(game, on_tail);
  FlowProfile canonical_opt = FlowProfile::single(game, on_head);

  // Each strategy costs h times its original cost plus beta, so SUM picks
  // up W*beta on both sides of the ratio; the free-flow spread shrinks for
  // the same reason and is largest between the two deepest levels.
  const double shift = lay.demand_total * beta;
  const double predicted = (lay.sum_eq * h + shift) / (lay.sum_opt * h + shift);
  const double theta_declared =
      (h * lay.beta[m] + beta) / (h * lay.beta[m - 1] + beta) - 1.0;

  std::vector<std::pair<std::string, double>> parameters =
      lb_instance.parameters;
  parameters.emplace_back("h", static_cast<double>(h));
  parameters.emplace_back("beta", beta);
  return GeneratedInstance{std::move(game),
                           std::move(network),
                           std::move(canonical_eq),
                           std::move(canonical_opt),
                           predicted,
                           theta_declared,
                           "network-expansion",
                           std::move(parameters),
                           f};
}

GeneratedInstance generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::PigouLike:
      return gen_pigou_like(require_parameter(spec, "c"));
    case GeneratorKind::MultiLevelLB:
      return gen_multilevel_lb(require_parameter(spec, "k"),
                               require_parameter(spec, "l"),
                               require_latency(spec.latency, "base latency"),
                               require_parameter(spec, "theta"),
                               require_int_parameter(spec, "n"),
                               require_int_parameter(spec, "m"));
    case GeneratorKind::ParallelGamma:
      return gen_parallel_gamma(
          require_parameter(spec, "k1"), require_parameter(spec, "l1"),
          require_latency(spec.latency, "first latency"),
          require_parameter(spec, "k2"), require_parameter(spec, "l2"),
          require_latency(spec.latency2, "second latency"),
          require_int_parameter(spec, "n"));
    case GeneratorKind::TwoLinkEta:
      return gen_twolink_eta(require_parameter(spec, "k"),
                             require_parameter(spec, "l"),
                             require_latency(spec.latency, "base latency"),
                             require_parameter(spec, "theta"));
    case GeneratorKind::NetworkExpansion: {
      const GeneratedInstance lb = gen_multilevel_lb(
          require_parameter(spec, "k"), require_parameter(spec, "l"),
          require_latency(spec.latency, "base latency"),
          require_parameter(spec, "theta"), require_int_parameter(spec, "n"),
          require_int_parameter(spec, "m"));
      return expand_to_network(lb, require_int_parameter(spec, "h"),
                               require_parameter(spec, "beta"));
    }
  }
  fail("unknown construction kind");
}

}  // namespace routing
