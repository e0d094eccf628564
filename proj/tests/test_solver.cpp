/**
 * Solver tests.
 *
 * Conditional-gradient equilibrium and optimum solves on small closed-form
 * instances, the normalized Wardrop gap, price-of-anarchy reports, the
 * brute-force grid oracle (including its frozen regression constant), and
 * the column-generation network solver. Closed-form reference values:
 * the two-link instance with costs {1, x+c} and unit demand has equilibrium
 * loads (c, 1-c), optimum loads ((1+c)/2, (1-c)/2), and price of anarchy
 * 4/((c+1)(3-c)).
 */

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "routing/network_solver.hpp"
#include "routing/solver.hpp"

using namespace routing;

namespace {

CongestionGame pigou(double c) {
  std::vector<LatencyFunction> latencies;
  latencies.push_back(LatencyFunction::constant(1.0));
  latencies.push_back(c > 0.0 ? LatencyFunction({{1, 1.0}}, c)
                              : LatencyFunction::monomial(1));
  return CongestionGame::parallel_links(std::move(latencies), 1.0);
}

double pigou_poa(double c) { return 4.0 / ((c + 1.0) * (3.0 - c)); }

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("solver: equilibrium of the two-link constant-vs-linear game") {
  // Everyone pays 1 at equilibrium: load c on the constant link, 1-c on the
  // linear one (where it costs (1-c)+c = 1).
  for (double c : {0.25, 0.5, 0.75}) {
    const auto game = pigou(c);
    const auto report = solve_equilibrium(game);
    REQUIRE(report.converged);
    CHECK(report.wardrop_gap <= 1e-8);
    const Eigen::VectorXd loads = edge_loads(game, report.profile);
    CHECK(near(loads(0), c, 1e-6));
    CHECK(near(loads(1), 1.0 - c, 1e-6));
    CHECK(near(total_latency(game, report.profile), 1.0, 1e-8));
  }
  // The classic c = 0 instance routes everything onto the linear link.
  const auto game = pigou(0.0);
  const auto report = solve_equilibrium(game);
  REQUIRE(report.converged);
  const Eigen::VectorXd loads = edge_loads(game, report.profile);
  CHECK(near(loads(0), 0.0, 1e-6));
  CHECK(near(loads(1), 1.0, 1e-6));
  CHECK(near(total_latency(game, report.profile), 1.0, 1e-6));
}

TEST_CASE("solver: equilibrium trivia") {
  SUBCASE("single resource carries everything") {
    const auto game = CongestionGame::parallel_links(
        {LatencyFunction::parse("x^2+1")}, 5.0);
    const auto report = solve_equilibrium(game);
    REQUIRE(report.converged);
    CHECK(report.wardrop_gap == 0.0);
    CHECK(near(report.profile(0, 0), 5.0, 1e-12));
  }
  SUBCASE("two identical linear links split evenly") {
    const auto game = CongestionGame::parallel_links(
        {LatencyFunction::monomial(1), LatencyFunction::monomial(1)}, 1.0);
    const auto report = solve_equilibrium(game);
    REQUIRE(report.converged);
    const Eigen::VectorXd loads = edge_loads(game, report.profile);
    CHECK(near(loads(0), 0.5, 1e-8));
    CHECK(near(loads(1), 0.5, 1e-8));
  }
  SUBCASE("non-convergence is reported, not thrown") {
    const auto game = CongestionGame::parallel_links(
        {LatencyFunction::monomial(1), LatencyFunction::monomial(2),
         LatencyFunction::monomial(4)},
        1.0);
    SolveOptions options;
    options.tol = 1e-14;
    options.max_iters = 1;
    options.init = InitialProfile::FirstStrategy;
    const auto report = solve_equilibrium(game, options);
    CHECK_FALSE(report.converged);
    CHECK(report.iterations == 1);
    CHECK(report.wardrop_gap > 1e-14);
  }
  SUBCASE("rejects nonsense options") {
    CHECK_THROWS_AS(solve_equilibrium(pigou(0.5), 0.0, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_equilibrium(pigou(0.5), 1e-8, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("solver: optimum of the two-link constant-vs-linear game") {
  for (double c : {0.0, 0.25, 0.5, 1.0}) {
    const auto game = pigou(c);
    const auto report = solve_optimum(game);
    REQUIRE(report.converged);
    const Eigen::VectorXd loads = edge_loads(game, report.profile);
    CHECK(near(loads(0), (1.0 + c) / 2.0, 1e-6));
    CHECK(near(loads(1), (1.0 - c) / 2.0, 1e-6));
  }
  // c = 0: optimum SUM is 1/2 * 1 + 1/2 * 1/2 = 3/4.
  const auto report = solve_optimum(pigou(0.0));
  CHECK(near(total_latency(pigou(0.0), report.profile), 0.75, 1e-8));
  CHECK(near(report.objective, 0.75, 1e-8));
}

TEST_CASE("solver: wardrop_gap formula") {
  SUBCASE("hand-evaluated example") {
    // Two links l(x) = x, all demand on the first: the carried strategy
    // costs 1 against a best response of 0, so the normalized gap is
    // 1 * (1 - 0) / (1 * (1 + 0)) = 1.
    const auto game = CongestionGame::parallel_links(
        {LatencyFunction::monomial(1), LatencyFunction::monomial(1)}, 1.0);
    CHECK(near(wardrop_gap(game, FlowProfile::single(game, {0})), 1.0,
               1e-12));
  }
  SUBCASE("exact equilibria have zero gap") {
    const auto game = pigou(0.5);
    Eigen::VectorXd flat(2);
    flat << 0.5, 0.5;
    CHECK(wardrop_gap(game, FlowProfile(game, flat)) == 0.0);
  }
  SUBCASE("single-strategy types always have zero gap") {
    const std::vector<LatencyFunction> lat = {LatencyFunction::parse("x+1"),
                                              LatencyFunction::parse("x^2")};
    const CongestionGame game({"a", "b"}, lat,
                              {PlayerType{2.0, {{0, 1}}},
                               PlayerType{1.0, {{0}}}});
    CHECK(wardrop_gap(game, FlowProfile::uniform(game)) == 0.0);
  }
  SUBCASE("rejects non-conserving profiles") {
    const auto game = pigou(0.5);
    CHECK_THROWS_AS(wardrop_gap(game, FlowProfile::zeros(game)),
                    std::invalid_argument);
  }
}

TEST_CASE("solver: converged equilibria satisfy the carried-strategy bound") {
  const std::vector<LatencyFunction> lat = {
      LatencyFunction::parse("x^2+0.2"), LatencyFunction::parse("2*x"),
      LatencyFunction::parse("0.5*x^4+0.1")};
  const CongestionGame game(
      {"a", "b", "c"}, lat,
      {PlayerType{1.5, {{0}, {1}, {2}}}, PlayerType{0.7, {{0, 1}, {2}}}});
  SolveOptions options;
  options.tol = 1e-10;
  const auto report = solve_equilibrium(game, options);
  REQUIRE(report.converged);
  const Eigen::VectorXd loads = edge_loads(game, report.profile);
  const Eigen::VectorXd costs = strategy_costs(game, loads);
  for (int i = 0; i < game.num_types(); ++i) {
    const int offset = game.strategy_offset(i);
    const int count = static_cast<int>(game.type(i).strategies.size());
    double minimum = costs[offset];
    for (int s = 1; s < count; ++s)
      minimum = std::min(minimum, costs[offset + s]);
    for (int s = 0; s < count; ++s) {
      if (report.profile(i, s) > 10 * options.tol * game.type(i).demand)
        CHECK(costs[offset + s] <=
              minimum + options.tol * (1.0 + minimum));
    }
  }
}

TEST_CASE("solver: essential uniqueness across starting points") {
  const auto game = pigou(0.3);
  SolveOptions uniform;
  SolveOptions first;
  first.init = InitialProfile::FirstStrategy;
  SolveOptions random;
  random.init = InitialProfile::Random;
  random.seed = 7;
  const double a = total_latency(game, solve_equilibrium(game, uniform).profile);
  const double b = total_latency(game, solve_equilibrium(game, first).profile);
  const double c = total_latency(game, solve_equilibrium(game, random).profile);
  CHECK(near(a, b, 1e-6 * a));
  CHECK(near(a, c, 1e-6 * a));
}

TEST_CASE("solver: price_of_anarchy on the closed-form family") {
  const auto report = price_of_anarchy(pigou(0.5));
  CHECK(near(report.ratio, 16.0 / 15.0, 1e-6));
  CHECK(report.ratio >= 1.0 - 1e-6);
  CHECK(near(report.eq_cost, 1.0, 1e-8));
  CHECK(near(report.opt_cost, 15.0 / 16.0, 1e-8));

  for (double c : {0.0, 0.25, 0.75, 1.0})
    CHECK(near(price_of_anarchy(pigou(c)).ratio, pigou_poa(c), 1e-6));

  const auto single = CongestionGame::parallel_links(
      {LatencyFunction::parse("x^3+2")}, 4.0);
  CHECK(near(price_of_anarchy(single).ratio, 1.0, 1e-12));
}

TEST_CASE("solver: brute force grid oracle") {
  SUBCASE("two-link closed form at fine resolution") {
    const auto report = brute_force_poa(pigou(0.5), 10000);
    CHECK(near(report.ratio, 16.0 / 15.0, 1e-3));
    CHECK(report.eq.converged);
    CHECK(report.opt.converged);
  }
  SUBCASE("symmetric linear links are efficient") {
    const auto game = CongestionGame::parallel_links(
        {LatencyFunction::monomial(1), LatencyFunction::monomial(1)}, 1.0);
    CHECK(near(brute_force_poa(game, 10000).ratio, 1.0, 1e-3));
  }
  SUBCASE("frozen regression value for the quartic-vs-constant instance") {
    // l1 = 1 + x^4 against l2 = 2, unit demand. Exact optimum load on the
    // first link is (1/5)^{1/4} with SUM 1.4650077560188624; the grid
    // optimum at resolution 10^4 lands at ratio 1.3651804812302364.
    const auto game = CongestionGame::parallel_links(
        {LatencyFunction::parse("x^4+1"), LatencyFunction::constant(2.0)},
        1.0);
    const auto grid = brute_force_poa(game, 10000);
    CHECK(near(grid.ratio, 1.3651804812302364, 1e-9));
    CHECK(near(grid.eq_cost, 2.0, 1e-9));

    const auto solved = price_of_anarchy(game);
    CHECK(near(solved.ratio, 1.3651804857572710, 1e-6));
    CHECK(near(solved.opt_cost, 1.4650077560188624, 1e-8));
    const Eigen::VectorXd opt_loads =
        edge_loads(game, solved.opt.profile);
    CHECK(near(opt_loads(0), 0.6687403049764220, 1e-6));
    CHECK(near(grid.ratio, solved.ratio, 1e-3));
  }
  SUBCASE("three-link instance agrees with the iterative solver") {
    const auto game = CongestionGame::parallel_links(
        {LatencyFunction::parse("x^4+0.5"), LatencyFunction::parse("x+1"),
         LatencyFunction::parse("2*x^2+0.2")},
        2.0);
    const auto grid = brute_force_poa(game, 10000);
    const auto solved = price_of_anarchy(game);
    CHECK(near(grid.eq_cost, solved.eq_cost,
               1e-3 * std::max(1.0, solved.eq_cost)));
    CHECK(near(grid.opt_cost, solved.opt_cost,
               1e-3 * std::max(1.0, solved.opt_cost)));
  }
  SUBCASE("generic multi-type path") {
    const std::vector<LatencyFunction> lat = {LatencyFunction::parse("x"),
                                              LatencyFunction::parse("x+0.1"),
                                              LatencyFunction::parse("2*x")};
    const CongestionGame game(
        {"a", "b", "c"}, lat,
        {PlayerType{1.0, {{0}, {1}}}, PlayerType{1.0, {{1}, {2}}}});
    const auto grid = brute_force_poa(game, 400);
    const auto solved = price_of_anarchy(game);
    CHECK(near(grid.opt_cost, solved.opt_cost,
               1e-3 * std::max(1.0, solved.opt_cost)));
    CHECK(grid.eq.wardrop_gap <= 1e-2);
  }
  SUBCASE("size guards") {
    const std::vector<LatencyFunction> lat = {LatencyFunction::parse("x")};
    const CongestionGame seven(
        {"a"}, lat,
        {PlayerType{1.0, {{0}}}, PlayerType{1.0, {{0}}},
         PlayerType{1.0, {{0}}}, PlayerType{1.0, {{0}}},
         PlayerType{1.0, {{0}}}, PlayerType{1.0, {{0}}},
         PlayerType{1.0, {{0}}}});
    CHECK_THROWS_AS(brute_force_poa(seven, 10), std::invalid_argument);

    const std::vector<LatencyFunction> lat3 = {
        LatencyFunction::parse("x"), LatencyFunction::parse("x"),
        LatencyFunction::parse("x")};
    const CongestionGame cube(
        {"a", "b", "c"}, lat3,
        {PlayerType{1.0, {{0}, {1}}}, PlayerType{1.0, {{1}, {2}}},
         PlayerType{1.0, {{0}, {2}}}});
    CHECK_THROWS_AS(brute_force_poa(cube, 10000), std::invalid_argument);
    CHECK_THROWS_AS(brute_force_poa(pigou(0.5), 0), std::invalid_argument);
  }
}

TEST_CASE("solver: optimum never exceeds other feasible flows") {
  for (double c : {0.0, 0.4, 0.9}) {
    const auto game = pigou(c);
    const double optimum =
        total_latency(game, solve_optimum(game).profile);
    CHECK(optimum <=
          total_latency(game, solve_equilibrium(game).profile) + 1e-8);
    CHECK(optimum <= brute_force_poa(game, 1000).opt_cost + 1e-8);
  }
}

TEST_CASE("solver: marginal cost matches finite differences of x*l(x)") {
  const std::vector<LatencyFunction> functions = {
      LatencyFunction::parse("x^4+1"), LatencyFunction::parse("0.3*x^2+2*x"),
      LatencyFunction::parse("5"), LatencyFunction::parse("x^3+x+0.5")};
  const double h = 1e-5;
  for (const auto& f : functions) {
    for (double x : {0.2, 0.9, 1.7, 2.6}) {
      const double fd =
          ((x + h) * f(x + h) - (x - h) * f(x - h)) / (2 * h);
      CHECK(near(f.marginal(x), fd, 1e-6 * std::max(1.0, std::abs(fd))));
    }
  }
}

TEST_CASE("solver: network equilibrium via column generation") {
  const auto linear = LatencyFunction::monomial(1);
  const auto one = LatencyFunction::constant(1.0);

  SUBCASE("symmetric diamond splits evenly and is efficient") {
    const std::vector<NetworkEdge> edges = {{"sa", "s", "a", linear},
                                            {"at", "a", "t", one},
                                            {"sb", "s", "b", linear},
                                            {"bt", "b", "t", one}};
    const NetworkCongestionGame net({"s", "a", "b", "t"}, edges,
                                    {Commodity{"s", "t", 1.0}});
    const auto report = network_price_of_anarchy(net);
    CHECK(near(report.eq_cost, 1.5, 1e-8));
    CHECK(near(report.ratio, 1.0, 1e-8));
    CHECK(report.eq.report.converged);
  }
  SUBCASE("shortcut network routes inefficiently at equilibrium") {
    // Two x+1 routes plus a near-free shortcut joining them. At equilibrium
    // the shortcut path cost equals the side paths at 1.99; the optimum
    // ignores the shortcut and pays 1.5.
    const std::vector<NetworkEdge> edges = {
        {"sa", "s", "a", linear},
        {"at", "a", "t", one},
        {"sb", "s", "b", one},
        {"bt", "b", "t", linear},
        {"ab", "a", "b", LatencyFunction::constant(0.01)}};
    const NetworkCongestionGame net({"s", "a", "b", "t"}, edges,
                                    {Commodity{"s", "t", 1.0}});

    const auto eq = solve_equilibrium_paths(net);
    REQUIRE(eq.report.converged);
    CHECK(eq.report.wardrop_gap <= 1e-8);
    CHECK(eq.paths.size() == 3);  // the shortcut seed plus both side routes
    CHECK(near(total_latency(eq.path_game, eq.report.profile), 1.99, 1e-6));

    const auto opt = solve_optimum_paths(net);
    REQUIRE(opt.report.converged);
    CHECK(near(total_latency(opt.path_game, opt.report.profile), 1.5, 1e-6));

    const auto report = network_price_of_anarchy(net);
    CHECK(near(report.ratio, 1.99 / 1.5, 1e-6));
  }
  SUBCASE("multi-commodity network") {
    const std::vector<NetworkEdge> edges = {{"sa", "s", "a", linear},
                                            {"at", "a", "t", one},
                                            {"sb", "s", "b", linear},
                                            {"bt", "b", "t", one},
                                            {"ua", "u", "a", one}};
    const NetworkCongestionGame net(
        {"s", "a", "b", "t", "u"}, edges,
        {Commodity{"s", "t", 1.0}, Commodity{"u", "t", 0.5}});
    const auto eq = solve_equilibrium_paths(net);
    REQUIRE(eq.report.converged);
    // The u commodity is captive to u -> a -> t and shares edge at.
    CHECK(eq.paths.size() >= 3);
    const auto report = network_price_of_anarchy(net);
    CHECK(report.ratio >= 1.0 - 1e-9);
  }
}
