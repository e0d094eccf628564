/**
 * Worst-case construction tests.
 *
 * Every generator must ship a zero-gap canonical equilibrium, a candidate
 * optimum whose SUM ratio reproduces the closed-form prediction, and a
 * free-flow spread matching the declared theta. Frozen predictions
 * (12/11, 8/7, 128/107, 8192/6827, 51/47, ...) come from the independent
 * derivation script (tools/oracles/derive_constants.py); solver runs
 * confirm that the canonical profiles are what the dynamics actually find.
 */

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "routing/bounds.hpp"
#include "routing/generators.hpp"
#include "routing/network_solver.hpp"
#include "routing/solver.hpp"

using namespace routing;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

LatencyFunction identity() { return LatencyFunction::monomial(1); }

// Shared GeneratedInstance contract: conservation, equilibrium gap,
// SUM-ratio identity, and theta declaration.
void check_certificates(const GeneratedInstance& inst) {
  REQUIRE(inst.canonical_eq.conserves(inst.game));
  REQUIRE(inst.canonical_opt.conserves(inst.game));
  CHECK(wardrop_gap(inst.game, inst.canonical_eq) <= 1e-9);
  const double sum_eq = total_latency(inst.game, inst.canonical_eq);
  const double sum_opt = total_latency(inst.game, inst.canonical_opt);
  CHECK(sum_eq / sum_opt ==
        doctest::Approx(inst.predicted_poa).epsilon(1e-9));
  const double spread = compute_theta(inst.game);
  if (std::isinf(inst.theta)) {
    CHECK(std::isinf(spread));
  } else {
    CHECK(spread == doctest::Approx(inst.theta).epsilon(1e-9));
  }
}

// Solver agreement: the dynamics land on the canonical equilibrium's SUM
// (essential uniqueness) and never beat the candidate optimum from below.
void check_solver_agreement(const GeneratedInstance& inst) {
  const SolveReport eq = solve_equilibrium(inst.game);
  REQUIRE(eq.converged);
  const double canonical = total_latency(inst.game, inst.canonical_eq);
  CHECK(total_latency(inst.game, eq.profile) ==
        doctest::Approx(canonical).epsilon(1e-6));
  const SolveReport opt = solve_optimum(inst.game);
  REQUIRE(opt.converged);
  CHECK(opt.objective <=
        total_latency(inst.game, inst.canonical_opt) + 1e-9);
}

}  // namespace

TEST_CASE("generators: pigou-like two-link family") {
  SUBCASE("c = 0 is the unbounded-spread worst case") {
    const GeneratedInstance inst = gen_pigou_like(0.0);
    CHECK(inst.predicted_poa == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(std::isinf(inst.theta));
    CHECK(inst.construction == "pigou-like");
    check_certificates(inst);
  }
  SUBCASE("c = 1/2 reproduces 16/15 and theta 1") {
    const GeneratedInstance inst = gen_pigou_like(0.5);
    CHECK(inst.predicted_poa == doctest::Approx(16.0 / 15.0).epsilon(1e-14));
    CHECK(inst.theta == doctest::Approx(1.0));
    CHECK(inst.canonical_eq(0, 0) == doctest::Approx(0.5));
    CHECK(inst.canonical_eq(0, 1) == doctest::Approx(0.5));
    CHECK(inst.canonical_opt(0, 0) == doctest::Approx(0.75));
    CHECK(inst.canonical_opt(0, 1) == doctest::Approx(0.25));
    check_certificates(inst);
    check_solver_agreement(inst);
    const PoAReport poa = price_of_anarchy(inst.game);
    CHECK(poa.ratio == doctest::Approx(16.0 / 15.0).epsilon(1e-6));
  }
  SUBCASE("c = 1 is efficient") {
    const GeneratedInstance inst = gen_pigou_like(1.0);
    CHECK(inst.predicted_poa == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inst.theta == doctest::Approx(0.0));
    check_certificates(inst);
  }
  SUBCASE("rejects c outside [0, 1]") {
    CHECK_THROWS_AS(gen_pigou_like(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(gen_pigou_like(1.1), std::invalid_argument);
    CHECK_THROWS_AS(gen_pigou_like(std::nan("")), std::invalid_argument);
  }
}

TEST_CASE("generators: multilevel load-balancing construction") {
  const GeneratedInstance inst =
      gen_multilevel_lb(2.0, 1.0, identity(), 1.0, 2, 3);

  SUBCASE("level sizes and population shape") {
    CHECK(inst.game.num_resources() == 7);  // levels of size 1, 2, 4
    CHECK(inst.game.num_types() == 6);
    CHECK(inst.game.is_load_balancing());
    for (const PlayerType& type : inst.game.types()) {
      CHECK(type.demand == doctest::Approx(1.0));
      CHECK(type.strategies.size() == 2);
    }
    CHECK(inst.game.resource_index("r1_0") == 0);
    CHECK(inst.game.resource_index("r3_3") == 6);
  }
  SUBCASE("latencies interpolate between f and the constant f(k)") {
    // alpha_s*f(x) + beta_s with beta_s = 2^{s-3}*f(2); at x = k every
    // level costs exactly f(k).
    CHECK(inst.game.latency(0)(0.0) == doctest::Approx(0.5));
    CHECK(inst.game.latency(1)(0.0) == doctest::Approx(1.0));
    CHECK(inst.game.latency(6)(0.0) == doctest::Approx(2.0));
    for (int e = 0; e < inst.game.num_resources(); ++e) {
      CHECK(inst.game.latency(e)(2.0) == doctest::Approx(2.0));
    }
  }
  SUBCASE("every strategy costs exactly f(k) at the canonical equilibrium") {
    const Eigen::VectorXd loads = edge_loads(inst.game, inst.canonical_eq);
    const Eigen::VectorXd costs = strategy_costs(inst.game, loads);
    for (int s = 0; s < costs.size(); ++s) CHECK(costs[s] == 2.0);
    CHECK(wardrop_gap(inst.game, inst.canonical_eq) == 0.0);
  }
  SUBCASE("frozen predictions and certificates") {
    CHECK(inst.predicted_poa == doctest::Approx(12.0 / 11.0).epsilon(1e-13));
    check_certificates(inst);
    check_solver_agreement(inst);
    const GeneratedInstance m4 =
        gen_multilevel_lb(2.0, 1.0, identity(), 1.0, 2, 4);
    CHECK(m4.predicted_poa == doctest::Approx(8.0 / 7.0).epsilon(1e-13));
    const GeneratedInstance m8 =
        gen_multilevel_lb(2.0, 1.0, identity(), 1.0, 2, 8);
    CHECK(m8.predicted_poa == doctest::Approx(128.0 / 107.0).epsilon(1e-13));
  }
  SUBCASE("free-flow costs climb by exactly 1 + theta per level") {
    for (int i = 0; i < inst.game.num_types(); ++i) {
      const double tail = free_flow_cost(inst.game, i, 0);
      const double head = free_flow_cost(inst.game, i, 1);
      CHECK(head == doctest::Approx(2.0 * tail).epsilon(1e-12));
    }
    CHECK(compute_theta(inst.game) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("predictions increase in m toward the pointwise limit") {
    const double limit = gamma_theta_point(2.0, 1.0, identity(), 1.0);
    CHECK(limit == doctest::Approx(1.2).epsilon(1e-14));
    double previous = 1.0;
    for (int m = 2; m <= 8; ++m) {
      const GeneratedInstance step =
          gen_multilevel_lb(2.0, 1.0, identity(), 1.0, 2, m);
      CHECK(step.predicted_poa >= previous - 1e-12);
      CHECK(step.predicted_poa < limit);
      previous = step.predicted_poa;
    }
    const GeneratedInstance deep =
        gen_multilevel_lb(2.0, 1.0, identity(), 1.0, 2, 14);
    CHECK(deep.predicted_poa ==
          doctest::Approx(8192.0 / 6827.0).epsilon(1e-13));
    CHECK(std::abs(deep.predicted_poa - limit) < 0.01);
    CHECK(wardrop_gap(deep.game, deep.canonical_eq) == 0.0);
  }
  SUBCASE("non-dyadic parameters still certify") {
    const GeneratedInstance alt = gen_multilevel_lb(
        3.0, 1.0, LatencyFunction::monomial(2), 0.5, 3, 3);
    CHECK(alt.game.num_resources() == 13);  // levels of size 1, 3, 9
    check_certificates(alt);
  }
  SUBCASE("rejects broken parameters") {
    CHECK_THROWS_AS(gen_multilevel_lb(2.0, 1.0, identity(), 1.0, 3, 3),
                    std::invalid_argument);  // fan-in 3/2 not integral
    CHECK_THROWS_AS(gen_multilevel_lb(2.0, 1.0, identity(), 1.0, 2, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_multilevel_lb(1.0, 1.0, identity(), 1.0, 2, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_multilevel_lb(2.0, 1.0, identity(), 0.0, 2, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_multilevel_lb(2.0, 1.0, identity(), kInf, 2, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        gen_multilevel_lb(2.0, 1.0, LatencyFunction::parse("x+1"), 1.0, 2, 3),
        std::invalid_argument);
  }
}

TEST_CASE("generators: parallel-link gamma construction") {
  SUBCASE("identity-latency reference instance") {
    const GeneratedInstance inst = gen_parallel_gamma(
        2.0, 1.0, identity(), 0.5, 1.0, identity(), 2);
    CHECK(inst.game.num_resources() == 6);  // 2 fast links + 4 slow links
    CHECK(inst.game.total_demand() == doctest::Approx(6.0));
    CHECK(inst.theta == 0.0);
    // Both load patterns route the same total: 2*2 + 0.5*4 = 1*2 + 1*4.
    CHECK(inst.predicted_poa ==
          doctest::Approx(gamma_point(2.0, 1.0, identity(), 0.5, 1.0,
                                      identity()))
              .epsilon(1e-14));
    CHECK(inst.predicted_poa == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    const Eigen::VectorXd loads = edge_loads(inst.game, inst.canonical_eq);
    const Eigen::VectorXd costs = strategy_costs(inst.game, loads);
    for (int s = 0; s < costs.size(); ++s) {
      CHECK(costs[s] == doctest::Approx(1.0));  // f2(k2)*f1(k1) on every link
    }
    check_certificates(inst);
  }
  SUBCASE("quadratic-vs-linear instance with ratio above one") {
    const GeneratedInstance inst = gen_parallel_gamma(
        1.25, 1.0, LatencyFunction::monomial(2), 1.0, 1.2, identity(), 4);
    CHECK(inst.game.num_resources() == 9);  // 4 + 5 links
    CHECK(inst.game.total_demand() == doctest::Approx(10.0));
    CHECK(inst.predicted_poa ==
          doctest::Approx(125.0 / 122.0).epsilon(1e-13));
    check_certificates(inst);
    check_solver_agreement(inst);
    const PoAReport poa = price_of_anarchy(inst.game);
    CHECK(poa.ratio >= inst.predicted_poa - 1e-6);
  }
  SUBCASE("prediction approaches 1 as the loads degenerate") {
    const double k1 = 1.0 + 1e-6;
    const double gap = k1 - 1.0;
    const GeneratedInstance inst = gen_parallel_gamma(
        k1, 1.0, identity(), 0.5, 0.5 + gap, identity(), 1);
    CHECK(std::abs(inst.predicted_poa - 1.0) < 1e-4);
  }
  SUBCASE("rejects broken parameters") {
    CHECK_THROWS_AS(
        gen_parallel_gamma(1.0, 1.0, identity(), 0.5, 1.0, identity(), 2),
        std::invalid_argument);
    CHECK_THROWS_AS(
        gen_parallel_gamma(2.0, 1.0, identity(), 1.0, 0.5, identity(), 2),
        std::invalid_argument);
    CHECK_THROWS_AS(
        gen_parallel_gamma(2.0, 1.0, identity(), 0.5, 1.2, identity(), 1),
        std::invalid_argument);  // 1/0.7 links is not integral
    CHECK_THROWS_AS(gen_parallel_gamma(2.0, 1.0,
                                       LatencyFunction::parse("x+1"), 0.5,
                                       1.0, identity(), 2),
                    std::invalid_argument);
  }
}

TEST_CASE("generators: two-link eta construction") {
  SUBCASE("linear reference instance hits 8/7") {
    const GeneratedInstance inst = gen_twolink_eta(2.0, 1.0, identity(), 1.0);
    CHECK(inst.predicted_poa == doctest::Approx(8.0 / 7.0).epsilon(1e-14));
    CHECK(inst.theta == doctest::Approx(1.0));
    // Free-flow certificate l_u(0)*(1+theta) = l_v(0), and at the
    // equilibrium both links cost (1+theta)*f(k).
    CHECK(inst.game.latency(0)(0.0) * 2.0 ==
          doctest::Approx(inst.game.latency(1)(0.0)));
    const Eigen::VectorXd loads = edge_loads(inst.game, inst.canonical_eq);
    const Eigen::VectorXd costs = strategy_costs(inst.game, loads);
    CHECK(costs[0] == doctest::Approx(4.0));
    CHECK(costs[1] == doctest::Approx(4.0));
    check_certificates(inst);
    check_solver_agreement(inst);
  }
  SUBCASE("the canonical candidate is the true optimum") {
    const GeneratedInstance inst = gen_twolink_eta(2.0, 1.0, identity(), 1.0);
    const PoAReport solved = price_of_anarchy(inst.game);
    CHECK(solved.ratio == doctest::Approx(8.0 / 7.0).epsilon(1e-6));
    const PoAReport grid = brute_force_poa(inst.game, 10000);
    CHECK(grid.ratio == doctest::Approx(8.0 / 7.0).epsilon(1e-3));
    CHECK(grid.opt_cost ==
          doctest::Approx(total_latency(inst.game, inst.canonical_opt))
              .epsilon(1e-3));
  }
  SUBCASE("k/l at the polynomial maximizer attains the class bound") {
    for (double theta : {0.5, 1.0}) {
      const GeneratedInstance inst = gen_twolink_eta(
          std::sqrt(3.0), 1.0, LatencyFunction::monomial(2), theta);
      CHECK(inst.predicted_poa ==
            doctest::Approx(eta_theta_poly(2, theta)).epsilon(1e-12));
      check_certificates(inst);
    }
  }
  SUBCASE("rejects broken parameters") {
    CHECK_THROWS_AS(gen_twolink_eta(1.0, 1.0, identity(), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_twolink_eta(2.0, 1.0, identity(), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_twolink_eta(2.0, 1.0, identity(), kInf),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        gen_twolink_eta(2.0, 1.0, LatencyFunction::parse("x+1"), 1.0),
        std::invalid_argument);
  }
}

TEST_CASE("generators: network expansion of the multilevel construction") {
  const GeneratedInstance base =
      gen_multilevel_lb(2.0, 1.0, identity(), 1.0, 2, 3);
  const GeneratedInstance inst = expand_to_network(base, 4, 0.5);

  SUBCASE("network shape") {
    REQUIRE(inst.network.has_value());
    CHECK(inst.network->single_source());
    CHECK(inst.network->num_commodities() == 6);
    CHECK(inst.construction == "network-expansion");
    for (int i = 0; i < inst.game.num_types(); ++i) {
      CHECK(inst.game.type(i).strategies.size() == 2);
      CHECK(inst.game.type(i).demand == doctest::Approx(1.0));
    }
  }
  SUBCASE("strategy costs are h*(original) + beta") {
    // Free-flow: chains contribute h*beta_s, the sink edge adds beta.
    CHECK(free_flow_cost(inst.game, 0, 0) == doctest::Approx(2.5));
    CHECK(free_flow_cost(inst.game, 0, 1) == doctest::Approx(4.5));
    CHECK(free_flow_cost(inst.game, 5, 0) == doctest::Approx(4.5));
    CHECK(free_flow_cost(inst.game, 5, 1) == doctest::Approx(8.5));
    // Loaded: every strategy costs 4*f(2) + 0.5 at the mapped equilibrium.
    const Eigen::VectorXd loads = edge_loads(inst.game, inst.canonical_eq);
    const Eigen::VectorXd costs = strategy_costs(inst.game, loads);
    for (int s = 0; s < costs.size(); ++s) CHECK(costs[s] == 8.5);
    CHECK(wardrop_gap(inst.game, inst.canonical_eq) == 0.0);
  }
  SUBCASE("frozen prediction and certificates") {
    CHECK(inst.predicted_poa == doctest::Approx(51.0 / 47.0).epsilon(1e-13));
    CHECK(inst.predicted_poa >= base.predicted_poa - 0.01);
    check_certificates(inst);
    check_solver_agreement(inst);
  }
  SUBCASE("the expansion's free-flow spread shrinks below the declared base") {
    CHECK(inst.theta == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(inst.theta < base.theta);
    CHECK(compute_theta(inst.game) ==
          doctest::Approx(inst.theta).epsilon(1e-12));
  }
  SUBCASE("column generation on the network reproduces the bound") {
    const NetworkPoAReport poa = network_price_of_anarchy(*inst.network);
    CHECK(poa.ratio >= inst.predicted_poa - 1e-6);
    CHECK(poa.eq_cost ==
          doctest::Approx(total_latency(inst.game, inst.canonical_eq))
              .epsilon(1e-6));
  }
  SUBCASE("rejects broken parameters") {
    CHECK_THROWS_AS(expand_to_network(base, 3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(expand_to_network(base, 4, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(expand_to_network(base, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(expand_to_network(base, 4, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(expand_to_network(gen_pigou_like(0.5), 4, 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("generators: generate() dispatches on the declarative spec") {
  SUBCASE("each kind round-trips") {
    GeneratorSpec pigou{GeneratorKind::PigouLike, {{"c", 0.5}}, "", ""};
    CHECK(generate(pigou).predicted_poa ==
          doctest::Approx(16.0 / 15.0).epsilon(1e-14));

    GeneratorSpec multilevel{
        GeneratorKind::MultiLevelLB,
        {{"k", 2.0}, {"l", 1.0}, {"theta", 1.0}, {"n", 2.0}, {"m", 3.0}},
        "x",
        ""};
    CHECK(generate(multilevel).predicted_poa ==
          doctest::Approx(12.0 / 11.0).epsilon(1e-13));

    GeneratorSpec gamma{
        GeneratorKind::ParallelGamma,
        {{"k1", 1.25}, {"l1", 1.0}, {"k2", 1.0}, {"l2", 1.2}, {"n", 4.0}},
        "x^2",
        "x"};
    CHECK(generate(gamma).predicted_poa ==
          doctest::Approx(125.0 / 122.0).epsilon(1e-13));

    GeneratorSpec eta{GeneratorKind::TwoLinkEta,
                      {{"k", 2.0}, {"l", 1.0}, {"theta", 1.0}},
                      "x",
                      ""};
    CHECK(generate(eta).predicted_poa ==
          doctest::Approx(8.0 / 7.0).epsilon(1e-14));

    GeneratorSpec expansion{GeneratorKind::NetworkExpansion,
                            {{"k", 2.0},
                             {"l", 1.0},
                             {"theta", 1.0},
                             {"n", 2.0},
                             {"m", 3.0},
                             {"h", 4.0},
                             {"beta", 0.5}},
                            "x",
                            ""};
    const GeneratedInstance net = generate(expansion);
    CHECK(net.predicted_poa == doctest::Approx(51.0 / 47.0).epsilon(1e-13));
    CHECK(net.network.has_value());
  }
  SUBCASE("missing pieces are rejected by name") {
    GeneratorSpec missing_c{GeneratorKind::PigouLike, {}, "", ""};
    CHECK_THROWS_AS(generate(missing_c), std::invalid_argument);

    GeneratorSpec missing_latency{
        GeneratorKind::TwoLinkEta,
        {{"k", 2.0}, {"l", 1.0}, {"theta", 1.0}},
        "",
        ""};
    CHECK_THROWS_AS(generate(missing_latency), std::invalid_argument);

    GeneratorSpec fractional_n{
        GeneratorKind::MultiLevelLB,
        {{"k", 2.0}, {"l", 1.0}, {"theta", 1.0}, {"n", 2.5}, {"m", 3.0}},
        "x",
        ""};
    CHECK_THROWS_AS(generate(fractional_n), std::invalid_argument);
  }
}
