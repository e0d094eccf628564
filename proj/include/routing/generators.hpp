#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "routing/game.hpp"
#include "routing/latency.hpp"
#include "routing/network.hpp"

namespace routing {

// The worst-case constructions this module can build.
enum class GeneratorKind {
  PigouLike,
  MultiLevelLB,
  ParallelGamma,
  TwoLinkEta,
  NetworkExpansion,
};

// Declarative request for one construction: the kind, its numeric
// parameters by name, and the base latency formula(s) in the parser's
// mini-language where the construction needs them. generate() validates
// that everything the chosen kind requires is present.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::PigouLike;
  std::map<std::string, double> parameters;
  std::string latency;   // base f (multilevel-lb, twolink-eta, expansion)
  std::string latency2;  // second base (parallel-gamma only)
};

// A constructed instance bundled with the profiles that certify it.
//
// `canonical_eq` always has Wardrop gap 0 (up to rounding); `canonical_opt`
// is the profile the construction compares against, which for some
// constructions is a certified candidate rather than the true optimum, so
// `predicted_poa` = SUM(canonical_eq)/SUM(canonical_opt) is a lower bound
// on the instance's Price of Anarchy (and exact where noted). `theta` is
// the instance's free-flow spread; compute_theta(game) reproduces it.
struct GeneratedInstance {
  CongestionGame game;
  std::optional<NetworkCongestionGame> network;  // network-expansion only
  FlowProfile canonical_eq;
  FlowProfile canonical_opt;
  double predicted_poa = 1.0;
  double theta = 0.0;  // +infinity allowed
  std::string construction;
  std::vector<std::pair<std::string, double>> parameters;
  std::optional<LatencyFunction> base_latency;
};

// Two parallel links, latencies 1 and x + c, unit demand. The equilibrium
// puts c on the constant link; predicted_poa = 4/((c+1)(3-c)) is the exact
// Price of Anarchy and theta = 1/c - 1 (+infinity at c = 0). Requires
// 0 <= c <= 1.
GeneratedInstance gen_pigou_like(double c);

// Layered load-balancing construction approaching gamma_theta_point(k,l,f)
// from below as m grows. Level s in 1..m holds n^{s-1}*(l*n/k)^{m-s}
// resources with latency alpha_s*f(x) + beta_s, where
// alpha_s = 1 - (1+theta)^{s-m} and beta_s = (1+theta)^{s-m}*f(k); each
// population (one per consecutive-level resource pair, demand k/n, fan-out
// n, fan-in l*n/k) chooses between its two endpoint resources. At the
// canonical equilibrium every strategy costs exactly f(k). Requires
// k > l > 0, homogeneous f, theta > 0, m >= 2, and l*n/k a positive
// integer.
GeneratedInstance gen_multilevel_lb(double k, double l,
                                    const LatencyFunction& f, double theta,
                                    int n, int m);

// Parallel-link construction realizing gamma_point(k1,l1,f1,k2,l2,f2) as
// its SUM ratio: n links with latency f2(k2)*f1(x) carrying k1 each at
// equilibrium, and ((k1-l1)/(l2-k2))*n links with latency f1(k1)*f2(x)
// carrying k2 each; the candidate optimum moves everyone to loads
// (l1, l2). All free-flow costs are zero, so theta = 0. Requires
// k1 > l1 > 0, 0 < k2 < l2, homogeneous f1 and f2, and
// ((k1-l1)/(l2-k2))*n a positive integer.
GeneratedInstance gen_parallel_gamma(double k1, double l1,
                                     const LatencyFunction& f1, double k2,
                                     double l2, const LatencyFunction& f2,
                                     int n);

// Two links u: theta*f(x) + f(k) and v: (1+theta)*f(k) constant, demand k.
// All flow on u is an equilibrium (both links cost (1+theta)*f(k)); the
// candidate optimum splits (l, k-l), giving predicted_poa =
// eta_theta_point(k,l,f,theta). The candidate is the true optimum — and
// the prediction the exact Price of Anarchy — exactly when l satisfies
// f(l) + l*f'(l) = f(k), i.e. when u's marginal cost at l matches its cost
// at full load; for f = x^p that means l = k/(p+1)^(1/p). Other (k, l)
// pairs still yield a valid instance, but its true optimum beats the
// candidate and the prediction only lower-bounds the exact ratio. Requires
// k > l > 0, homogeneous f, theta > 0.
GeneratedInstance gen_twolink_eta(double k, double l, const LatencyFunction& f,
                                  double theta);

// Rebuild a multilevel load-balancing instance as a single-source network
// game: resource e at level s becomes a chain of alpha_s*h edges with
// latency f followed by beta_s*h/beta edges with constant latency beta, and
// each population routes from the shared source to its own sink through
// exactly one of its two endpoint chains plus one population-specific
// constant-beta edge. Every mapped profile's strategy costs are
// h*(original cost) + beta, so the mapped equilibrium survives and
// predicted_poa = (SUM_eq*h + W*beta)/(SUM_opt*h + W*beta) with W the total
// demand. The declared theta is the expansion's own (strictly smaller)
// free-flow spread. Requires a multilevel-lb instance, h >= 1, beta > 0,
// and alpha_s*h, beta_s*h/beta integral for every level.
GeneratedInstance expand_to_network(const GeneratedInstance& lb_instance,
                                    int h, double beta);

// Dispatch on spec.kind, reading the construction's parameters by name
// (pigou-like: c; multilevel-lb: k, l, theta, n, m, latency; parallel-gamma:
// k1, l1, k2, l2, n, latency, latency2; twolink-eta: k, l, theta, latency;
// network-expansion: multilevel-lb parameters plus h, beta). Throws
// std::invalid_argument on missing or non-integral parameters.
GeneratedInstance generate(const GeneratorSpec& spec);

}  // namespace routing
