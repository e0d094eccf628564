#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "routing/latency.hpp"

namespace routing {

// Network shape a bound applies to: arbitrary strategy sets, or games whose
// strategies meet only at shared endpoints (parallel paths).
enum class Topology { General, PathDisjoint };

// How a bound value was obtained: exact closed form, or a one-dimensional
// numeric maximization.
enum class BoundMethod { ClosedForm, Numeric };

// Polynomial class picked out by degree range [q, p] plus a free-flow
// spread theta (theta may be +infinity).
struct BoundQuery {
  int p = 1;
  int q = 1;
  double theta = 0.0;
  Topology topology = Topology::General;
};

// A price-of-anarchy bound together with its two components; value is the
// larger of the congestion-only term `gamma` and the theta-dependent term.
struct BoundResult {
  double value = 1.0;
  double gamma = 1.0;
  double theta_component = 1.0;
  BoundMethod method = BoundMethod::ClosedForm;
};

// Pointwise worst-case ratio for one homogeneous latency f at equilibrium
// load k and optimum load l, k > l > 0:
//
//   ((k-l) f(k) + k f(k) theta) / ((k-l) f(k) + [(k-l) f(k) + l f(l)] theta).
//
// theta = +infinity returns the exact limit k f(k) / ((k-l) f(k) + l f(l)).
// Throws std::invalid_argument on violated preconditions or non-homogeneous f.
double gamma_theta_point(double k, double l, const LatencyFunction& f,
                         double theta);

// Parallel-path counterpart of gamma_theta_point, k > l > 0:
//
//   (k f(k) (1 + theta)) / (k f(k) + [(k-l) f(k) + l f(l)] theta),
//
// with the same +infinity limit and error behavior. Never exceeds
// gamma_theta_point on the same arguments.
double eta_theta_point(double k, double l, const LatencyFunction& f,
                       double theta);

// Two-resource ratio with an overloaded resource (k1 > l1 > 0, latency f1)
// against an underloaded one (0 < k2 <= l2, latency f2):
//
//   ((l2-k2) f2(k2) k1 f1(k1) + (k1-l1) f1(k1) k2 f2(k2))
//   -----------------------------------------------------.
//   ((l2-k2) f2(k2) l1 f1(l1) + (k1-l1) f1(k1) l2 f2(l2))
//
// Throws std::invalid_argument on violated preconditions, non-homogeneous
// latencies, or a vanishing denominator.
double gamma_point(double k1, double l1, const LatencyFunction& f1, double k2,
                   double l2, const LatencyFunction& f2);

// Worst-case congestion-only ratio for polynomials with degrees in [q, p].
// Exactly 1 when q == p; otherwise evaluated in closed form via the crossing
// point of the two degree envelopes. Throws std::invalid_argument unless
// 1 <= q <= p.
double gamma_poly(int p, int q);

// Worst-case theta term for degree-p polynomials on general topologies:
// sup over t > 1 of
//
//   (t^{p+1}(1+theta) - t^p) / (t^{p+1}(1+theta) - t^p(1+theta) + theta),
//
// computed numerically (log grid + golden-section refinement). Depends on p
// only. Requires p >= 1 and 0 <= theta < infinity; theta = 0 gives exactly 1.
double gamma_theta_poly(int p, double theta);

// Worst-case theta term for degree-p polynomials on parallel paths, in
// closed form:
//
//   (1+theta)(p+1)^{(p+1)/p} / ((1+theta)(p+1)^{(p+1)/p} - theta p).
//
// Requires p >= 1 and 0 <= theta < infinity.
double eta_theta_poly(int p, double theta);

// Independent numeric maximization of the ratio behind eta_theta_poly:
// sup over t > 1 of t^{p+1}(1+theta) / (t^{p+1}(1+theta) - t^p theta + theta).
// Agrees with the closed form to ~1e-10; exposed for cross-checking.
double eta_theta_poly_numeric(int p, double theta);

// Limit of both theta terms as theta grows without bound:
//
//   (p+1)(p+1)^{1/p} / ((p+1)(p+1)^{1/p} - p).
//
// Requires p >= 1.
double gamma_infinity_poly(int p);

// Price-of-anarchy bound for the query's polynomial class and topology:
// General -> max(gamma_poly, gamma_theta_poly); PathDisjoint ->
// max(gamma_poly, eta_theta_poly); theta = +infinity -> gamma_infinity_poly
// for either topology. Throws std::invalid_argument on an invalid query.
BoundResult poa_bound(const BoundQuery& query);

// Coarser but immediate bound max(1 + theta, gamma_poly(p, q)); dominates
// the PathDisjoint poa_bound. Requires finite theta.
double simple_upper_bound(int p, int q, double theta);

// poa_bound sampled over a nondecreasing theta grid for one topology;
// returns (theta, value) pairs. Throws std::invalid_argument on an unsorted
// grid or invalid (p, q).
std::vector<std::pair<double, double>> bound_curve(
    int p, int q, const std::vector<double>& theta_grid, Topology topology);

// CSV rows `theta,general,path_disjoint` for both topologies over the grid.
void write_bound_curve_csv(std::ostream& os, int p, int q,
                           const std::vector<double>& theta_grid);

// One table row: both topologies' bounds for a (p, q, theta) cell.
struct BoundTableRow {
  int p = 1;
  int q = 1;
  double theta = 0.0;
  double general = 1.0;
  double path_disjoint = 1.0;
  BoundMethod method = BoundMethod::ClosedForm;
};

// All cells with 1 <= q <= p <= max_p crossed with the theta grid, in
// (p, q) lexicographic then grid order.
std::vector<BoundTableRow> poly_bound_table(int max_p,
                                            const std::vector<double>& thetas);

// CSV with header `p,q,theta,general,path_disjoint,method`; values printed
// to four decimals, theta printed compactly ("0.5", "inf").
void write_bound_table_csv(std::ostream& os,
                           const std::vector<BoundTableRow>& rows);

}  // namespace routing
