#include "routing/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace routing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad(const std::string& what) {
  throw std::invalid_argument("bounds: " + what);
}

void require_homogeneous(const LatencyFunction& f, const char* name) {
  if (!f.homogeneous())
    bad(std::string(name) + " must be homogeneous (zero free-flow cost)");
}

void require_theta(double theta) {
  if (!(theta >= 0.0)) bad("theta must be nonnegative");
}

void require_finite_theta(double theta) {
  require_theta(theta);
  if (std::isinf(theta)) bad("theta must be finite here");
}

void require_degrees(int p, int q) {
  if (q < 1 || p < q) bad("degree range needs 1 <= q <= p");
}

// Shared +infinity limit of both pointwise ratios.
double infinity_point(double k, double l, const LatencyFunction& f) {
  const double fk = f(k);
  const double fl = f(l);
  return k * fk / ((k - l) * fk + l * fl);
}

// Maximize a smooth objective over t > 1: scan a log-spaced grid on
// (1, 10^4], then tighten around the best grid point by golden section.
// No unimodality is assumed; the grid is dense enough to land the
// refinement inside the right basin for the ratios used here.
double sup_over_t(const std::function<double(double)>& objective) {
  constexpr int kGridPoints = 100000;
  double best_t = 0.0;
  double best_value = -kInf;
  int best_index = 0;
  for (int j = 0; j < kGridPoints; ++j) {
    const double t = std::pow(10.0, 4.0 * (j + 1) / kGridPoints);
    const double value = objective(t);
    if (value > best_value) {
      best_value = value;
      best_t = t;
      best_index = j;
    }
  }
  // Bracket one grid step on each side of the winner (clamped to t > 1).
  double a = best_index == 0
                 ? 0.5 * (1.0 + best_t)
                 : std::pow(10.0, 4.0 * best_index / kGridPoints);
  double b = best_index == kGridPoints - 1
                 ? best_t
                 : std::pow(10.0, 4.0 * (best_index + 2) / kGridPoints);
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - golden * (b - a);
  double x2 = a + golden * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  // Width 1e-12 can sit below one ulp near t = 10^4, so cap the iterations
  // rather than trusting the width test alone.
  for (int iter = 0; iter < 200 && b - a > 1e-12; ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + golden * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - golden * (b - a);
      f1 = objective(x1);
    }
  }
  const double mid = objective(0.5 * (a + b));
  return std::max(best_value, mid);
}

// Format a double without trailing noise: "0.5", "1", "1e+06", "inf".
std::string compact_number(double x) {
  if (std::isinf(x)) return "inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", x);
  return buffer;
}

std::string fixed4(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", x);
  return buffer;
}

}  // namespace

double gamma_theta_point(double k, double l, const LatencyFunction& f,
                         double theta) {
  if (!(k > l && l > 0.0)) bad("need k > l > 0");
  require_theta(theta);
  require_homogeneous(f, "f");
  if (std::isinf(theta)) return infinity_point(k, l, f);
  const double fk = f(k);
  const double fl = f(l);
  const double base = (k - l) * fk;
  return (base + k * fk * theta) / (base + (base + l * fl) * theta);
}

double eta_theta_point(double k, double l, const LatencyFunction& f,
                       double theta) {
  if (!(k > l && l > 0.0)) bad("need k > l > 0");
  require_theta(theta);
  require_homogeneous(f, "f");
  if (std::isinf(theta)) return infinity_point(k, l, f);
  const double fk = f(k);
  const double fl = f(l);
  return k * fk * (1.0 + theta) /
         (k * fk + ((k - l) * fk + l * fl) * theta);
}

double gamma_point(double k1, double l1, const LatencyFunction& f1, double k2,
                   double l2, const LatencyFunction& f2) {
  if (!(k1 > l1 && l1 > 0.0)) bad("need k1 > l1 > 0");
  if (!(k2 > 0.0 && k2 <= l2)) bad("need 0 < k2 <= l2");
  require_homogeneous(f1, "f1");
  require_homogeneous(f2, "f2");
  const double slack = (l2 - k2) * f2(k2);
  const double excess = (k1 - l1) * f1(k1);
  const double denominator = slack * l1 * f1(l1) + excess * l2 * f2(l2);
  if (denominator == 0.0) bad("degenerate denominator");
  return (slack * k1 * f1(k1) + excess * k2 * f2(k2)) / denominator;
}

double gamma_poly(int p, int q) {
  require_degrees(p, q);
  if (q == p) return 1.0;
  const double dp = p;
  const double dq = q;
  // Crossing point of the degree-q and degree-p envelopes.
  const double r = std::pow(std::pow(dp + 1.0, dp + 1.0) * std::pow(dq, dq) /
                                (std::pow(dq + 1.0, dq + 1.0) * std::pow(dp, dp)),
                            1.0 / (dp - dq));
  return std::pow(dp, dp) * std::pow(r, dp + 1.0) /
         (std::pow(dp + 1.0, dp + 1.0) * (r - 1.0));
}

double gamma_theta_poly(int p, double theta) {
  require_degrees(p, 1);
  require_finite_theta(theta);
  if (theta == 0.0) return 1.0;  // ratio is identically 1
  const double dp = p;
  return sup_over_t([dp, theta](double t) {
    const double tp = std::pow(t, dp);
    const double tp1 = tp * t;
    return (tp1 * (1.0 + theta) - tp) /
           (tp1 * (1.0 + theta) - tp * (1.0 + theta) + theta);
  });
}

double eta_theta_poly(int p, double theta) {
  require_degrees(p, 1);
  require_finite_theta(theta);
  const double dp = p;
  const double peak = (1.0 + theta) * std::pow(dp + 1.0, (dp + 1.0) / dp);
  return peak / (peak - theta * dp);
}

double eta_theta_poly_numeric(int p, double theta) {
  require_degrees(p, 1);
  require_finite_theta(theta);
  if (theta == 0.0) return 1.0;
  const double dp = p;
  return sup_over_t([dp, theta](double t) {
    const double tp = std::pow(t, dp);
    const double tp1 = tp * t;
    return tp1 * (1.0 + theta) / (tp1 * (1.0 + theta) - tp * theta + theta);
  });
}

double gamma_infinity_poly(int p) {
  require_degrees(p, 1);
  const double dp = p;
  const double peak = (dp + 1.0) * std::pow(dp + 1.0, 1.0 / dp);
  return peak / (peak - dp);
}

BoundResult poa_bound(const BoundQuery& query) {
  require_degrees(query.p, query.q);
  require_theta(query.theta);
  BoundResult result;
  result.gamma = gamma_poly(query.p, query.q);
  if (std::isinf(query.theta)) {
    // Both topologies share the same limit, which dominates gamma.
    result.theta_component = gamma_infinity_poly(query.p);
    result.method = BoundMethod::ClosedForm;
  } else if (query.topology == Topology::General) {
    result.theta_component = gamma_theta_poly(query.p, query.theta);
    result.method = query.theta > 0.0 ? BoundMethod::Numeric
                                      : BoundMethod::ClosedForm;
  } else {
    result.theta_component = eta_theta_poly(query.p, query.theta);
    result.method = BoundMethod::ClosedForm;
  }
  result.value = std::max(result.gamma, result.theta_component);
  return result;
}

double simple_upper_bound(int p, int q, double theta) {
  require_degrees(p, q);
  require_finite_theta(theta);
  return std::max(1.0 + theta, gamma_poly(p, q));
}

std::vector<std::pair<double, double>> bound_curve(
    int p, int q, const std::vector<double>& theta_grid, Topology topology) {
  require_degrees(p, q);
  for (size_t i = 1; i < theta_grid.size(); ++i)
    if (theta_grid[i] < theta_grid[i - 1]) bad("theta grid must be sorted");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(theta_grid.size());
  for (double theta : theta_grid)
    curve.emplace_back(theta, poa_bound({p, q, theta, topology}).value);
  return curve;
}

void write_bound_curve_csv(std::ostream& os, int p, int q,
                           const std::vector<double>& theta_grid) {
  const auto general = bound_curve(p, q, theta_grid, Topology::General);
  const auto disjoint = bound_curve(p, q, theta_grid, Topology::PathDisjoint);
  os << "theta,general,path_disjoint\n";
  char buffer[64];
  for (size_t i = 0; i < theta_grid.size(); ++i) {
    std::snprintf(buffer, sizeof buffer, ",%.6f,%.6f", general[i].second,
                  disjoint[i].second);
    os << compact_number(theta_grid[i]) << buffer << "\n";
  }
}

std::vector<BoundTableRow> poly_bound_table(
    int max_p, const std::vector<double>& thetas) {
  if (max_p < 1) bad("max_p must be at least 1");
  std::vector<BoundTableRow> rows;
  for (int p = 1; p <= max_p; ++p) {
    for (int q = 1; q <= p; ++q) {
      for (double theta : thetas) {
        require_theta(theta);
        BoundTableRow row;
        row.p = p;
        row.q = q;
        row.theta = theta;
        const auto general =
            poa_bound({p, q, theta, Topology::General});
        const auto disjoint =
            poa_bound({p, q, theta, Topology::PathDisjoint});
        row.general = general.value;
        row.path_disjoint = disjoint.value;
        row.method = general.method == BoundMethod::Numeric ||
                             disjoint.method == BoundMethod::Numeric
                         ? BoundMethod::Numeric
                         : BoundMethod::ClosedForm;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_bound_table_csv(std::ostream& os,
                           const std::vector<BoundTableRow>& rows) {
  os << "p,q,theta,general,path_disjoint,method\n";
  for (const BoundTableRow& row : rows) {
    os << row.p << ',' << row.q << ',' << compact_number(row.theta) << ','
       << fixed4(row.general) << ',' << fixed4(row.path_disjoint) << ','
       << (row.method == BoundMethod::Numeric ? "numeric" : "closed-form")
       << "\n";
  }
}

}  // namespace routing
