#pragma once

#include <map>
#include <optional>
#include <string>

namespace routing {

// Nonnegative-coefficient polynomial congestion cost
//
//   l(x) = sum_d alpha_d * x^d + beta,   d >= 1, alpha_d >= 0, beta >= 0,
//
// with at least one strictly positive term. Evaluation is continuous and
// non-decreasing on x >= 0; l(0) = beta is the free-flow value.
class LatencyFunction {
 public:
  // Throws std::invalid_argument unless every alpha_d >= 0 (d >= 1),
  // beta >= 0, and at least one term is strictly positive. Zero
  // coefficients are dropped.
  LatencyFunction(std::map<int, double> coefficients, double constant);

  static LatencyFunction constant(double beta);
  static LatencyFunction monomial(int degree, double alpha = 1.0,
                                  double beta = 0.0);
  // a * f(x) + b; validates the combined result rather than the parts, so
  // a == 0 is fine as long as b > 0.
  static LatencyFunction scale_add(const LatencyFunction& f, double a,
                                   double b);
  // Mini-language: sums of "a*x^p", "x^p", "a*x", "x", and plain numbers,
  // e.g. "1 + x^4" or "0.5*x^2+2*x". Throws std::invalid_argument.
  static LatencyFunction parse(const std::string& expr);

  // l(x); negative x from numerical jitter is clamped to 0.
  double operator()(double x) const;
  double derivative(double x) const;
  // Integral of l from 0 to x.
  double antiderivative(double x) const;
  // Marginal cost l(x) + x * l'(x).
  double marginal(double x) const;

  const std::map<int, double>& coefficients() const { return coeffs_; }
  double constant_term() const { return beta_; }
  bool homogeneous() const { return beta_ == 0.0; }
  // Smallest / largest degree with a positive coefficient; empty when the
  // function is a pure constant.
  std::optional<int> min_degree() const;
  std::optional<int> max_degree() const;

  std::string to_string() const;
  bool operator==(const LatencyFunction&) const = default;

 private:
  std::map<int, double> coeffs_;
  double beta_;
};

// l(x) as a free function, matching the rest of the operation vocabulary.
double eval_latency(const LatencyFunction& f, double x);

// f with the constant term dropped, so homogenize(f)(x) = f(x) - f(0).
// Throws std::invalid_argument when f is a pure constant (the result would
// be identically zero).
LatencyFunction homogenize(const LatencyFunction& f);

}  // namespace routing
