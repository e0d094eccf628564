#include "routing/latency.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace routing {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (double b = x; n > 0; n >>= 1, b *= b)
    if (n & 1) r *= b;
  return r;
}

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument("latency: " + msg);
}

}  // namespace

LatencyFunction::LatencyFunction(std::map<int, double> coefficients,
                                 double constant)
    : coeffs_(std::move(coefficients)), beta_(constant) {
  if (!(beta_ >= 0.0)) bad("constant term must be >= 0");
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (it->first < 1) bad("degrees must be >= 1");
    if (!(it->second >= 0.0)) bad("coefficients must be >= 0");
    it = it->second == 0.0 ? coeffs_.erase(it) : std::next(it);
  }
  if (coeffs_.empty() && beta_ == 0.0) bad("at least one term must be > 0");
}

LatencyFunction LatencyFunction::constant(double beta) { return {{}, beta}; }

LatencyFunction LatencyFunction::monomial(int degree, double alpha,
                                          double beta) {
  return {{{degree, alpha}}, beta};
}

LatencyFunction LatencyFunction::scale_add(const LatencyFunction& f, double a,
                                           double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) bad("scale_add needs a, b >= 0");
  std::map<int, double> coeffs;
  if (a > 0.0)
    for (const auto& [d, alpha] : f.coeffs_) coeffs[d] = a * alpha;
  return {std::move(coeffs), a * f.beta_ + b};
}

double LatencyFunction::operator()(double x) const {
  x = std::max(x, 0.0);
  double v = beta_;
  for (const auto& [d, alpha] : coeffs_) v += alpha * ipow(x, d);
  return v;
}

double LatencyFunction::derivative(double x) const {
  x = std::max(x, 0.0);
  double v = 0.0;
  for (const auto& [d, alpha] : coeffs_) v += alpha * d * ipow(x, d - 1);
  return v;
}

double LatencyFunction::antiderivative(double x) const {
  x = std::max(x, 0.0);
  double v = beta_ * x;
  for (const auto& [d, alpha] : coeffs_) v += alpha * ipow(x, d + 1) / (d + 1);
  return v;
}

double LatencyFunction::marginal(double x) const {
  return (*this)(x) + std::max(x, 0.0) * derivative(x);
}

std::optional<int> LatencyFunction::min_degree() const {
  if (coeffs_.empty()) return std::nullopt;
  return coeffs_.begin()->first;
}

std::optional<int> LatencyFunction::max_degree() const {
  if (coeffs_.empty()) return std::nullopt;
  return coeffs_.rbegin()->first;
}

std::string LatencyFunction::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    if (!first) out << " + ";
    first = false;
    if (it->second != 1.0) out << it->second << "*";
    out << "x";
    if (it->first != 1) out << "^" << it->first;
  }
  if (beta_ != 0.0 || first) {
    if (!first) out << " + ";
    out << beta_;
  }
  return out.str();
}

LatencyFunction LatencyFunction::parse(const std::string& expr) {
  std::string s;
  for (char c : expr)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) bad("empty expression");

  auto number = [](const std::string& tok) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      bad("cannot parse number '" + tok + "'");
    }
    if (used != tok.size()) bad("cannot parse number '" + tok + "'");
    return v;
  };

  std::map<int, double> coeffs;
  double beta = 0.0;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find('+', pos);
    if (next == std::string::npos) next = s.size();
    std::string term = s.substr(pos, next - pos);
    pos = next + 1;
    if (term.empty()) bad("empty term in '" + expr + "'");

    std::size_t xpos = term.find('x');
    if (xpos == std::string::npos) {
      beta += number(term);
      continue;
    }
    double a = 1.0;
    if (xpos > 0) {
      std::string head = term.substr(0, xpos);
      if (head.back() == '*') head.pop_back();
      a = number(head);
    }
    int d = 1;
    if (xpos + 1 < term.size()) {
      if (term[xpos + 1] != '^') bad("expected '^' in '" + term + "'");
      double dv = number(term.substr(xpos + 2));
      d = static_cast<int>(dv);
      if (d != dv || d < 1) bad("exponent must be a positive integer");
    }
    coeffs[d] += a;
  }
  return {std::move(coeffs), beta};
}

double eval_latency(const LatencyFunction& f, double x) { return f(x); }

LatencyFunction homogenize(const LatencyFunction& f) {
  if (f.coefficients().empty())
    throw std::invalid_argument(
        "latency: constant function homogenizes to zero");
  return {f.coefficients(), 0.0};
}

}  // namespace routing
