#include "semitorus/exponents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "semitorus/errors.hpp"

namespace semitorus {

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos)
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(s));
  std::string frac = s.substr(dot + 1);
  if (frac.size() > 12) throw ConfigError("too many decimals in rational '" + s + "'");
  long long den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  bool neg = !s.empty() && s[0] == '-';
  long long whole = dot == 0 || (dot == 1 && neg) ? 0 : std::stoll(s.substr(0, dot));
  long long part = frac.empty() ? 0 : std::stoll(frac);
  Rational r = Rational(std::llabs(whole)) + Rational(part, den);
  return neg ? -r : r;
}

ExponentBudget gamma_prime(const Rational& alpha, const Rational& beta, int d) {
  if (d < 1) throw FeasibilityError("d >= 1", "dimension must be positive");
  ExponentBudget b;
  b.alpha = alpha;
  b.beta = beta;
  b.d = d;
  Rational half(1, 2);
  if (beta == Rational(0)) {
    b.degenerate = true;
    b.gamma = std::min(1 - alpha, alpha);
    b.gamma_prime = 0;
    b.supnorm_exponent = Rational(1 - d, 2);
    return b;
  }
  if (beta < Rational(0)) throw FeasibilityError("beta > 0", "beta = " + to_string(beta) + " must be positive");
  if (!(beta < alpha / 2))
    throw FeasibilityError("beta < alpha/2", "beta = " + to_string(beta) + " violates beta < alpha/2 = " +
                                                 to_string(alpha / 2));
  if (!(beta < 2 - 2 * alpha))
    throw FeasibilityError("beta < 2 - 2 alpha", "beta = " + to_string(beta) + " violates beta < 2 - 2 alpha = " +
                                                     to_string(2 - 2 * alpha));
  b.gamma = std::min(1 - alpha - beta * half, alpha - 2 * beta);
  b.gamma_open = true;
  b.gamma_prime = std::min(b.gamma, Rational(d - 1) * beta * half);
  b.supnorm_exponent = Rational(1 - d, 2) + b.gamma_prime;
  return b;
}

void check_margin(const Rational& alpha, const Rational& beta, const Rational& eps0) {
  if (!(eps0 > Rational(0) && eps0 < Rational(1, 4)))
    throw FeasibilityError("0 < eps0 < 1/4", "margin eps0 = " + to_string(eps0) + " outside (0, 1/4)");
  if (alpha < 2 * beta + eps0)
    throw FeasibilityError("delta h^(-2 beta - eps0) <= 1", "alpha = " + to_string(alpha) +
                                                                " is below 2 beta + eps0 = " +
                                                                to_string(2 * beta + eps0));
  if (2 * alpha + beta - 2 > -eps0)
    throw FeasibilityError("delta^2 h^(beta - 2) >= h^(-eps0)",
                           "2 alpha + beta - 2 = " + to_string(2 * alpha + beta - 2) + " exceeds -eps0");
}

void check_margin(double alpha, double beta, double eps0) {
  if (!(eps0 > 0.0 && eps0 < 0.25))
    throw FeasibilityError("0 < eps0 < 1/4", "margin eps0 = " + std::to_string(eps0) + " outside (0, 1/4)");
  if (!(beta > 0.0)) throw FeasibilityError("beta > 0", "beta must be positive");
  if (!(beta < 0.5)) throw FeasibilityError("beta < 1/2", "beta = " + std::to_string(beta) + " must be below 1/2");
  if (alpha < 2.0 * beta + eps0)
    throw FeasibilityError("delta h^(-2 beta - eps0) <= 1",
                           "alpha = " + std::to_string(alpha) + " is below 2 beta + eps0");
  if (2.0 * alpha + beta - 2.0 > -eps0)
    throw FeasibilityError("delta^2 h^(beta - 2) >= h^(-eps0)",
                           "2 alpha + beta - 2 = " + std::to_string(2.0 * alpha + beta - 2.0) + " exceeds -eps0");
}

namespace {

// a * alpha + b * beta = c
struct Line {
  Rational a, b, c;
};

std::optional<std::array<Rational, 2>> intersect(const Line& p, const Line& q) {
  Rational det = p.a * q.b - p.b * q.a;
  if (det == Rational(0)) return std::nullopt;
  return std::array<Rational, 2>{(p.c * q.b - p.b * q.c) / det, (p.a * q.c - p.c * q.a) / det};
}

bool in_closure(const Rational& alpha, const Rational& beta) {
  return beta >= Rational(0) && beta <= alpha / 2 && beta <= 2 - 2 * alpha;
}

Rational objective(const Rational& alpha, const Rational& beta, int d) {
  Rational half(1, 2);
  return std::min({1 - alpha - beta * half, alpha - 2 * beta, Rational(d - 1) * beta * half});
}

double objective(double alpha, double beta, int d) {
  return std::min({1.0 - alpha - 0.5 * beta, alpha - 2.0 * beta, 0.5 * (d - 1) * beta});
}

double best_over_beta(double alpha, int d, double* arg) {
  double hi = std::min(alpha / 2.0, 2.0 - 2.0 * alpha);
  if (hi < 0.0) return -1e300;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (objective(alpha, m1, d) < objective(alpha, m2, d)) lo = m1;
    else hi = m2;
  }
  if (arg) *arg = 0.5 * (lo + hi);
  return objective(alpha, 0.5 * (lo + hi), d);
}

}  // namespace

GammaOptimum optimize_gamma_prime(int d) {
  if (d < 1) throw FeasibilityError("d >= 1", "dimension must be positive");
  Rational half(1, 2);
  Rational k = Rational(d - 1) * half;
  // Pieces of the objective and the region boundary.
  std::vector<Line> lines = {
      {Rational(-2), Rational(3, 2), Rational(-1)},  // 1 - a - b/2 = a - 2b
      {Rational(-1), -half - k, Rational(-1)},      // 1 - a - b/2 = k b
      {Rational(1), Rational(-2) - k, Rational(0)},  // a - 2b = k b
      {Rational(0), Rational(1), Rational(0)},       // b = 0
      {-half, Rational(1), Rational(0)},             // b = a/2
      {Rational(2), Rational(1), Rational(2)},       // b = 2 - 2a
  };
  bool found = false;
  Rational best_a, best_b, best_v;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      auto p = intersect(lines[i], lines[j]);
      if (!p || !in_closure((*p)[0], (*p)[1])) continue;
      Rational v = objective((*p)[0], (*p)[1], d);
      bool better = !found || v > best_v || (v == best_v && ((*p)[1] > best_b || ((*p)[1] == best_b && (*p)[0] < best_a)));
      if (better) {
        found = true;
        best_a = (*p)[0];
        best_b = (*p)[1];
        best_v = v;
      }
    }
  GammaOptimum out;
  out.best.alpha = best_a;
  out.best.beta = best_b;
  out.best.d = d;
  out.best.gamma = std::min(1 - best_a - best_b * half, best_a - 2 * best_b);
  out.best.gamma_prime = best_v;
  out.best.supnorm_exponent = Rational(1 - d, 2) + best_v;
  out.best.degenerate = best_b == Rational(0);

  // Floating-point cross-check: coarse grid in alpha, then nested ternary search.
  double ga = 0.0, gv = -1e300;
  const int grid = 400;
  for (int i = 0; i <= grid; ++i) {
    double a = static_cast<double>(i) / grid;
    double v = best_over_beta(a, d, nullptr);
    if (v > gv) {
      gv = v;
      ga = a;
    }
  }
  double lo = std::max(0.0, ga - 1.0 / grid), hi = std::min(1.0, ga + 1.0 / grid);
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (best_over_beta(m1, d, nullptr) < best_over_beta(m2, d, nullptr)) lo = m1;
    else hi = m2;
  }
  out.numeric_alpha = 0.5 * (lo + hi);
  out.numeric_value = best_over_beta(out.numeric_alpha, d, &out.numeric_beta);
  return out;
}

nlohmann::json to_json(const ExponentBudget& b) {
  return {{"d", b.d},
          {"alpha", to_string(b.alpha)},
          {"beta", to_string(b.beta)},
          {"Gamma", to_string(b.gamma)},
          {"Gamma_open", b.gamma_open},
          {"GammaPrime", to_string(b.gamma_prime)},
          {"supnorm_exponent", to_string(b.supnorm_exponent)},
          {"degenerate", b.degenerate}};
}

}  // namespace semitorus
