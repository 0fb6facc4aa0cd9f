/*
 Copyright 2026 The impulsive-control Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef IMPULSIVE_QUADRATURE_HPP
#define IMPULSIVE_QUADRATURE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace impulsive {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] int size() const { return static_cast<int>(nodes.size()); }
};

/**
 * n-point Gauss-Legendre rule. Roots of P_n are found by Newton iteration
 * from Tricomi's initial guesses; exact for polynomials of degree 2n - 1.
 */
inline GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre needs n >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Three-term recurrence for P_n(x) and P_{n-1}(x).
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

/**
 * Quadrature configuration shared by every integral in the library: one
 * Gauss-Legendre rule of the given order applied on each smooth piece of the
 * integrand (impulse subintervals, further split at control cell edges).
 * Immutable after construction.
 */
class QuadratureConfig {
 public:
  explicit QuadratureConfig(int nodes_per_subinterval = 64)
      : rule_(checked(nodes_per_subinterval)) {}

  [[nodiscard]] int nodes_per_subinterval() const { return rule_.size(); }
  [[nodiscard]] const GaussLegendreRule& rule() const { return rule_; }

  /**
   * Integrates f over [a, c]. f must return a value supporting `+=` and
   * scalar multiplication (double, Eigen vectors and matrices). Nodes are
   * visited in index order so the reduction is deterministic.
   */
  template <typename F>
  auto integrate(double a, double c, F&& f) const {
    const double half = 0.5 * (c - a);
    const double mid = 0.5 * (c + a);
    using Value = std::decay_t<decltype(f(mid))>;
    Value sum = rule_.weights[0] * f(mid + half * rule_.nodes[0]);
    for (std::size_t i = 1; i < rule_.nodes.size(); ++i) {
      sum += rule_.weights[i] * f(mid + half * rule_.nodes[i]);
    }
    return Value(half * sum);
  }

 private:
  static GaussLegendreRule checked(int n) {
    if (n < 2) {
      throw std::invalid_argument("nodes_per_subinterval must be >= 2, got " +
                                  std::to_string(n));
    }
    return gauss_legendre(n);
  }

  GaussLegendreRule rule_;
};

}  // namespace impulsive

#endif  // IMPULSIVE_QUADRATURE_HPP
