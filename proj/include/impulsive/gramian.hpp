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
#ifndef IMPULSIVE_GRAMIAN_HPP
#define IMPULSIVE_GRAMIAN_HPP

#include <vector>

#include "impulsive/propagation.hpp"
#include "impulsive/quadrature.hpp"
#include "impulsive/system_model.hpp"

namespace impulsive {

/**
 * The four controllability operators of an impulsive system and their sum
 *
 *   W = M M* = Theta + Gamma + Theta~ + Gamma~
 *
 * Gamma collects the distributed control after the last impulse, Theta the
 * distributed control before it, Theta~ the impulse controls v_1..v_{p-1}
 * and Gamma~ the last impulse control v_p. Each is symmetric PSD.
 */
struct GramianSet {
  Matrix theta;
  Matrix gamma;
  Matrix theta_tilde;
  Matrix gamma_tilde;
  Matrix total;
};

namespace internal {

inline Matrix symmetrized(const Matrix& g) { return 0.5 * (g + g.transpose()); }

// int_0^length S(tau) B B^T S*(tau) dtau, built from the propagated columns
// of B at each node.
inline Matrix interval_gramian(const GeneratorSpec& g, const Matrix& b,
                               double length, const QuadratureConfig& q) {
  if (length <= 0.0) return Matrix::Zero(b.rows(), b.rows());
  return q.integrate(0.0, length, [&](double tau) -> Matrix {
    const Matrix x = semigroup_apply(g, tau, b);
    return x * x.transpose();
  });
}

// S(b - t_p) prod_{j=p}^{i} S_C(t_j, t_{j-1}) X, column-wise.
inline Matrix push_to_horizon(const ImpulsiveSystem& sys, int i,
                              const Matrix& x) {
  const int p = sys.num_stages();
  return semigroup_apply(sys.generator, sys.horizon - sys.time(p),
                         product_propagator_apply(sys, p, i, x));
}

}  // namespace internal

/// Gamma = int_{t_p}^{b} S(b-s) B B^T S*(b-s) ds (over [0,b] when p = 0).
inline Matrix gamma_gramian(const ImpulsiveSystem& sys,
                            const QuadratureConfig& q = QuadratureConfig{}) {
  require_valid(sys);
  return internal::symmetrized(internal::interval_gramian(
      sys.generator, sys.b, sys.horizon - sys.last_impulse_time(), q));
}

/// Gamma~ = S(b-t_p) D_p D_p^T S*(b-t_p); zero when p = 0.
inline Matrix gamma_tilde_gramian(const ImpulsiveSystem& sys) {
  require_valid(sys);
  const auto n = sys.state_dim();
  const int p = sys.num_stages();
  if (p == 0) return Matrix::Zero(n, n);
  const Matrix x = semigroup_apply(sys.generator, sys.horizon - sys.time(p),
                                   sys.stage(p).d);
  return internal::symmetrized(x * x.transpose());
}

/**
 * Theta = S(b-t_p) sum_{i=1}^{p} prod_{j=p}^{i+1} S_C
 *         [ int_{t_{i-1}}^{t_i} S_C(t_i,s) B B^T S_C*(t_i,s) ds ]
 *         prod S_C* S*(b-t_p)
 * with S_C(t_i,s) = (I + C_i) S(t_i - s). Zero when p = 0.
 */
inline Matrix theta_gramian(const ImpulsiveSystem& sys,
                            const QuadratureConfig& q = QuadratureConfig{}) {
  require_valid(sys);
  const auto n = sys.state_dim();
  const int p = sys.num_stages();
  Matrix theta = Matrix::Zero(n, n);
  const Matrix identity = Matrix::Identity(n, n);
  for (int i = 1; i <= p; ++i) {
    const Matrix inner = internal::interval_gramian(
        sys.generator, sys.b, sys.time(i) - sys.time(i - 1), q);
    // L = S(b-t_p) prod_{j=p}^{i+1} S_C (I + C_i)
    const Matrix lift =
        internal::push_to_horizon(sys, i + 1, identity + sys.stage(i).c);
    theta += lift * inner * lift.transpose();
  }
  return internal::symmetrized(theta);
}

/**
 * Theta~ = S(b-t_p) sum_{i=2}^{p} prod_{j=p}^{i} S_C D_{i-1} D_{i-1}^T
 *          prod S_C* S*(b-t_p). Empty sum when p <= 1.
 */
inline Matrix theta_tilde_gramian(const ImpulsiveSystem& sys) {
  require_valid(sys);
  const auto n = sys.state_dim();
  Matrix theta_tilde = Matrix::Zero(n, n);
  for (int i = 2; i <= sys.num_stages(); ++i) {
    const Matrix x = internal::push_to_horizon(sys, i, sys.stage(i - 1).d);
    theta_tilde += x * x.transpose();
  }
  return internal::symmetrized(theta_tilde);
}

inline GramianSet gramian_set(const ImpulsiveSystem& sys,
                              const QuadratureConfig& q = QuadratureConfig{}) {
  GramianSet set;
  set.theta = theta_gramian(sys, q);
  set.gamma = gamma_gramian(sys, q);
  set.theta_tilde = theta_tilde_gramian(sys);
  set.gamma_tilde = gamma_tilde_gramian(sys);
  set.total = set.theta + set.gamma;
  set.total += set.theta_tilde;
  set.total += set.gamma_tilde;
  return set;
}

/**
 * M w: terminal state reached from x0 = 0 under w = (u, {v_k}),
 *
 *   S(b-t_p) sum_{i=1}^{p} prod_{j=p}^{i+1} S_C (I+C_i) int S(t_i-s) B u ds
 *   + int_{t_p}^{b} S(b-s) B u ds
 *   + S(b-t_p) sum_{i=2}^{p} prod_{j=p}^{i} S_C D_{i-1} v_{i-1}
 *   + S(b-t_p) D_p v_p
 */
inline StateVector apply_M(const ImpulsiveSystem& sys, const ControlPair& w,
                           const QuadratureConfig& q = QuadratureConfig{}) {
  require_valid(sys);
  require_compatible(sys, w);
  const int p = sys.num_stages();
  StateVector before_last = StateVector::Zero(sys.state_dim());
  for (int i = 1; i <= p; ++i) {
    const StateVector f = forced_response(sys, w.distributed, i, sys.time(i - 1),
                                          sys.time(i), sys.time(i), q);
    before_last += product_propagator_apply(sys, p, i + 1,
                                            StateVector(f + sys.stage(i).c * f));
  }
  for (int i = 2; i <= p; ++i) {
    before_last += product_propagator_apply(
        sys, p, i,
        StateVector(sys.stage(i - 1).d * w.impulses[static_cast<std::size_t>(i - 2)]));
  }
  if (p > 0) before_last += sys.stage(p).d * w.impulses[static_cast<std::size_t>(p - 1)];
  return StateVector(
      semigroup_apply(sys.generator, sys.horizon - sys.time(p), before_last) +
      forced_response(sys, w.distributed, p + 1, sys.time(p), sys.horizon,
                      sys.horizon, q));
}

/**
 * M* phi = (B^T psi(.), {D_k^T psi(t_k^+)}), with psi the adjoint state
 * ending at phi. The distributed part is kept in adjoint-feedback form.
 */
inline ControlPair apply_M_star(const ImpulsiveSystem& sys,
                                const StateVector& phi) {
  require_valid(sys);
  AdjointFeedback fb = adjoint_feedback(sys, phi);
  std::vector<Vector> impulses;
  impulses.reserve(static_cast<std::size_t>(sys.num_stages()));
  for (int k = 1; k <= sys.num_stages(); ++k) {
    impulses.emplace_back(sys.stage(k).d.transpose() *
                          fb.post_impulse[static_cast<std::size_t>(k - 1)]);
  }
  return {std::move(fb), std::move(impulses)};
}

/// <w1, w2>_1 = int_0^b <u1, u2> ds + sum_k <v1_k, v2_k>.
inline double control_inner_product(const ImpulsiveSystem& sys,
                                    const ControlPair& w1,
                                    const ControlPair& w2,
                                    const QuadratureConfig& q = QuadratureConfig{}) {
  require_compatible(sys, w1);
  require_compatible(sys, w2);
  double sum = 0.0;
  for (int k = 1; k <= sys.num_stages() + 1; ++k) {
    auto cuts = control_cell_edges(sys, w1.distributed, k);
    const auto more = control_cell_edges(sys, w2.distributed, k);
    cuts.insert(cuts.end(), more.begin(), more.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      sum += q.integrate(cuts[i - 1], cuts[i], [&](double s) -> double {
        return control_value_on(sys, w1.distributed, k, s)
            .dot(control_value_on(sys, w2.distributed, k, s));
      });
    }
  }
  for (std::size_t k = 0; k < w1.impulses.size(); ++k) {
    sum += w1.impulses[k].dot(w2.impulses[k]);
  }
  return sum;
}

}  // namespace impulsive

#endif  // IMPULSIVE_GRAMIAN_HPP
