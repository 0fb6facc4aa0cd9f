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
#ifndef IMPULSIVE_PROPAGATION_HPP
#define IMPULSIVE_PROPAGATION_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "impulsive/quadrature.hpp"
#include "impulsive/system_model.hpp"

namespace impulsive {

// ---------------------------------------------------------------------------
// Adjoint system
// ---------------------------------------------------------------------------

/**
 * psi(t_k^+) for k in 1..p, i.e. the product
 * S_C*(t_{k+1},t_k) ... S_C*(t_p,t_{p-1}) S*(b - t_p) phi, where
 * S_C*(t_i,t_{i-1}) = S*(t_i - t_{i-1}) (I + C_i^T).
 */
inline StateVector adjoint_post_impulse(const ImpulsiveSystem& sys,
                                        const StateVector& phi, int k) {
  const int p = sys.num_stages();
  if (k < 1 || k > p) {
    throw std::out_of_range("stage index " + std::to_string(k) +
                            " outside 1.." + std::to_string(p));
  }
  StateVector psi = semigroup_adjoint_apply(sys.generator,
                                            sys.horizon - sys.time(p), phi);
  for (int i = p; i > k; --i) {
    const StateVector pre = psi + sys.stage(i).c.transpose() * psi;
    psi = semigroup_adjoint_apply(sys.generator, sys.time(i) - sys.time(i - 1),
                                  pre);
  }
  return psi;
}

/// Caches psi(t_k^+) for every stage so psi(t) costs one semigroup action.
inline AdjointFeedback adjoint_feedback(const ImpulsiveSystem& sys,
                                        const StateVector& phi) {
  if (phi.size() != sys.state_dim()) {
    throw std::invalid_argument("adjoint terminal value has length " +
                                std::to_string(phi.size()) + ", expected " +
                                std::to_string(sys.state_dim()));
  }
  const int p = sys.num_stages();
  AdjointFeedback fb{phi, std::vector<StateVector>(static_cast<std::size_t>(p))};
  if (p == 0) return fb;
  StateVector psi = semigroup_adjoint_apply(sys.generator,
                                            sys.horizon - sys.time(p), phi);
  fb.post_impulse[static_cast<std::size_t>(p - 1)] = psi;
  for (int i = p; i > 1; --i) {
    const StateVector pre = psi + sys.stage(i).c.transpose() * psi;
    psi = semigroup_adjoint_apply(sys.generator, sys.time(i) - sys.time(i - 1),
                                  pre);
    fb.post_impulse[static_cast<std::size_t>(i - 2)] = psi;
  }
  return fb;
}

/**
 * psi(t) on subinterval k, i.e. for t in (t_{k-1}, t_k]:
 *   k = p + 1:  S*(b - t) phi
 *   k <= p:     S*(t_k - t) (I + C_k^T) psi(t_k^+)
 */
inline StateVector adjoint_state_on(const ImpulsiveSystem& sys,
                                    const AdjointFeedback& fb, int k,
                                    double t) {
  const int p = sys.num_stages();
  if (k == p + 1) {
    return semigroup_adjoint_apply(sys.generator, sys.horizon - t, fb.phi);
  }
  const auto& post = fb.post_impulse[static_cast<std::size_t>(k - 1)];
  const StateVector pre = post + sys.stage(k).c.transpose() * post;
  return semigroup_adjoint_apply(sys.generator, sys.time(k) - t, pre);
}

namespace internal {

inline void check_horizon_time(const ImpulsiveSystem& sys, double t) {
  if (!std::isfinite(t) || t < 0.0 || t > sys.horizon) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, " +
                            std::to_string(sys.horizon) + "]");
  }
}

}  // namespace internal

/// Adjoint state with the half-open bracketing (t_{k-1}, t_k]; t = 0 falls
/// in the first subinterval.
inline StateVector adjoint_state(const ImpulsiveSystem& sys,
                                 const AdjointFeedback& fb, double t) {
  internal::check_horizon_time(sys, t);
  return adjoint_state_on(sys, fb, stages_before(sys, t) + 1, t);
}

/// Mild solution of the adjoint equation with psi(b) = phi.
inline StateVector adjoint_solution(const ImpulsiveSystem& sys,
                                    const StateVector& phi, double t) {
  internal::check_horizon_time(sys, t);
  return adjoint_state(sys, adjoint_feedback(sys, phi), t);
}

// ---------------------------------------------------------------------------
// Control evaluation
// ---------------------------------------------------------------------------

/// Cell edges of the control law on subinterval k = [t_{k-1}, t_k].
inline std::vector<double> control_cell_edges(const ImpulsiveSystem& sys,
                                              const ControlLaw& law, int k) {
  const double a = sys.time(k - 1);
  const double c = sys.time(k);
  if (const auto* pc = std::get_if<PiecewiseConstant>(&law)) {
    const auto cells = pc->cells[static_cast<std::size_t>(k - 1)].size();
    std::vector<double> edges(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
      edges[j] = a + (c - a) * static_cast<double>(j) / static_cast<double>(cells);
    }
    edges.back() = c;
    return edges;
  }
  return {a, c};
}

/// u(t) for t inside subinterval k.
inline Vector control_value_on(const ImpulsiveSystem& sys,
                               const ControlLaw& law, int k, double t) {
  if (const auto* pc = std::get_if<PiecewiseConstant>(&law)) {
    const auto& grid = pc->cells[static_cast<std::size_t>(k - 1)];
    const double a = sys.time(k - 1);
    const double h = (sys.time(k) - a) / static_cast<double>(grid.size());
    auto idx = static_cast<long>(std::floor((t - a) / h));
    idx = std::clamp(idx, 0L, static_cast<long>(grid.size()) - 1);
    return grid[static_cast<std::size_t>(idx)];
  }
  const auto& fb = std::get<AdjointFeedback>(law);
  return sys.b.transpose() * adjoint_state_on(sys, fb, k, t);
}

/// u(t) with the bracketing (t_{k-1}, t_k].
inline Vector control_value(const ImpulsiveSystem& sys, const ControlLaw& law,
                            double t) {
  internal::check_horizon_time(sys, t);
  return control_value_on(sys, law, stages_before(sys, t) + 1, t);
}

namespace internal {

// Integrates f over [from, to] inside subinterval k, split at the control's
// cell edges so that every piece sees a smooth integrand.
template <typename F>
auto integrate_on_cells(const ImpulsiveSystem& sys, const ControlLaw& law,
                        int k, double from, double to,
                        const QuadratureConfig& q, F&& f) {
  const auto edges = control_cell_edges(sys, law, k);
  std::vector<double> cuts{from};
  for (double e : edges) {
    if (e > from && e < to) cuts.push_back(e);
  }
  cuts.push_back(to);
  auto sum = q.integrate(cuts[0], cuts[1], f);
  for (std::size_t i = 2; i < cuts.size(); ++i) {
    sum += q.integrate(cuts[i - 1], cuts[i], f);
  }
  return sum;
}

}  // namespace internal

/// int_{from}^{to} S(t_eval - s) B u(s) ds for [from, to] inside subinterval k.
inline StateVector forced_response(const ImpulsiveSystem& sys,
                                   const ControlLaw& law, int k, double from,
                                   double to, double t_eval,
                                   const QuadratureConfig& q) {
  if (to <= from) return StateVector::Zero(sys.state_dim());
  return internal::integrate_on_cells(
      sys, law, k, from, to, q, [&](double s) -> StateVector {
        return semigroup_apply(sys.generator, t_eval - s,
                               StateVector(sys.b * control_value_on(sys, law, k, s)));
      });
}

// ---------------------------------------------------------------------------
// Forward mild solution
// ---------------------------------------------------------------------------

/**
 * x(t_k^+) in closed form:
 *
 *   prod_{j=k}^{1} S_C x0
 *   + sum_{i=1}^{k} prod_{j=k}^{i+1} S_C (I + C_i) int_{t_{i-1}}^{t_i} S(t_i - s) B u(s) ds
 *   + sum_{i=2}^{k} prod_{j=k}^{i} S_C D_{i-1} v_{i-1}
 *   + D_k v_k
 */
inline StateVector state_after_impulse(const ImpulsiveSystem& sys,
                                       const StateVector& x0,
                                       const ControlPair& w, int k,
                                       const QuadratureConfig& q = QuadratureConfig{}) {
  if (k < 1 || k > sys.num_stages()) {
    throw std::out_of_range("stage index " + std::to_string(k) +
                            " outside 1.." + std::to_string(sys.num_stages()));
  }
  require_compatible(sys, w);
  StateVector x = product_propagator_apply(sys, k, 1, x0);
  for (int i = 1; i <= k; ++i) {
    const StateVector f = forced_response(sys, w.distributed, i, sys.time(i - 1),
                                          sys.time(i), sys.time(i), q);
    const StateVector jumped = f + sys.stage(i).c * f;
    x += product_propagator_apply(sys, k, i + 1, jumped);
  }
  for (int i = 2; i <= k; ++i) {
    const StateVector d = sys.stage(i - 1).d *
                          w.impulses[static_cast<std::size_t>(i - 2)];
    x += product_propagator_apply(sys, k, i, d);
  }
  x += sys.stage(k).d * w.impulses[static_cast<std::size_t>(k - 1)];
  return x;
}

/**
 * x(t) for t in [0, b]. At an impulse time the left value x(t_k^-) is
 * returned.
 */
inline StateVector mild_solution(const ImpulsiveSystem& sys,
                                 const StateVector& x0, const ControlPair& w,
                                 double t,
                                 const QuadratureConfig& q = QuadratureConfig{}) {
  internal::check_horizon_time(sys, t);
  require_compatible(sys, w);
  const int k = stages_before(sys, t);
  const StateVector anchor = (k == 0) ? x0 : state_after_impulse(sys, x0, w, k, q);
  const double t_anchor = sys.time(k);
  return StateVector(semigroup_apply(sys.generator, t - t_anchor, anchor) +
                     forced_response(sys, w.distributed, k + 1, t_anchor, t, t, q));
}

enum class Side { kNone, kLeft, kRight };

struct TrajectorySample {
  double t = 0.0;
  Side side = Side::kNone;
  StateVector x;
};

/// Time-ordered samples; each impulse time appears twice (left then right).
struct Trajectory {
  std::vector<TrajectorySample> samples;
};

/**
 * Samples the mild solution on grid, with both one-sided values at every
 * impulse time (inserted even if absent from grid). The right value is
 * formed from the left one as (I + C_k) x(t_k^-) + D_k v_k.
 */
inline Trajectory simulate(const ImpulsiveSystem& sys, const StateVector& x0,
                           const ControlPair& w, std::vector<double> grid,
                           const QuadratureConfig& q = QuadratureConfig{}) {
  require_compatible(sys, w);
  for (double t : grid) internal::check_horizon_time(sys, t);
  for (int k = 1; k <= sys.num_stages(); ++k) grid.push_back(sys.time(k));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  Trajectory traj;
  StateVector anchor = x0;
  int stage = 0;  // anchor holds x(t_stage^+), or x0 when stage == 0
  for (double t : grid) {
    const double t_anchor = sys.time(stage);
    StateVector x = semigroup_apply(sys.generator, t - t_anchor, anchor) +
                    forced_response(sys, w.distributed, stage + 1, t_anchor, t, t, q);
    if (stage < sys.num_stages() && t == sys.time(stage + 1)) {
      const auto& st = sys.stage(stage + 1);
      StateVector right = x + st.c * x +
                          st.d * w.impulses[static_cast<std::size_t>(stage)];
      traj.samples.push_back({t, Side::kLeft, std::move(x)});
      traj.samples.push_back({t, Side::kRight, right});
      anchor = std::move(right);
      ++stage;
    } else {
      traj.samples.push_back({t, Side::kNone, std::move(x)});
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Duality pairing
// ---------------------------------------------------------------------------

/// Both sides of the forward/adjoint pairing identity.
struct DualityTerms {
  double lhs = 0.0;  // <x(b), psi(b)> - <x(0), psi(0)>
  double rhs = 0.0;  // sum int <u, B^T psi> + sum <v_k, D_k^T psi(t_k^+)>
  double terminal_pairing = 0.0;  // <x(b), psi(b)>

  [[nodiscard]] double gap() const { return lhs - rhs; }
};

inline DualityTerms duality_terms(const ImpulsiveSystem& sys,
                                  const StateVector& x0, const ControlPair& w,
                                  const StateVector& phi,
                                  const QuadratureConfig& q = QuadratureConfig{}) {
  require_compatible(sys, w);
  const auto fb = adjoint_feedback(sys, phi);
  const StateVector xb = mild_solution(sys, x0, w, sys.horizon, q);
  const StateVector psi0 = adjoint_state(sys, fb, 0.0);

  DualityTerms terms;
  terms.terminal_pairing = xb.dot(phi);
  terms.lhs = terms.terminal_pairing - x0.dot(psi0);
  for (int k = 1; k <= sys.num_stages() + 1; ++k) {
    terms.rhs += internal::integrate_on_cells(
        sys, w.distributed, k, sys.time(k - 1), sys.time(k), q,
        [&](double s) -> double {
          const Vector u = control_value_on(sys, w.distributed, k, s);
          return u.dot(sys.b.transpose() * adjoint_state_on(sys, fb, k, s));
        });
  }
  for (int k = 1; k <= sys.num_stages(); ++k) {
    const auto& v = w.impulses[static_cast<std::size_t>(k - 1)];
    terms.rhs += v.dot(sys.stage(k).d.transpose() *
                       fb.post_impulse[static_cast<std::size_t>(k - 1)]);
  }
  return terms;
}

/// LHS minus RHS of the pairing identity; vanishes up to quadrature error.
inline double duality_gap(const ImpulsiveSystem& sys, const StateVector& x0,
                          const ControlPair& w, const StateVector& phi,
                          const QuadratureConfig& q = QuadratureConfig{}) {
  return duality_terms(sys, x0, w, phi, q).gap();
}

}  // namespace impulsive

#endif  // IMPULSIVE_PROPAGATION_HPP
