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
#ifndef IMPULSIVE_SYNTHESIS_HPP
#define IMPULSIVE_SYNTHESIS_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "impulsive/controllability.hpp"
#include "impulsive/gramian.hpp"
#include "impulsive/propagation.hpp"
#include "impulsive/system_model.hpp"

namespace impulsive {

/// Terminal state under zero control: S(b-t_p) prod_{j=p}^{1} S_C x0.
inline StateVector free_final_state(const ImpulsiveSystem& sys,
                                    const StateVector& x0) {
  require_valid(sys);
  if (x0.size() != sys.state_dim()) {
    throw std::invalid_argument("x0 has wrong length");
  }
  return semigroup_apply(sys.generator, sys.horizon - sys.last_impulse_time(),
                         product_propagator_apply(sys, sys.num_stages(), 1, x0));
}

/**
 * J_eps(phi) = 1/2 <W phi, phi> + eps/2 |phi|^2 - <phi, drive>, with
 * drive = h - free_final_state(x0). <W phi, phi> equals |M* phi|^2.
 */
inline double j_epsilon(const Matrix& w, const StateVector& phi,
                        const StateVector& drive, double epsilon) {
  return 0.5 * phi.dot(w * phi) + 0.5 * epsilon * phi.squaredNorm() -
         phi.dot(drive);
}

inline double j_epsilon(const ImpulsiveSystem& sys, const QuadratureConfig& q,
                        const StateVector& phi, const StateVector& h,
                        const StateVector& x0, double epsilon) {
  return j_epsilon(gramian_set(sys, q).total, phi,
                   StateVector(h - free_final_state(sys, x0)), epsilon);
}

/// Solves (eps I + W) phi = drive by Cholesky factorization.
inline StateVector solve_regularized(const Matrix& w, const StateVector& drive,
                                     double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive and finite");
  }
  const Matrix shifted = w + epsilon * Matrix::Identity(w.rows(), w.cols());
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) {
    // Only reachable when roundoff pushes a tiny eigenvalue of W below -eps.
    return shifted.ldlt().solve(drive);
  }
  return llt.solve(drive);
}

/// phi_hat = (eps I + W)^{-1} (h - free_final_state(x0)).
inline StateVector phi_hat(const ImpulsiveSystem& sys, const Matrix& w,
                           double epsilon, const StateVector& h,
                           const StateVector& x0) {
  if (h.size() != sys.state_dim()) throw std::invalid_argument("h has wrong length");
  return solve_regularized(w, StateVector(h - free_final_state(sys, x0)), epsilon);
}

/// The steering control (u^eps, {v_k^eps}) for a given phi_hat. This is
/// M* phi_hat.
inline ControlPair synthesize_control(const ImpulsiveSystem& sys,
                                      const StateVector& phi) {
  return apply_M_star(sys, phi);
}

struct SynthesisResult {
  double epsilon = 0.0;
  StateVector phi_hat;
  ControlPair control;
  StateVector terminal_state;
  StateVector predicted_error;  // -eps * phi_hat
  StateVector achieved_error;   // x_eps(b) - h, from forward simulation
  double j_value = 0.0;

  /// |achieved_error - predicted_error|; zero up to quadrature error.
  [[nodiscard]] double identity_residual() const {
    return (achieved_error - predicted_error).norm();
  }
};

/**
 * Fixed impulse vectors are treated as data, not decisions: the synthesis
 * Gramian drops Theta~ and Gamma~ and the fixed impulses are folded into the
 * free response instead. Without them every v_k is a decision variable.
 */
struct SteerOptions {
  std::optional<std::vector<Vector>> fixed_impulses;
};

/// Gramian actually inverted by the synthesis for the given options.
inline Matrix synthesis_gramian(const GramianSet& g, const SteerOptions& options) {
  if (options.fixed_impulses) return Matrix(g.theta + g.gamma);
  return g.total;
}

/// Terminal state with u = 0 and the impulses fixed by the options (zero
/// when they are free).
inline StateVector drift_final_state(const ImpulsiveSystem& sys,
                                     const StateVector& x0,
                                     const SteerOptions& options,
                                     const QuadratureConfig& q = QuadratureConfig{}) {
  if (!options.fixed_impulses) return free_final_state(sys, x0);
  ControlPair w = zero_control(sys);
  w.impulses = *options.fixed_impulses;
  return mild_solution(sys, x0, w, sys.horizon, q);
}

/// steer() with precomputed Gramians.
inline SynthesisResult steer_with(const ImpulsiveSystem& sys,
                                  const QuadratureConfig& q,
                                  const GramianSet& gramians,
                                  const StateVector& x0, const StateVector& h,
                                  double epsilon,
                                  const SteerOptions& options = {}) {
  require_valid(sys);
  if (x0.size() != sys.state_dim() || h.size() != sys.state_dim()) {
    throw std::invalid_argument("x0 and h must have length " +
                                std::to_string(sys.state_dim()));
  }
  const Matrix w = synthesis_gramian(gramians, options);
  const StateVector drive = h - drift_final_state(sys, x0, options, q);

  SynthesisResult r;
  r.epsilon = epsilon;
  r.phi_hat = solve_regularized(w, drive, epsilon);
  r.control = synthesize_control(sys, r.phi_hat);
  if (options.fixed_impulses) r.control.impulses = *options.fixed_impulses;

  const Trajectory end = simulate(sys, x0, r.control, {sys.horizon}, q);
  r.terminal_state = end.samples.back().x;
  r.predicted_error = -epsilon * r.phi_hat;
  r.achieved_error = r.terminal_state - h;
  r.j_value = j_epsilon(w, r.phi_hat, drive, epsilon);
  return r;
}

/**
 * Full pipeline: Gramians, phi_hat, the control M* phi_hat, and a forward
 * simulation whose terminal error should reproduce -eps * phi_hat.
 */
inline SynthesisResult steer(const ImpulsiveSystem& sys,
                             const QuadratureConfig& q, const StateVector& x0,
                             const StateVector& h, double epsilon,
                             const SteerOptions& options = {}) {
  return steer_with(sys, q, gramian_set(sys, q), x0, h, epsilon, options);
}

struct ScheduleResult {
  std::vector<double> epsilons;
  std::vector<double> errors;  // |x_eps(b) - h| per epsilon tried
  SynthesisResult final;
  bool reached = false;
  bool plateau = false;
};

/**
 * Walks a decreasing epsilon schedule until the terminal error drops to
 * tolerance, or until it stops improving (relative change below
 * plateau_rtol between consecutive steps), which marks a target outside
 * the reachable closure.
 */
inline ScheduleResult steer_to_tolerance(
    const ImpulsiveSystem& sys, const QuadratureConfig& q,
    const StateVector& x0, const StateVector& h, double tolerance,
    const std::vector<double>& schedule = geometric_schedule(),
    const SteerOptions& options = {}, double plateau_rtol = 1e-6) {
  if (schedule.empty()) throw std::invalid_argument("empty epsilon schedule");
  const GramianSet g = gramian_set(sys, q);
  ScheduleResult out;
  for (double eps : schedule) {
    out.final = steer_with(sys, q, g, x0, h, eps, options);
    const double err = out.final.achieved_error.norm();
    out.epsilons.push_back(eps);
    out.errors.push_back(err);
    if (err <= tolerance) {
      out.reached = true;
      break;
    }
    const auto count = out.errors.size();
    if (count >= 2) {
      const double prev = out.errors[count - 2];
      if (std::abs(prev - err) <= plateau_rtol * prev) {
        out.plateau = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace impulsive

#endif  // IMPULSIVE_SYNTHESIS_HPP
