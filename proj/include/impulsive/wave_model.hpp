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
#ifndef IMPULSIVE_WAVE_MODEL_HPP
#define IMPULSIVE_WAVE_MODEL_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "impulsive/controllability.hpp"
#include "impulsive/gramian.hpp"
#include "impulsive/synthesis.hpp"
#include "impulsive/system_model.hpp"

namespace impulsive {

// Vibrating string on (0, pi) with Dirichlet ends, forced by u(t) h(theta)
// with h = sum gamma_m sin(m theta), and with prescribed jumps
// (a_i(theta), b_i(theta)) of displacement and velocity at t_i. Every
// coefficient list is a sine series truncated to the first M modes.

struct WaveImpulse {
  double time = 0.0;
  std::vector<double> a;  // displacement jump coefficients
  std::vector<double> b;  // velocity jump coefficients
};

struct WaveModel {
  int modes = 1;
  std::vector<double> gamma;
  std::vector<double> alpha;  // initial displacement coefficients
  std::vector<double> beta;   // initial velocity coefficients
  std::vector<WaveImpulse> impulses;
  double horizon = 2.0 * std::numbers::pi;
};

/// Target (or any) state of the string as sine coefficients.
struct WaveCoefficients {
  std::vector<double> alpha;
  std::vector<double> beta;
};

inline void validate_wave_model(const WaveModel& wm) {
  std::vector<std::string> v;
  const auto m = static_cast<std::size_t>(wm.modes);
  if (wm.modes < 1) v.push_back("modes must be >= 1");
  auto check = [&](const std::vector<double>& xs, const std::string& name) {
    if (xs.size() != m) {
      v.push_back(name + " has " + std::to_string(xs.size()) +
                  " coefficients, expected " + std::to_string(m));
    }
    for (double x : xs) {
      if (!std::isfinite(x)) {
        v.push_back(name + " has a non-finite coefficient");
        break;
      }
    }
  };
  check(wm.gamma, "gamma");
  check(wm.alpha, "alpha");
  check(wm.beta, "beta");
  for (std::size_t i = 0; i < wm.impulses.size(); ++i) {
    check(wm.impulses[i].a, "impulse " + std::to_string(i + 1) + " a");
    check(wm.impulses[i].b, "impulse " + std::to_string(i + 1) + " b");
  }
  if (!v.empty()) {
    std::string msg = "invalid wave model:";
    for (const auto& s : v) msg += "\n  " + s;
    throw ValidationError(msg);
  }
}

/**
 * Isometry from sine coefficients to canonical coordinates: mode m maps to
 * (m alpha_m, beta_m), turning sum(m^2 alpha_m alpha~_m + beta_m beta~_m)
 * into the Euclidean inner product.
 */
inline StateVector to_canonical(const std::vector<double>& alpha,
                                const std::vector<double>& beta) {
  if (alpha.size() != beta.size()) {
    throw std::invalid_argument("alpha and beta lengths differ");
  }
  StateVector y(2 * static_cast<Eigen::Index>(alpha.size()));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(2 * i);
    y(r) = static_cast<double>(i + 1) * alpha[i];
    y(r + 1) = beta[i];
  }
  return y;
}

inline WaveCoefficients from_canonical(const StateVector& y) {
  if (y.size() % 2 != 0) throw std::invalid_argument("odd canonical length");
  WaveCoefficients c;
  for (Eigen::Index r = 0; r < y.size(); r += 2) {
    c.alpha.push_back(y(r) / static_cast<double>(r / 2 + 1));
    c.beta.push_back(y(r + 1));
  }
  return c;
}

/**
 * Truncated system in canonical coordinates: frequencies 1..M, B with block
 * (0, gamma_m), C_i = 0 and D_i the canonical impulse column
 * (m a_{i,m}, b_{i,m}). The prescribed jump is recovered with v_i = 1.
 */
inline ImpulsiveSystem build_wave_system(const WaveModel& wm) {
  validate_wave_model(wm);
  const auto n = 2 * static_cast<Eigen::Index>(wm.modes);
  SpectralBlocks blocks;
  Matrix b = Matrix::Zero(n, 1);
  for (int m = 1; m <= wm.modes; ++m) {
    blocks.frequencies.push_back(static_cast<double>(m));
    b(2 * (m - 1) + 1, 0) = wm.gamma[static_cast<std::size_t>(m - 1)];
  }
  std::vector<ImpulseStage> stages;
  for (const auto& imp : wm.impulses) {
    stages.push_back({imp.time, Matrix::Zero(n, n), Matrix(to_canonical(imp.a, imp.b))});
  }
  return make_system(std::move(blocks), std::move(b), std::move(stages),
                     wm.horizon);
}

inline StateVector wave_initial_state(const WaveModel& wm) {
  return to_canonical(wm.alpha, wm.beta);
}

/// v_i = 1 for every stage: injects exactly the prescribed jumps.
inline std::vector<Vector> wave_fixed_impulses(const WaveModel& wm) {
  return std::vector<Vector>(wm.impulses.size(), Vector::Ones(1));
}

inline double wave_last_impulse_time(const WaveModel& wm) {
  return wm.impulses.empty() ? 0.0 : wm.impulses.back().time;
}

/**
 * B* S*(b - t) phi = sum_m gamma_m (m alpha_m sin m(b-t) + beta_m cos m(b-t))
 * for t in [t_p, b], with phi given in canonical coordinates.
 */
inline double adjoint_trace(const WaveModel& wm, const StateVector& phi,
                            double t) {
  const double t_p = wave_last_impulse_time(wm);
  if (!(t >= t_p && t <= wm.horizon)) {
    throw std::out_of_range("adjoint trace is defined on [t_p, b]");
  }
  if (phi.size() != 2 * wm.modes) throw std::invalid_argument("phi has wrong length");
  const double s = wm.horizon - t;
  double sum = 0.0;
  for (int m = 1; m <= wm.modes; ++m) {
    const auto r = static_cast<Eigen::Index>(2 * (m - 1));
    sum += wm.gamma[static_cast<std::size_t>(m - 1)] *
           (phi(r) * std::sin(m * s) + phi(r + 1) * std::cos(m * s));
  }
  return sum;
}

/**
 * Fourier coefficients of a trace s -> phi(s) on [0, 2 pi]. Returns, per
 * mode, (m gamma_m alpha_m, gamma_m beta_m): the sine moment
 * (1/pi) int phi(s) sin(ms) ds and the cosine moment (1/pi) int phi(s) cos(ms) ds
 * of the trace s -> adjoint_trace(b - s).
 */
inline std::vector<std::pair<double, double>> fourier_recovery(
    const WaveModel& wm, const std::function<double(double)>& trace,
    const QuadratureConfig& q = QuadratureConfig{256}) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (wm.horizon - wave_last_impulse_time(wm) < kTwoPi) {
    throw std::invalid_argument(
        "Fourier recovery needs b - t_p >= 2 pi (one full period)");
  }
  std::vector<std::pair<double, double>> out;
  for (int m = 1; m <= wm.modes; ++m) {
    const double sine = q.integrate(0.0, kTwoPi, [&](double s) -> double {
      return trace(s) * std::sin(m * s);
    });
    const double cosine = q.integrate(0.0, kTwoPi, [&](double s) -> double {
      return trace(s) * std::cos(m * s);
    });
    out.emplace_back(sine / std::numbers::pi, cosine / std::numbers::pi);
  }
  return out;
}

/// Displacement x(theta) = sum alpha_m sin(m theta) of a canonical state.
inline double wave_displacement(const StateVector& y, double theta) {
  double sum = 0.0;
  for (Eigen::Index r = 0; r < y.size(); r += 2) {
    const double m = static_cast<double>(r / 2 + 1);
    sum += (y(r) / m) * std::sin(m * theta);
  }
  return sum;
}

/// Truncates (or zero-pads) every coefficient list to `modes`. gamma cannot
/// be padded: a zero gamma_m silently removes a mode from the control.
inline WaveModel retruncate(WaveModel wm, int modes) {
  if (modes < 1) throw std::invalid_argument("modes must be >= 1");
  if (static_cast<std::size_t>(modes) > wm.gamma.size()) {
    throw std::invalid_argument("gamma lists " + std::to_string(wm.gamma.size()) +
                                " modes, cannot extend to " + std::to_string(modes));
  }
  const auto m = static_cast<std::size_t>(modes);
  wm.modes = modes;
  wm.gamma.resize(m);
  wm.alpha.resize(m, 0.0);
  wm.beta.resize(m, 0.0);
  for (auto& imp : wm.impulses) {
    imp.a.resize(m, 0.0);
    imp.b.resize(m, 0.0);
  }
  return wm;
}

struct WaveDemoOptions {
  bool free_impulses = false;
  int time_samples = 33;
  int theta_points = 257;
  double rank_tol = kDefaultRankTol;
};

struct ProfileRow {
  double t = 0.0;
  Side side = Side::kNone;
  std::vector<double> x;  // one value per theta
};

struct WaveDemoResult {
  ImpulsiveSystem system;
  StateVector target;
  Matrix gamma;
  PositivityResult gamma_positivity;
  SynthesisResult synthesis;
  std::vector<double> thetas;
  std::vector<ProfileRow> profile;
  /// max over the theta grid of |x(b, theta) - target(theta)|.
  double final_profile_error = 0.0;
};

/**
 * Builds the truncated system, checks positivity of Gamma over [t_p, b]
 * (which alone certifies controllability), steers to the target and
 * samples the displacement on a (t, theta) grid.
 */
inline WaveDemoResult wave_demo(const WaveModel& wm,
                                const WaveCoefficients& target, double epsilon,
                                const QuadratureConfig& q = QuadratureConfig{256},
                                const WaveDemoOptions& options = {}) {
  if (wm.horizon - wave_last_impulse_time(wm) < 2.0 * std::numbers::pi) {
    throw std::invalid_argument("wave demo needs b - t_p >= 2 pi");
  }
  if (options.time_samples < 2 || options.theta_points < 2) {
    throw std::invalid_argument("profile grids need at least two points");
  }
  WaveDemoResult r{build_wave_system(wm), {}, {}, {}, {}, {}, {}, 0.0};
  if (target.alpha.size() != static_cast<std::size_t>(wm.modes) ||
      target.beta.size() != static_cast<std::size_t>(wm.modes)) {
    throw std::invalid_argument("target must list " + std::to_string(wm.modes) +
                                " alpha and beta coefficients");
  }
  r.target = to_canonical(target.alpha, target.beta);
  r.gamma = gamma_gramian(r.system, q);
  r.gamma_positivity = positivity_test(r.gamma, options.rank_tol);

  SteerOptions steer_options;
  if (!options.free_impulses) steer_options.fixed_impulses = wave_fixed_impulses(wm);
  r.synthesis = steer(r.system, q, wave_initial_state(wm), r.target, epsilon,
                      steer_options);

  for (int i = 0; i < options.theta_points; ++i) {
    r.thetas.push_back(std::numbers::pi * i / (options.theta_points - 1));
  }
  std::vector<double> grid;
  for (int i = 0; i < options.time_samples; ++i) {
    grid.push_back(wm.horizon * i / (options.time_samples - 1));
  }
  grid.back() = wm.horizon;
  const auto traj = simulate(r.system, wave_initial_state(wm),
                             r.synthesis.control, grid, q);
  for (const auto& s : traj.samples) {
    ProfileRow row{s.t, s.side, {}};
    for (double th : r.thetas) row.x.push_back(wave_displacement(s.x, th));
    r.profile.push_back(std::move(row));
  }
  const StateVector& final_state = traj.samples.back().x;
  for (double th : r.thetas) {
    r.final_profile_error =
        std::max(r.final_profile_error,
                 std::abs(wave_displacement(final_state, th) -
                          wave_displacement(r.target, th)));
  }
  return r;
}

}  // namespace impulsive

#endif  // IMPULSIVE_WAVE_MODEL_HPP
