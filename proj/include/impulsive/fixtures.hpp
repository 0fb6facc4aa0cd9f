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
#ifndef IMPULSIVE_FIXTURES_HPP
#define IMPULSIVE_FIXTURES_HPP

#include <numbers>

#include "impulsive/system_model.hpp"
#include "impulsive/wave_model.hpp"

// Small systems with hand-computable Gramians, shared by tests, demos and
// the sample input files.
namespace impulsive::fixtures {

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

/// n = 1, A = 0, B = 1, b = 1, one impulse at 0.5 with C = 0.5, D = 1.
/// Gamma = 0.5, Theta = 1.125, Gamma~ = 1, Theta~ = 0, W = 2.625.
inline ImpulsiveSystem s1() {
  return make_system(DenseGenerator{scalar(0.0)}, scalar(1.0),
                     {{0.5, scalar(0.5), scalar(1.0)}}, 1.0);
}

/// n = 2, A = 0, B = e1, b = 1, no impulses. W = diag(1, 0).
inline ImpulsiveSystem s2() {
  Matrix b(2, 1);
  b << 1.0, 0.0;
  return make_system(DenseGenerator{Matrix::Zero(2, 2)}, b, {}, 1.0);
}

/// Scalar, A = 0, two impulses with jump factors 1 + C = 1.5 and 2.0.
inline ImpulsiveSystem two_stage_scalar(double d1 = 1.0, double d2 = 1.0) {
  return make_system(DenseGenerator{scalar(0.0)}, scalar(1.0),
                     {{0.25, scalar(0.5), scalar(d1)}, {0.6, scalar(1.0), scalar(d2)}},
                     1.0);
}

/// Three modes, gamma_m = 1/m, one prescribed impulse at t = 1 and a
/// horizon leaving exactly one period 2 pi after it.
inline WaveModel wave_w3() {
  WaveModel wm;
  wm.modes = 3;
  wm.gamma = {1.0, 0.5, 1.0 / 3.0};
  wm.alpha = {0.0, 0.0, 0.0};
  wm.beta = {0.0, 0.0, 0.0};
  wm.impulses = {{1.0, {0.1, 0.0, 0.0}, {0.0, 0.2, 0.0}}};
  wm.horizon = 1.0 + 2.0 * std::numbers::pi;
  return wm;
}

}  // namespace impulsive::fixtures

#endif  // IMPULSIVE_FIXTURES_HPP
