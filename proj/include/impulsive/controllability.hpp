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
#ifndef IMPULSIVE_CONTROLLABILITY_HPP
#define IMPULSIVE_CONTROLLABILITY_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "impulsive/gramian.hpp"
#include "impulsive/system_model.hpp"

namespace impulsive {

inline constexpr double kDefaultRankTol = 1e-9;
inline constexpr double kDefaultDecayTol = 1e-4;
inline constexpr std::uint64_t kDefaultProbeSeed = 0x5EED;

struct PositivityResult {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool positive = false;
};

/**
 * Symmetric eigen-decomposition of W. W counts as positive when
 * lambda_min > rank_tol * lambda_max. Rejects inputs whose asymmetry
 * exceeds 1e-10 (relative to max(1, |W|_max)).
 */
inline PositivityResult positivity_test(const Matrix& w,
                                        double rank_tol = kDefaultRankTol) {
  if (w.rows() != w.cols()) throw std::invalid_argument("W is not square");
  if (w.size() == 0) throw std::invalid_argument("W is empty");
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("W is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (w + w.transpose()),
                                            Eigen::EigenvaluesOnly);
  PositivityResult r;
  r.lambda_min = eig.eigenvalues()(0);
  r.lambda_max = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  r.positive = r.lambda_min > rank_tol * r.lambda_max && r.lambda_max > 0.0;
  return r;
}

struct ResolventSample {
  double epsilon = 0.0;
  double norm = 0.0;  // |eps (eps I + W)^{-1} h|
};

struct ResolventDecay {
  std::vector<ResolventSample> samples;
  bool converging = false;
  /// Limiting value when the samples stall above tolerance; in exact
  /// arithmetic this is the norm of the projection of h onto ker W.
  std::optional<double> plateau;
};

/// 1, 1/2, ..., 2^-(count-1).
inline std::vector<double> geometric_schedule(int count = 28) {
  std::vector<double> eps(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) eps[static_cast<std::size_t>(i)] = std::ldexp(1.0, -i);
  return eps;
}

/**
 * Samples eps -> |eps (eps I + W)^{-1} h| along a strictly decreasing
 * schedule. Converging when the last sample is <= tol * |h|. Otherwise the
 * last sample is reported as the plateau.
 */
inline ResolventDecay resolvent_decay(const Matrix& w, const StateVector& h,
                                      const std::vector<double>& schedule = geometric_schedule(),
                                      double tol = kDefaultDecayTol) {
  if (w.rows() != w.cols() || w.rows() != h.size()) {
    throw std::invalid_argument("resolvent_decay: dimension mismatch");
  }
  if (schedule.empty()) throw std::invalid_argument("empty epsilon schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1]))) {
      throw std::invalid_argument(
          "epsilon schedule must be positive and strictly decreasing");
    }
  }
  const auto n = w.rows();
  ResolventDecay out;
  out.samples.reserve(schedule.size());
  for (double eps : schedule) {
    const Matrix shifted = w + eps * Matrix::Identity(n, n);
    Eigen::LLT<Matrix> llt(shifted);
    StateVector y = (llt.info() == Eigen::Success)
                        ? StateVector(llt.solve(h))
                        : StateVector(shifted.ldlt().solve(h));
    out.samples.push_back({eps, eps * y.norm()});
  }
  const double last = out.samples.back().norm;
  out.converging = last <= tol * h.norm();
  if (!out.converging) out.plateau = last;
  return out;
}

/**
 * Numerical rank of the Krylov matrix [B, AB, ..., A^{n-1}B] by singular
 * value thresholding (sigma > rank_tol * sigma_max). Rank n means the
 * span of {A^j B U} is the whole space.
 */
inline int kalman_span_test(const Matrix& a, const Matrix& b,
                            double rank_tol = kDefaultRankTol) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument("kalman_span_test: dimension mismatch");
  }
  const auto n = a.rows();
  const auto m = b.cols();
  if (n == 0 || m == 0) return 0;
  Matrix krylov(n, n * m);
  krylov.leftCols(m) = b;
  for (Eigen::Index i = 1; i < n; ++i) {
    krylov.middleCols(i * m, m) = a * krylov.middleCols((i - 1) * m, m);
  }
  Eigen::JacobiSVD<Matrix> svd(krylov);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rank_tol * sv(0)) ++rank;
  }
  return rank;
}

enum class Verdict { kControllable, kNotControllable, kInconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kControllable:
      return "controllable";
    case Verdict::kNotControllable:
      return "not_controllable";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

struct ProbeResult {
  StateVector h;
  ResolventDecay decay;
};

struct ControllabilityOptions {
  double rank_tol = kDefaultRankTol;
  double decay_tol = kDefaultDecayTol;
  std::vector<double> schedule = geometric_schedule();
  int random_probes = 4;
  std::uint64_t seed = kDefaultProbeSeed;
};

/**
 * Every signal computed for one system. At finite dimension all the
 * equivalent criteria (kernel of M*, positivity, resolvent decay in the
 * strong or weak topology) reduce to lambda_min(W) > 0; they are reported
 * separately so that disagreement exposes numerical trouble.
 */
struct ControllabilityReport {
  GramianSet gramians;
  PositivityResult total;
  /// theta, gamma, theta_tilde, gamma_tilde in that order.
  std::array<PositivityResult, 4> per_gramian;
  std::vector<ProbeResult> probes;
  std::optional<int> kalman_rank;
  Verdict verdict = Verdict::kInconclusive;
  bool signals_agree = true;

  [[nodiscard]] double lambda_min() const { return total.lambda_min; }
};

/// Canonical basis vectors followed by random unit vectors.
inline std::vector<StateVector> probe_vectors(Eigen::Index n, int random_count,
                                              std::uint64_t seed) {
  std::vector<StateVector> probes;
  for (Eigen::Index i = 0; i < n; ++i) probes.push_back(StateVector::Unit(n, i));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int r = 0; r < random_count; ++r) {
    StateVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    probes.push_back(v / v.norm());
  }
  return probes;
}

inline ControllabilityReport controllability_report(
    const ImpulsiveSystem& sys, const QuadratureConfig& q = QuadratureConfig{},
    const ControllabilityOptions& options = {}) {
  ControllabilityReport report;
  report.gramians = gramian_set(sys, q);
  const auto& g = report.gramians;
  report.total = positivity_test(g.total, options.rank_tol);
  const std::array<const Matrix*, 4> parts{&g.theta, &g.gamma, &g.theta_tilde,
                                           &g.gamma_tilde};
  bool any_part_positive = false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    report.per_gramian[i] = positivity_test(*parts[i], options.rank_tol);
    any_part_positive = any_part_positive || report.per_gramian[i].positive;
  }

  bool all_decay = true;
  for (auto& h : probe_vectors(sys.state_dim(), options.random_probes, options.seed)) {
    auto decay = resolvent_decay(g.total, h, options.schedule, options.decay_tol);
    all_decay = all_decay && decay.converging;
    report.probes.push_back({std::move(h), std::move(decay)});
  }

  bool kalman_full = false;
  if (const auto* dense = std::get_if<DenseGenerator>(&sys.generator)) {
    report.kalman_rank = kalman_span_test(dense->a, sys.b, options.rank_tol);
    kalman_full = *report.kalman_rank == sys.state_dim();
  }

  const bool certified = report.total.positive || any_part_positive || kalman_full;
  if (certified) {
    report.verdict = Verdict::kControllable;
  } else if (!all_decay) {
    report.verdict = Verdict::kNotControllable;
  } else {
    report.verdict = Verdict::kInconclusive;
  }
  // A full Kalman rank certifies positivity of W; without impulses the
  // converse holds too.
  const bool kalman_consistent =
      !report.kalman_rank ||
      (kalman_full ? report.total.positive
                   : (sys.num_stages() > 0 || !report.total.positive));
  report.signals_agree = (report.total.positive == all_decay) &&
                         kalman_consistent &&
                         (!any_part_positive || report.total.positive);
  return report;
}

}  // namespace impulsive

#endif  // IMPULSIVE_CONTROLLABILITY_HPP
