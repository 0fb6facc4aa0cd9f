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
#ifndef IMPULSIVE_SYSTEM_MODEL_HPP
#define IMPULSIVE_SYSTEM_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace impulsive {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Coordinates of a forward state, target, or adjoint state. All of them live
/// in the same Euclidean coordinate space R^n.
using StateVector = Eigen::VectorXd;

/// Thrown when problem data violates a structural invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Generator given as an explicit bounded matrix; S(t) = exp(tA).
struct DenseGenerator {
  Matrix a;
};

/**
 * Generator made of independent oscillators, one 2x2 block per frequency m:
 *
 *   S(t) = [[ cos mt, sin mt],
 *           [-sin mt, cos mt]]
 *
 * This is the wave-equation group written in the isometric coordinates
 * (m*alpha, beta), so every block is orthogonal and S*(t) = S(-t) = S(t)^T.
 * State dimension is twice the number of frequencies.
 */
struct SpectralBlocks {
  std::vector<double> frequencies;
};

using GeneratorSpec = std::variant<DenseGenerator, SpectralBlocks>;

/// One impulse: at time t_k the state jumps by C_k x(t_k) + D_k v_k.
struct ImpulseStage {
  double time = 0.0;
  Matrix c;
  Matrix d;
};

/**
 * Full problem data
 *
 *   x'(t) = A x(t) + B u(t),         t in [0,b] minus {t_1..t_p}
 *   dx(t_k) = C_k x(t_k) + D_k v_k,  k = 1..p
 *
 * with the left-continuity convention x(t_k^-) = x(t_k). Stage indices in
 * the public API are 1-based (k = 1..p) and t_0 = 0, t_{p+1} = b.
 */
struct ImpulsiveSystem {
  GeneratorSpec generator;
  Matrix b;
  std::vector<ImpulseStage> stages;
  double horizon = 1.0;

  [[nodiscard]] Eigen::Index state_dim() const { return b.rows(); }
  [[nodiscard]] Eigen::Index input_dim() const { return b.cols(); }
  [[nodiscard]] int num_stages() const { return static_cast<int>(stages.size()); }

  /// t_k for k in 0..p+1.
  [[nodiscard]] double time(int k) const {
    if (k <= 0) return 0.0;
    if (k > num_stages()) return horizon;
    return stages[static_cast<std::size_t>(k - 1)].time;
  }

  [[nodiscard]] const ImpulseStage& stage(int k) const {
    if (k < 1 || k > num_stages()) {
      throw std::out_of_range("stage index " + std::to_string(k) +
                              " outside 1.." + std::to_string(num_stages()));
    }
    return stages[static_cast<std::size_t>(k - 1)];
  }

  /// Time of the last impulse, or 0 when there are none.
  [[nodiscard]] double last_impulse_time() const { return time(num_stages()); }
};

// ---------------------------------------------------------------------------
// Controls
// ---------------------------------------------------------------------------

/**
 * Piecewise-constant control law. cells[k] holds the values on subinterval
 * k+1, i.e. on [t_k, t_{k+1}], split into cells[k].size() equal cells. The
 * grid therefore always aligns with the impulse times.
 */
struct PiecewiseConstant {
  std::vector<std::vector<Vector>> cells;
};

/**
 * Control law u(t) = B^T psi(t), where psi is the adjoint state ending at
 * phi. post_impulse[k-1] caches psi(t_k^+).
 */
struct AdjointFeedback {
  StateVector phi;
  std::vector<StateVector> post_impulse;
};

using ControlLaw = std::variant<PiecewiseConstant, AdjointFeedback>;

/// w = (u(.), {v_k}).
struct ControlPair {
  ControlLaw distributed;
  std::vector<Vector> impulses;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
  std::vector<std::string> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
};

namespace internal {

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace internal

/// Dimension of the state space a generator acts on.
inline Eigen::Index state_dimension(const GeneratorSpec& g) {
  return std::visit(
      [](const auto& gen) -> Eigen::Index {
        using T = std::decay_t<decltype(gen)>;
        if constexpr (std::is_same_v<T, DenseGenerator>) {
          return gen.a.rows();
        } else {
          return 2 * static_cast<Eigen::Index>(gen.frequencies.size());
        }
      },
      g);
}

inline ValidationReport validate_system(const ImpulsiveSystem& sys) {
  ValidationReport report;
  auto& v = report.violations;

  Eigen::Index n = 0;
  if (const auto* dense = std::get_if<DenseGenerator>(&sys.generator)) {
    if (dense->a.rows() != dense->a.cols()) {
      v.push_back("dimension mismatch: generator A is " +
                  internal::shape(dense->a) + ", not square");
    }
    if (!internal::all_finite(dense->a)) v.push_back("non-finite entry in A");
    n = dense->a.rows();
  } else {
    const auto& blocks = std::get<SpectralBlocks>(sys.generator);
    if (blocks.frequencies.empty()) v.push_back("spectral_blocks is empty");
    for (double m : blocks.frequencies) {
      if (!std::isfinite(m) || m <= 0.0) {
        v.push_back("spectral frequency must be positive and finite");
        break;
      }
    }
    n = state_dimension(sys.generator);
  }

  if (sys.b.rows() != n) {
    v.push_back("dimension mismatch: B is " + internal::shape(sys.b) +
                " but the state dimension is " + std::to_string(n));
  }
  if (!internal::all_finite(sys.b)) v.push_back("non-finite entry in B");
  if (!std::isfinite(sys.horizon) || sys.horizon <= 0.0) {
    v.push_back("horizon b must be positive and finite");
  }

  const Eigen::Index m_u = sys.b.cols();
  double previous = 0.0;
  for (int k = 1; k <= sys.num_stages(); ++k) {
    const auto& st = sys.stages[static_cast<std::size_t>(k - 1)];
    const std::string tag = "stage " + std::to_string(k) + ": ";
    if (!std::isfinite(st.time) || st.time <= 0.0 || st.time >= sys.horizon) {
      v.push_back(tag + "impulse time outside (0,b)");
    } else if (k > 1 && st.time <= previous) {
      v.push_back(tag + "impulse times not strictly increasing");
    }
    previous = st.time;
    if (st.c.rows() != n || st.c.cols() != n) {
      v.push_back(tag + "dimension mismatch: C is " + internal::shape(st.c) +
                  ", expected " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (st.d.rows() != n || st.d.cols() != m_u) {
      v.push_back(tag + "dimension mismatch: D is " + internal::shape(st.d) +
                  ", expected " + std::to_string(n) + "x" +
                  std::to_string(m_u));
    }
    if (!internal::all_finite(st.c) || !internal::all_finite(st.d)) {
      v.push_back(tag + "non-finite entry in C or D");
    }
  }
  return report;
}

/// Throws ValidationError listing every violation.
inline void require_valid(const ImpulsiveSystem& sys) {
  const auto report = validate_system(sys);
  if (report.ok()) return;
  std::string msg = "invalid system:";
  for (const auto& s : report.violations) msg += "\n  " + s;
  throw ValidationError(msg);
}

/// Builds a system and validates it.
inline ImpulsiveSystem make_system(GeneratorSpec generator, Matrix b,
                                   std::vector<ImpulseStage> stages,
                                   double horizon) {
  ImpulsiveSystem sys{std::move(generator), std::move(b), std::move(stages),
                      horizon};
  require_valid(sys);
  return sys;
}

// ---------------------------------------------------------------------------
// Semigroup
// ---------------------------------------------------------------------------

/// Infinitesimal generator as a dense matrix (spectral blocks expanded).
inline Matrix generator_matrix(const GeneratorSpec& g) {
  if (const auto* dense = std::get_if<DenseGenerator>(&g)) return dense->a;
  const auto& freqs = std::get<SpectralBlocks>(g).frequencies;
  const auto n = state_dimension(g);
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(2 * i);
    a(r, r + 1) = freqs[i];
    a(r + 1, r) = -freqs[i];
  }
  return a;
}

namespace internal {

inline void check_time(const GeneratorSpec& g, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("non-finite time");
  if (t < 0.0 && std::holds_alternative<DenseGenerator>(g)) {
    throw std::invalid_argument(
        "dense semigroup is only defined for t >= 0");
  }
}

// Applies the rotation blocks for time t to every column of x in place.
inline void rotate_blocks(const SpectralBlocks& blocks, double t, Matrix& x) {
  for (std::size_t i = 0; i < blocks.frequencies.size(); ++i) {
    const double angle = blocks.frequencies[i] * t;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const auto r = static_cast<Eigen::Index>(2 * i);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double x1 = x(r, j);
      const double x2 = x(r + 1, j);
      x(r, j) = c * x1 + s * x2;
      x(r + 1, j) = -s * x1 + c * x2;
    }
  }
}

}  // namespace internal

/// S(t) as an explicit n x n matrix.
inline Matrix semigroup_matrix(const GeneratorSpec& g, double t) {
  internal::check_time(g, t);
  if (const auto* dense = std::get_if<DenseGenerator>(&g)) {
    if (t == 0.0) return Matrix::Identity(dense->a.rows(), dense->a.cols());
    return Matrix((t * dense->a).exp());
  }
  Matrix s = Matrix::Identity(state_dimension(g), state_dimension(g));
  internal::rotate_blocks(std::get<SpectralBlocks>(g), t, s);
  return s;
}

/// S(t) applied to each column of x.
inline Matrix semigroup_apply(const GeneratorSpec& g, double t,
                              const Matrix& x) {
  internal::check_time(g, t);
  if (t == 0.0) return x;
  if (const auto* dense = std::get_if<DenseGenerator>(&g)) {
    return Matrix((t * dense->a).exp()) * x;
  }
  Matrix y = x;
  internal::rotate_blocks(std::get<SpectralBlocks>(g), t, y);
  return y;
}

inline StateVector semigroup_apply(const GeneratorSpec& g, double t,
                                   const StateVector& x) {
  return semigroup_apply(g, t, Matrix(x)).col(0);
}

/// S*(t) applied to each column of x: exp(tA^T) for dense generators, S(-t)
/// for spectral blocks.
inline Matrix semigroup_adjoint_apply(const GeneratorSpec& g, double t,
                                      const Matrix& x) {
  internal::check_time(g, t);
  if (t == 0.0) return x;
  if (const auto* dense = std::get_if<DenseGenerator>(&g)) {
    return Matrix((t * dense->a.transpose()).exp()) * x;
  }
  Matrix y = x;
  internal::rotate_blocks(std::get<SpectralBlocks>(g), -t, y);
  return y;
}

inline StateVector semigroup_adjoint_apply(const GeneratorSpec& g, double t,
                                           const StateVector& x) {
  return semigroup_adjoint_apply(g, t, Matrix(x)).col(0);
}

// ---------------------------------------------------------------------------
// Jump propagators
// ---------------------------------------------------------------------------

/// S_C(t_j, t_{j-1}) x = (I + C_j) S(t_j - t_{j-1}) x, applied column-wise.
inline Matrix jump_propagator_apply(const ImpulsiveSystem& sys, int j,
                                    const Matrix& x) {
  const auto& st = sys.stage(j);
  Matrix y = semigroup_apply(sys.generator, sys.time(j) - sys.time(j - 1), x);
  return y + st.c * y;
}

inline StateVector jump_propagator_apply(const ImpulsiveSystem& sys, int j,
                                         const StateVector& x) {
  return jump_propagator_apply(sys, j, Matrix(x)).col(0);
}

/**
 * Descending product S_C(t_k,.) S_C(t_{k-1},.) ... S_C(t_i,.) x. The factor
 * with the smallest index is applied first. An empty product (i > k) is the
 * identity, so the admissible range is 0 <= k <= p and 1 <= i <= p + 1.
 */
inline Matrix product_propagator_apply(const ImpulsiveSystem& sys, int k,
                                       int i, const Matrix& x) {
  const int p = sys.num_stages();
  if (k < 0 || k > p || i < 1 || i > p + 1) {
    throw std::out_of_range("product bounds (" + std::to_string(k) + ", " +
                            std::to_string(i) + ") outside stage range 1.." +
                            std::to_string(p));
  }
  Matrix y = x;
  for (int j = i; j <= k; ++j) y = jump_propagator_apply(sys, j, y);
  return y;
}

inline StateVector product_propagator_apply(const ImpulsiveSystem& sys, int k,
                                            int i, const StateVector& x) {
  return product_propagator_apply(sys, k, i, Matrix(x)).col(0);
}

/// Number of impulse times strictly below t, i.e. the k with t in (t_k, t_{k+1}].
inline int stages_before(const ImpulsiveSystem& sys, double t) {
  int k = 0;
  while (k < sys.num_stages() && sys.time(k + 1) < t) ++k;
  return k;
}

// ---------------------------------------------------------------------------
// Control helpers
// ---------------------------------------------------------------------------

/// Zero distributed control and zero impulse vectors.
inline ControlPair zero_control(const ImpulsiveSystem& sys) {
  PiecewiseConstant law;
  law.cells.assign(static_cast<std::size_t>(sys.num_stages() + 1),
                   {Vector::Zero(sys.input_dim())});
  return {std::move(law),
          std::vector<Vector>(static_cast<std::size_t>(sys.num_stages()),
                              Vector::Zero(sys.input_dim()))};
}

/// u(t) = u on all of [0,b], with the given impulse vectors.
inline ControlPair constant_control(const ImpulsiveSystem& sys, const Vector& u,
                                    std::vector<Vector> impulses) {
  PiecewiseConstant law;
  law.cells.assign(static_cast<std::size_t>(sys.num_stages() + 1), {u});
  return {std::move(law), std::move(impulses)};
}

/// Checks a control pair against the system dimensions; throws ValidationError.
inline void require_compatible(const ImpulsiveSystem& sys,
                               const ControlPair& w) {
  const auto p = static_cast<std::size_t>(sys.num_stages());
  if (w.impulses.size() != p) {
    throw ValidationError("control has " + std::to_string(w.impulses.size()) +
                          " impulse vectors, system has " + std::to_string(p) +
                          " stages");
  }
  for (const auto& v : w.impulses) {
    if (v.size() != sys.input_dim() || !v.allFinite()) {
      throw ValidationError("impulse control vector has wrong length or "
                            "non-finite entries");
    }
  }
  if (const auto* pc = std::get_if<PiecewiseConstant>(&w.distributed)) {
    if (pc->cells.size() != p + 1) {
      throw ValidationError("piecewise-constant control must give one grid per "
                            "impulse subinterval (" + std::to_string(p + 1) +
                            ")");
    }
    for (const auto& grid : pc->cells) {
      if (grid.empty()) throw ValidationError("empty control grid");
      for (const auto& u : grid) {
        if (u.size() != sys.input_dim() || !u.allFinite()) {
          throw ValidationError("control sample has wrong length or "
                                "non-finite entries");
        }
      }
    }
  } else {
    const auto& fb = std::get<AdjointFeedback>(w.distributed);
    if (fb.phi.size() != sys.state_dim() || fb.post_impulse.size() != p) {
      throw ValidationError("adjoint feedback law does not match the system");
    }
  }
}

}  // namespace impulsive

#endif  // IMPULSIVE_SYSTEM_MODEL_HPP
