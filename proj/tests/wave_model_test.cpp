#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "impulsive/controllability.hpp"
#include "impulsive/fixtures.hpp"
#include "impulsive/wave_model.hpp"
#include "random_systems.hpp"

namespace {

using namespace impulsive;
namespace ts = impulsive::test_support;

constexpr double kPi = std::numbers::pi;

WaveModel single_mode() {
  WaveModel wm;
  wm.modes = 1;
  wm.gamma = {1.0};
  wm.alpha = {0.0};
  wm.beta = {0.0};
  wm.horizon = 2.0 * kPi;
  return wm;
}

WaveModel unit_gamma(int modes) {
  auto wm = fixtures::wave_w3();
  wm.gamma.assign(3, 1.0);
  return retruncate(std::move(wm), std::min(modes, 3));
}

TEST(Build, SingleMode) {
  const auto sys = build_wave_system(single_mode());
  EXPECT_EQ(sys.state_dim(), 2);
  EXPECT_EQ(sys.b(0, 0), 0.0);
  EXPECT_EQ(sys.b(1, 0), 1.0);
  ASSERT_TRUE(std::holds_alternative<SpectralBlocks>(sys.generator));
  EXPECT_EQ(std::get<SpectralBlocks>(sys.generator).frequencies, std::vector<double>{1.0});
}

TEST(Build, ZeroDataGivesZeroDrift) {
  auto wm = fixtures::wave_w3();
  wm.impulses[0].a = {0.0, 0.0, 0.0};
  wm.impulses[0].b = {0.0, 0.0, 0.0};
  const auto sys = build_wave_system(wm);
  EXPECT_EQ(free_final_state(sys, wave_initial_state(wm)).norm(), 0.0);
}

TEST(Build, W3ImpulseCoordinates) {
  const auto wm = fixtures::wave_w3();
  const auto sys = build_wave_system(wm);
  EXPECT_EQ(sys.state_dim(), 6);
  ASSERT_EQ(sys.num_stages(), 1);
  StateVector want(6);
  want << 0.1, 0.0, 0.0, 0.2, 0.0, 0.0;
  EXPECT_LE((sys.stage(1).d.col(0) - want).norm(), 1e-15);
  EXPECT_EQ(sys.stage(1).c.norm(), 0.0);
  const auto back = from_canonical(sys.stage(1).d.col(0));
  EXPECT_EQ(back.alpha, wm.impulses[0].a);
  EXPECT_EQ(back.beta, wm.impulses[0].b);
}

TEST(Build, RejectsInvalidModel) {
  auto wm = fixtures::wave_w3();
  wm.gamma.pop_back();
  EXPECT_THROW(build_wave_system(wm), std::invalid_argument);
}

TEST(Isometry, CanonicalNorm) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const int modes = ts::uniform_int(rng, 1, 8);
    std::vector<double> a, b;
    double want = 0.0;
    for (int m = 1; m <= modes; ++m) {
      a.push_back(ts::normal(rng));
      b.push_back(ts::normal(rng));
      want += m * m * a.back() * a.back() + b.back() * b.back();
    }
    EXPECT_NEAR(to_canonical(a, b).squaredNorm(), want, 1e-13 * want);
  }
}

TEST(Isometry, EnergyConservedByFreeEvolution) {
  std::mt19937_64 rng(62);
  const auto sys = build_wave_system(retruncate(fixtures::wave_w3(), 3));
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector y = ts::random_vector(rng, 6);
    const double t = ts::uniform(rng, 0.0, 10.0);
    const double e1 = semigroup_apply(sys.generator, t, y).squaredNorm();
    EXPECT_LE(std::abs(e1 - y.squaredNorm()), 1e-10 * y.squaredNorm());
  }
}

TEST(AdjointTrace, SingleTerm) {
  const auto wm = single_mode();
  StateVector phi(2);
  phi << 1.0, 0.0;
  EXPECT_NEAR(adjoint_trace(wm, phi, wm.horizon - kPi / 2), 1.0, 1e-15);
  EXPECT_EQ(adjoint_trace(wm, StateVector::Zero(2), 1.0), 0.0);
  EXPECT_THROW(adjoint_trace(fixtures::wave_w3(), StateVector::Zero(6), 0.5), std::out_of_range);
}

TEST(AdjointTrace, AgreesWithGenericPath) {
  std::mt19937_64 rng(63);
  const auto wm = fixtures::wave_w3();
  const auto sys = build_wave_system(wm);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector phi = ts::random_vector(rng, 6);
    const double t = ts::uniform(rng, 1.0, wm.horizon);
    const double generic =
        (sys.b.transpose() * semigroup_adjoint_apply(sys.generator, wm.horizon - t, phi))(0);
    EXPECT_NEAR(adjoint_trace(wm, phi, t), generic, 1e-12);
    const double via_adjoint = (sys.b.transpose() * adjoint_solution(sys, phi, t))(0);
    EXPECT_NEAR(adjoint_trace(wm, phi, t), via_adjoint, 1e-12);
  }
}

TEST(FourierRecovery, SingleMode) {
  const auto wm = single_mode();
  StateVector phi(2);
  phi << 1.0, 0.0;
  const auto rec = fourier_recovery(
      wm, [&](double s) { return adjoint_trace(wm, phi, wm.horizon - s); });
  ASSERT_EQ(rec.size(), 1u);
  EXPECT_NEAR(rec[0].first, 1.0, 1e-12);
  EXPECT_NEAR(rec[0].second, 0.0, 1e-12);
}

TEST(FourierRecovery, ZeroTrace) {
  const auto rec = fourier_recovery(fixtures::wave_w3(), [](double) { return 0.0; });
  for (const auto& [a, b] : rec) {
    EXPECT_EQ(a, 0.0);
    EXPECT_EQ(b, 0.0);
  }
}

TEST(FourierRecovery, RoundTrip) {
  std::mt19937_64 rng(64);
  const auto wm = fixtures::wave_w3();
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector phi = ts::random_vector(rng, 6);
    const auto rec = fourier_recovery(
        wm, [&](double s) { return adjoint_trace(wm, phi, wm.horizon - s); });
    const auto coeffs = from_canonical(phi);
    for (int m = 1; m <= 3; ++m) {
      const double g = wm.gamma[static_cast<std::size_t>(m - 1)];
      const auto i = static_cast<std::size_t>(m - 1);
      EXPECT_NEAR(rec[i].first, m * g * coeffs.alpha[i], 1e-8);
      EXPECT_NEAR(rec[i].second, g * coeffs.beta[i], 1e-8);
    }
  }
}

TEST(FourierRecovery, HorizonTooShort) {
  auto wm = fixtures::wave_w3();
  wm.horizon = 5.0;
  EXPECT_THROW(fourier_recovery(wm, [](double) { return 0.0; }), std::invalid_argument);
}

TEST(GammaSpectrum, W3MinimumIsPiOverNine) {
  const auto sys = build_wave_system(fixtures::wave_w3());
  const auto pos = positivity_test(gamma_gramian(sys, QuadratureConfig(256)));
  EXPECT_NEAR(pos.lambda_min, kPi / 9.0, 1e-6);
  EXPECT_TRUE(pos.positive);
}

TEST(GammaSpectrum, UnitGammaIsPiIdentity) {
  const auto sys = build_wave_system(unit_gamma(3));
  const Matrix g = gamma_gramian(sys, QuadratureConfig(256));
  EXPECT_LE((g - kPi * Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GammaSpectrum, DoubleEigenvaluesPiGammaSquared) {
  std::mt19937_64 rng(65);
  for (int modes = 1; modes <= 8; ++modes) {
    WaveModel wm;
    wm.modes = modes;
    for (int m = 0; m < modes; ++m) wm.gamma.push_back(ts::uniform(rng, 0.2, 1.5));
    wm.alpha.assign(static_cast<std::size_t>(modes), 0.0);
    wm.beta.assign(static_cast<std::size_t>(modes), 0.0);
    wm.horizon = 2.0 * kPi;
    const Matrix g = gamma_gramian(build_wave_system(wm), QuadratureConfig(256));
    std::vector<double> want;
    for (double gm : wm.gamma) {
      want.push_back(kPi * gm * gm);
      want.push_back(kPi * gm * gm);
    }
    std::sort(want.begin(), want.end());
    const Eigen::VectorXd got = Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues();
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_NEAR(got(static_cast<Eigen::Index>(i)), want[i], 1e-6) << modes;
    }
  }
}

TEST(GammaSpectrum, TruncationMonotone) {
  double previous = INFINITY;
  for (int modes = 1; modes <= 6; ++modes) {
    WaveModel wm;
    wm.modes = modes;
    for (int m = 1; m <= modes; ++m) wm.gamma.push_back(1.0 / m);
    wm.alpha.assign(static_cast<std::size_t>(modes), 0.0);
    wm.beta.assign(static_cast<std::size_t>(modes), 0.0);
    wm.horizon = 2.0 * kPi;
    const double lmin =
        positivity_test(gamma_gramian(build_wave_system(wm), QuadratureConfig(256))).lambda_min;
    EXPECT_NEAR(lmin, kPi / (modes * modes), 1e-6);
    EXPECT_LE(lmin, previous);
    previous = lmin;
  }
}

TEST(GammaSpectrum, ZeroGammaModeIsUncontrollable) {
  auto wm = fixtures::wave_w3();
  wm.gamma[1] = 0.0;
  const auto sys = build_wave_system(wm);
  const Matrix w = synthesis_gramian(gramian_set(sys, QuadratureConfig(256)),
                                     SteerOptions{wave_fixed_impulses(wm)});
  const StateVector h = to_canonical({0.0, 0.3, 0.0}, {0.0, 0.0, 0.0}).normalized();
  const auto d = resolvent_decay(w, h);
  EXPECT_FALSE(d.converging);
  ASSERT_TRUE(d.plateau.has_value());
  EXPECT_NEAR(*d.plateau, 1.0, 1e-9);
  EXPECT_FALSE(positivity_test(w).positive);
}

TEST(Demo, SteersToTarget) {
  const auto wm = fixtures::wave_w3();
  const WaveCoefficients target{{0.0, 0.05, 0.0}, {0.2, 0.0, -0.1}};
  const auto r = wave_demo(wm, target, 1e-6);
  EXPECT_NEAR(r.gamma_positivity.lambda_min, kPi / 9.0, 1e-6);
  const auto& s = r.synthesis;
  EXPECT_LE(s.identity_residual(), 1e-6 * (1.0 + r.target.norm()));
  EXPECT_NEAR(s.achieved_error.norm(), 1e-6 * s.phi_hat.norm(), 1e-9);
  // |x(theta)| <= sum |alpha_m| <= sqrt(sum 1/m^2) |canonical error|.
  const double bound = std::sqrt(1.0 + 0.25 + 1.0 / 9.0) * s.achieved_error.norm();
  EXPECT_LE(r.final_profile_error, bound + 1e-12);
  EXPECT_EQ(r.thetas.size(), 257u);
  // 33 samples plus a left/right pair at the impulse time.
  EXPECT_EQ(r.profile.size(), 35u);
}

TEST(Demo, ErrorShrinksWithEpsilon) {
  const auto wm = fixtures::wave_w3();
  const WaveCoefficients target{{0.0, 0.05, 0.0}, {0.2, 0.0, -0.1}};
  double previous = INFINITY;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const double err = wave_demo(wm, target, eps).synthesis.achieved_error.norm();
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(Demo, FreeImpulsesUseFullGramian) {
  const auto wm = fixtures::wave_w3();
  const WaveCoefficients target{{0.0, 0.05, 0.0}, {0.2, 0.0, -0.1}};
  WaveDemoOptions opts;
  opts.free_impulses = true;
  const auto r = wave_demo(wm, target, 1e-6, QuadratureConfig(256), opts);
  EXPECT_LE(r.synthesis.identity_residual(), 1e-6 * (1.0 + r.target.norm()));
}

TEST(Retruncate, PadsAndChecks) {
  const auto wm = retruncate(fixtures::wave_w3(), 2);
  EXPECT_EQ(wm.modes, 2);
  EXPECT_EQ(wm.impulses[0].a.size(), 2u);
  EXPECT_THROW(retruncate(fixtures::wave_w3(), 4), std::invalid_argument);
}

}  // namespace
