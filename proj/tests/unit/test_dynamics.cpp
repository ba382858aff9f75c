#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "magsense/dynamics.hpp"

using namespace magsense;

namespace {

// Fixed-step RK4 on dS/dt = A S + S A^T + D.
Matrix4 rk4_covariance(const Matrix4& a, const Matrix4& d, Matrix4 s, double t, int steps) {
  const double h = t / steps;
  auto f = [&](const Matrix4& x) -> Matrix4 { return a * x + x * a.transpose() + d; };
  for (int i = 0; i < steps; ++i) {
    const Matrix4 k1 = f(s);
    const Matrix4 k2 = f(s + 0.5 * h * k1);
    const Matrix4 k3 = f(s + 0.5 * h * k2);
    const Matrix4 k4 = f(s + h * k3);
    s += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return s;
}

SystemParams squeezed(double r0, double th0) {
  SystemParams p = reference_parameters();
  p.pre_squeeze = {r0, th0};
  return p;
}

}  // namespace

TEST(Drift, StructureAndStability) {
  const SystemParams p = reference_parameters();
  const Matrix4 a = build_drift(p);
  EXPECT_DOUBLE_EQ(a(kAx, kAx), -0.5 * p.kappa_a);
  EXPECT_DOUBLE_EQ(a(kMp, kMp), -0.5 * p.kappa_m);
  EXPECT_DOUBLE_EQ(a(kAx, kMp), p.g_am);
  EXPECT_DOUBLE_EQ(a(kAp, kMx), -p.g_am);
  EXPECT_DOUBLE_EQ(a(kMx, kAp), p.g_am);
  EXPECT_DOUBLE_EQ(a(kMp, kAx), -p.g_am);
  EXPECT_TRUE(is_hurwitz(a));
}

TEST(Diffusion, VacuumAtZeroTemperature) {
  SystemParams p = reference_parameters();
  p.temperature = 0.0;
  const Matrix4 d = build_diffusion(p, {});
  EXPECT_DOUBLE_EQ(d(kAx, kAx), 0.5 * p.kappa_a);
  EXPECT_DOUBLE_EQ(d(kMp, kMp), 0.5 * p.kappa_m);
  EXPECT_DOUBLE_EQ(d(kAx, kMp), 0.0);
}

TEST(SteadyCovariance, VacuumIsStationary) {
  SystemParams p = reference_parameters();
  p.temperature = 0.0;
  const LinearSystem sys = sensing_system(p);
  const CovarianceState s = steady_covariance(sys.drift, sys.diffusion);
  EXPECT_LT((s.sigma - 0.5 * Matrix4::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(satisfies_uncertainty(s));
}

TEST(SteadyCovariance, SolvesLyapunov) {
  const SystemParams p = squeezed(2.0, std::numbers::pi);
  const LinearSystem sys = preparation_system(p);
  const CovarianceState s = steady_covariance(sys.drift, sys.diffusion);
  EXPECT_LT(lyapunov_residual(sys.drift, sys.diffusion, s.sigma), 1e-10);
  EXPECT_LT((s.sigma - s.sigma.transpose()).norm(), 1e-14 * s.sigma.norm());
  EXPECT_TRUE(satisfies_uncertainty(s));
}

TEST(SteadyCovariance, RejectsNonHurwitzDrift) {
  Matrix4 a = Matrix4::Identity() * -1.0;
  a(0, 0) = 0.5;
  EXPECT_THROW(steady_covariance(a, Matrix4::Identity()), DomainError);
  EXPECT_THROW(LinearSystem::make(a, Matrix4::Identity()), DomainError);
}

TEST(LinearSystem, RejectsIndefiniteDiffusion) {
  Matrix4 d = Matrix4::Identity();
  d(0, 0) = -1.0;
  EXPECT_THROW(LinearSystem::make(-Matrix4::Identity(), d), DomainError);
}

// Pre-squeezed stationary state at r0 = 2, theta0 = pi, reference
// parameters; values from a long RK4 relaxation (independent of the
// Kronecker solve).
TEST(PreparedState, FrozenAgainstRelaxation) {
  const SystemParams p = squeezed(2.0, std::numbers::pi);
  const LinearSystem sys = preparation_system(p);
  const double t = 40.0 / std::abs(spectral_abscissa(sys.drift));
  const double h_max = 0.05 / p.kappa_m;
  const Matrix4 oracle =
      rk4_covariance(sys.drift, sys.diffusion, Matrix4::Zero(), t, static_cast<int>(t / h_max) + 1);
  const Matrix4 s = prepared_state(p).sigma;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(s(i, j), oracle(i, j), 1e-8 * (1 + std::abs(oracle(i, j)))) << i << "," << j;
    }
  }
  EXPECT_NEAR(s(kAx, kAx), 0.01276, 5e-5);
  EXPECT_NEAR(s(kAp, kAp), 27.10, 0.01);
  EXPECT_NEAR(s(kMx, kMx), 0.5685, 5e-4);
  EXPECT_NEAR(s(kMp, kMp), 0.4987, 5e-4);
  EXPECT_NEAR(s(kAx, kMp), 0.02127, 5e-5);
  EXPECT_NEAR(s(kAp, kMx), 1.161, 1e-3);
}

TEST(EvolveCovariance, IdentityAtZeroAndRejectsNegativeTime) {
  const SystemParams p = reference_parameters();
  const LinearSystem sys = sensing_system(p);
  CovarianceState s0;
  s0.sigma = prepared_state(squeezed(1.0, 0.3)).sigma;
  const CovarianceState s = evolve_covariance(sys.drift, sys.diffusion, s0, 0.0);
  EXPECT_EQ(s.sigma, s0.sigma);
  EXPECT_THROW(evolve_covariance(sys.drift, sys.diffusion, s0, -1.0), DomainError);
}

TEST(EvolveCovariance, MatchesRk4AtFiniteTime) {
  const SystemParams p = reference_parameters();
  const LinearSystem sys = sensing_system(p);
  CovarianceState s0;
  s0.sigma = prepared_state(squeezed(2.0, std::numbers::pi)).sigma;
  const double t = 0.7 / p.kappa_m;
  const CovarianceState s = evolve_covariance(sys.drift, sys.diffusion, s0, t);
  const Matrix4 oracle = rk4_covariance(sys.drift, sys.diffusion, s0.sigma, t, 4000);
  EXPECT_LT((s.sigma - oracle).cwiseAbs().maxCoeff(), 1e-9 * oracle.cwiseAbs().maxCoeff());
  EXPECT_DOUBLE_EQ(s.time, t);
}

TEST(EvolveCovariance, SemigroupProperty) {
  const SystemParams p = squeezed(0.5, 1.0);
  const LinearSystem sys = sensing_system(p);
  CovarianceState s0;
  s0.sigma = Matrix4::Identity() * 0.5;
  const double t1 = 0.3 / p.kappa_m, t2 = 1.1 / p.kappa_m;
  const auto a = evolve_covariance(sys.drift, sys.diffusion, s0, t1 + t2);
  const auto b = evolve_covariance(sys.drift, sys.diffusion,
                                   evolve_covariance(sys.drift, sys.diffusion, s0, t1), t2);
  EXPECT_LT((a.sigma - b.sigma).cwiseAbs().maxCoeff(), 1e-12 * a.sigma.cwiseAbs().maxCoeff());
}

TEST(PulseKick, TransverseDisplacementAndLongitudinalRotation) {
  const SystemParams p = reference_parameters();
  const double bx = 2e-9, by = -3e-9;
  const PulseKick k = pulse_kick(p, {bx, by, 4.0 / p.gamma_gyro});
  const double amp = std::numbers::sqrt2 * p.epsilon_b;
  EXPECT_NEAR(k.displacement(kMp), amp * bx, 1e-9 * amp * std::abs(bx));
  EXPECT_NEAR(k.displacement(kMx), -amp * by, 1e-9 * amp * std::abs(by));
  EXPECT_EQ(k.displacement(kAx), 0.0);
  EXPECT_NEAR(k.map(kMx, kMp), 4.0, 1e-12);
  EXPECT_NEAR(k.map(kMp, kMx), -4.0, 1e-12);
  EXPECT_EQ(k.map(kAx, kAx), 1.0);
}

TEST(PulseKick, PhaseRotatesTransverseComponents) {
  SystemParams p = reference_parameters();
  p.pulse_phase = std::numbers::pi / 2;
  const PulseKick k = pulse_kick(p, {1e-9, 0.0, 0.0});
  const double amp = std::numbers::sqrt2 * p.epsilon_b * 1e-9;
  EXPECT_NEAR(k.displacement(kMx), -amp, 1e-9 * amp);
  EXPECT_NEAR(k.displacement(kMp), 0.0, 1e-9 * amp);
}

TEST(Uncertainty, DetectsUnphysicalCovariance) {
  CovarianceState s;
  s.sigma = Matrix4::Identity() * 0.1;
  EXPECT_FALSE(satisfies_uncertainty(s));
  s.sigma = Matrix4::Identity() * 0.5;
  EXPECT_TRUE(satisfies_uncertainty(s));
}

TEST(SteadyCovariance, RandomDrawsAgreeWithRelaxation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    SystemParams p = reference_parameters();
    p.kappa_a = units::angular(0.5e6 + 5e6 * u(rng));
    p.kappa_m = units::angular(0.5e6 + 5e6 * u(rng));
    p.g_am = units::angular(1e4 + 3e6 * u(rng));
    p.temperature = 0.5 * u(rng);
    p.pre_squeeze = {2.0 * u(rng), 2 * std::numbers::pi * u(rng)};
    const LinearSystem sys = preparation_system(p);
    const Matrix4 s = steady_covariance(sys.drift, sys.diffusion).sigma;
    const double t = 40.0 / std::abs(spectral_abscissa(sys.drift));
    const CovarianceState r = evolve_covariance(sys.drift, sys.diffusion, {}, t);
    EXPECT_LT((s - r.sigma).cwiseAbs().maxCoeff(), 1e-7 * s.cwiseAbs().maxCoeff()) << k;
  }
}
