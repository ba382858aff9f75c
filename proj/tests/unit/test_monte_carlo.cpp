#include <cmath>
#include <cstdlib>
#include <numbers>

#include <gtest/gtest.h>

#include "magsense/monte_carlo.hpp"

using namespace magsense;

namespace {

SystemParams squeezed() {
  SystemParams p = reference_parameters();
  p.pre_squeeze = {2.0, std::numbers::pi};
  return p;
}

MonteCarloOptions options(std::size_t n, std::uint64_t seed, unsigned threads = 1) {
  MonteCarloOptions o;
  o.n_traj = n;
  o.seed = seed;
  o.threads = threads;
  return o;
}

}  // namespace

TEST(Rng, SplitMixReferenceValue) {
  EXPECT_EQ(detail::splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, PairwiseSumIsExactOnIntegers) {
  const double s = detail::pairwise_sum<double>(0, 1001, [](std::size_t i) { return double(i); });
  EXPECT_EQ(s, 500500.0);
}

TEST(MonteCarlo, SuperpositionMatchesDirectIntegration) {
  const SystemParams p = squeezed();
  const double t_m = 3 / p.kappa_m;
  const auto grid = linear_grid(-p.kappa_m, p.kappa_m, 5);
  const auto e = TrajectoryEnsemble::simulate(p, t_m, grid, options(4, 99));
  const FieldPulse pulse{3e-9, -2e-9, 4.0 / p.gamma_gyro};
  const PulseKick kick = pulse_kick(p, pulse);
  for (Channel c : {Channel::x, Channel::y}) {
    for (std::size_t j = 0; j < e.size(); ++j) {
      std::vector<Complex> sup;
      e.estimator(j, kick, c, sup);
      const auto direct = e.simulate_direct(j, pulse, c, 99);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_LT(std::abs(sup[i] - direct[i]), 1e-9 * std::abs(direct[i])) << j << " " << i;
      }
    }
  }
}

TEST(MonteCarlo, DeterministicAcrossRunsAndThreadCounts) {
  const SystemParams p = squeezed();
  const double t_m = 3 / p.kappa_m;
  const auto grid = linear_grid(-p.kappa_m, p.kappa_m, 3);
  const FieldPulse pulse{1e-9, 0, 0};
  const auto a = TrajectoryEnsemble::simulate(p, t_m, grid, options(64, 5, 1)).spectrum(pulse, Channel::x);
  const auto b = TrajectoryEnsemble::simulate(p, t_m, grid, options(64, 5, 3)).spectrum(pulse, Channel::x);
  const auto c = TrajectoryEnsemble::simulate(p, t_m, grid, options(64, 6, 1)).spectrum(pulse, Channel::x);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.values, c.values);
}

TEST(MonteCarlo, AgreesWithClosedFormAtModerateSize) {
  const SystemParams p = squeezed();
  const double t_m = 3 / p.kappa_m;
  const auto grid = linear_grid(-2 * p.kappa_m, 2 * p.kappa_m, 5);
  const auto e = TrajectoryEnsemble::simulate(p, t_m, grid, options(2000, 2024));
  for (Channel c : {Channel::x, Channel::y}) {
    for (double gbz : {0.0, 3.0}) {
      const FieldPulse pulse{0, 0, gbz / p.gamma_gyro};
      const auto mc = e.spectrum(pulse, c);
      const auto an = transient_noise_psd(p, prepared_state(p).sigma, gbz, t_m, grid, c);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_LT(std::abs(mc.values[i] - an.values[i]), 4.0 * mc.std_error[i])
            << to_string(c) << " gbz=" << gbz << " i=" << i;
      }
    }
  }
}

TEST(MonteCarlo, SignalComponentCarriesPulseArea) {
  const SystemParams p = squeezed();
  const double t_m = 3 / p.kappa_m;
  const auto grid = linear_grid(-p.kappa_m, p.kappa_m, 3);
  const double b = 1e-6;
  const auto e = TrajectoryEnsemble::simulate(p, t_m, grid, options(200, 1));
  const auto sx = e.spectrum({b, 0, 0}, Channel::x);
  const auto sy = e.spectrum({0, b, 0}, Channel::y);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(sx.component("signal")[i] / (b * b / t_m), 1.0, 0.02);
    EXPECT_NEAR(sy.component("signal")[i] / (b * b / t_m), 1.0, 0.02);
    EXPECT_NEAR(sx.component("total")[i], sx.component("signal")[i] + sx.values[i] * 199.0 / 200.0,
                1e-9 * sx.component("total")[i]);
  }
}

TEST(MonteCarlo, DiscretizationBiasShrinksWithStep) {
  const SystemParams p = squeezed();
  const double t_m = 3 / p.kappa_m;
  const double b = 1e-3;
  auto bias = [&](double divisor) {
    MonteCarloOptions o = options(2, 3);
    o.step_divisor = divisor;
    const auto e = TrajectoryEnsemble::simulate(p, t_m, {0.0}, o);
    return std::abs(e.spectrum({b, 0, 0}, Channel::x).component("signal")[0] / (b * b / t_m) - 1.0);
  };
  const double e25 = bias(25), e50 = bias(50), e100 = bias(100);
  EXPECT_LT(e50, e25);
  EXPECT_LT(e100, e50);
  EXPECT_NEAR(e100 / e50, 0.5, 0.15);
}

TEST(MonteCarlo, RejectsUnstableStep) {
  MonteCarloOptions o = options(2, 0);
  o.step_divisor = 0.05;
  const SystemParams p = reference_parameters();
  EXPECT_THROW(TrajectoryEnsemble::simulate(p, 3 / p.kappa_m, {0.0}, o), DomainError);
  o.step_divisor = 50;
  EXPECT_THROW(TrajectoryEnsemble::simulate(p, -1.0, {0.0}, o), DomainError);
}
