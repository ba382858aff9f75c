#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "magsense/sensing.hpp"

using namespace magsense;

TEST(ChannelAmplitude, FollowsPulsePhase) {
  SystemParams p = reference_parameters();
  const FieldPulse b{2e-9, 5e-9, 0};
  EXPECT_DOUBLE_EQ(channel_amplitude(p, b, Channel::x), 2e-9);
  EXPECT_DOUBLE_EQ(channel_amplitude(p, b, Channel::y), 5e-9);
  p.pulse_phase = std::numbers::pi / 2;
  EXPECT_NEAR(channel_amplitude(p, b, Channel::x), -5e-9, 1e-24);
  EXPECT_NEAR(channel_amplitude(p, b, Channel::y), 2e-9, 1e-24);
}

TEST(TransientSnr, IsAmplitudeOverRootNoise) {
  const SystemParams p = reference_parameters();
  const double t_m = 5 / p.kappa_m;
  const auto grid = linear_grid(-2 * p.kappa_m, 2 * p.kappa_m, 21);
  const FieldPulse b{3e-9, 0, 0};
  const SnrSeries s = transient_snr(p, b, t_m, grid, Channel::x);
  const auto n = transient_noise_psd(p, prepared_state(p).sigma, 0.0, t_m, grid, Channel::x);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(s.ratio[i], 3e-9 / std::sqrt(n.values[i]), 1e-12 * s.ratio[i]);
  }
}

TEST(TransientSnr, ScalesLinearlyWithPulse) {
  const SystemParams p = reference_parameters();
  const auto grid = linear_grid(-p.kappa_m, p.kappa_m, 5);
  const auto a = transient_snr(p, FieldPulse{1e-9, 0, 0}, 3 / p.kappa_m, grid, Channel::x);
  const auto b = transient_snr(p, FieldPulse{4e-9, 0, 0}, 3 / p.kappa_m, grid, Channel::x);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(b.ratio[i], 4 * a.ratio[i], 1e-12 * b.ratio[i]);
}

TEST(StationarySnr, UsesStationaryNoise) {
  const SystemParams p = reference_parameters();
  const auto grid = linear_grid(-p.kappa_m, p.kappa_m, 11);
  const auto s = stationary_snr(p, 1e-24, grid, Channel::y);
  const auto n = nsphere_psd(p, grid, Channel::y, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(s.ratio[i] * s.ratio[i] * n.values[i], 1e-24, 1e-36);
  }
  EXPECT_EQ(s.noise_components.count("signal"), 0u);
  EXPECT_THROW(stationary_snr(p, -1.0, grid, Channel::x), DomainError);
}

TEST(StationarySnr, SqueezedBathRaisesRatioAtResonance) {
  SystemParams p = reference_parameters();
  const std::vector<double> w0{0.0};
  const double r0 = stationary_snr(p, 1e-24, w0, Channel::x).ratio[0];
  p.bath_squeeze = {1.0, std::numbers::pi};
  p.g_am = cancellation_coupling(p.kappa_a, p.kappa_m);
  const double r1 = stationary_snr(p, 1e-24, w0, Channel::x).ratio[0];
  EXPECT_GT(r1, r0);
}
