#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "magsense/reconstruction.hpp"

using namespace magsense;

namespace {

SystemParams prepared() {
  SystemParams p = reference_parameters();
  p.pre_squeeze = {2.0, std::numbers::pi};
  return p;
}

FieldPulse polar(double mag, double phi, double theta) {
  return {mag * std::sin(theta) * std::cos(phi), mag * std::sin(theta) * std::sin(phi),
          mag * std::cos(theta)};
}

double angle_gap(double a, double b) {
  return std::abs(std::remainder(a - b, 2 * std::numbers::pi));
}

}  // namespace

TEST(CalibrationPlan, DefaultSchedule) {
  const SystemParams p = prepared();
  const auto plan = default_calibration_plan(p);
  EXPECT_EQ(plan.configs.size(), 8u);
  EXPECT_DOUBLE_EQ(plan.bias_b * p.gamma_gyro, 5.0);
  EXPECT_EQ(plan.config(MeasurementKind::unknown, Channel::y).label, "unknown-y");
  EXPECT_EQ(plan.config(MeasurementKind::zero_field, Channel::y).label, "zero-field");
  EXPECT_THROW(calibration_plan(p, 0.0, {1, 1}), PlanError);
  EXPECT_THROW(calibration_plan(p, 1.0, {-1, 1}), PlanError);
}

TEST(CalibrationPlan, AppliedPulseAddsUnknown) {
  const SystemParams p = prepared();
  const auto plan = default_calibration_plan(p);
  const FieldPulse u{1, 2, 3};
  const auto plus = applied_pulse(plan.config(MeasurementKind::bias_plus, Channel::x), u);
  EXPECT_DOUBLE_EQ(plus.b0_z, 3 + plan.bias_b);
  const auto cal = applied_pulse(plan.config(MeasurementKind::bias_calibration, Channel::x), u);
  EXPECT_DOUBLE_EQ(cal.b0_x, 0.0);
}

TEST(Reconstruction, NoiselessRoundTrip) {
  const SystemParams p = prepared();
  const auto plan = default_calibration_plan(p);
  const double t_m = 3 / p.kappa_m;
  const auto grid = linear_grid(-2 * p.kappa_m, 2 * p.kappa_m, 21);
  const double mag = 5 / p.gamma_gyro;
  for (double phi : {-2.5, -0.4, 0.3, 1.9, 3.0}) {
    for (double theta : {0.2, 1.0, 1.6, 2.7}) {
      const FieldPulse b = polar(mag, phi, theta);
      const auto r = reconstruct_field(synthesize_measurements(p, plan, b, t_m, grid), plan, p);
      EXPECT_LT(angle_gap(r.phi_hat, phi), 1e-8) << phi << " " << theta;
      EXPECT_NEAR(r.theta_hat, theta, 1e-8);
      EXPECT_NEAR(r.b_hat.b0_x, b.b0_x, 1e-9 * mag);
      EXPECT_NEAR(r.b_hat.b0_y, b.b0_y, 1e-9 * mag);
      EXPECT_NEAR(r.b_hat.b0_z, b.b0_z, 1e-9 * mag);
    }
  }
}

TEST(Reconstruction, MissingMeasurementIsPlanError) {
  const SystemParams p = prepared();
  const auto plan = default_calibration_plan(p);
  const auto grid = linear_grid(-p.kappa_m, p.kappa_m, 11);
  auto set = synthesize_measurements(p, plan, polar(1e-10, 0.5, 1.0), 3 / p.kappa_m, grid);
  std::erase_if(set.items, [](const Measurement& m) { return m.label == "reference-y"; });
  EXPECT_THROW(reconstruct_field(set, plan, p), PlanError);
}

TEST(Reconstruction, InconsistentSpectraAreRejected) {
  const SystemParams p = prepared();
  const auto plan = default_calibration_plan(p);
  const auto grid = linear_grid(-p.kappa_m, p.kappa_m, 11);
  auto set = synthesize_measurements(p, plan, polar(1e-10, 0.5, 1.0), 3 / p.kappa_m, grid);
  // Unknown-x pushed uniformly below the zero-field level.
  double shift = 0.0;
  for (const auto& m : set.items) {
    if (m.label == "unknown-x") shift = 2.0 * m.spectrum.values[5];
  }
  for (auto& m : set.items) {
    if (m.label == "unknown-x") {
      for (auto& v : m.spectrum.values) v -= shift;
    }
  }
  EXPECT_THROW(reconstruct_field(set, plan, p), EstimationError);
  auto set2 = synthesize_measurements(p, plan, polar(1e-10, 0.5, 1.0), 3 / p.kappa_m, grid);
  set2.items[3].spectrum.omega = linear_grid(-p.kappa_m, p.kappa_m * 1.1, 11);
  EXPECT_THROW(reconstruct_field(set2, plan, p), PlanError);
}

TEST(Reconstruction, MonteCarloRoundTripSmallEnsemble) {
  const SystemParams p = prepared();
  const auto plan = default_calibration_plan(p);
  const double t_m = 3 / p.kappa_m;
  const auto grid = linear_grid(-2 * p.kappa_m, 2 * p.kappa_m, 21);
  MonteCarloOptions o;
  o.n_traj = 1000;
  o.seed = 17;
  const MonteCarloMeasurementBank bank(p, plan, t_m, grid, o);
  const double mag = 5 / p.gamma_gyro;
  for (auto [phi, theta] : {std::pair{0.7, 1.1}, std::pair{-2.0, 2.3}}) {
    const auto r = reconstruct_field(bank.measure(polar(mag, phi, theta)), plan, p);
    EXPECT_LT(angle_gap(r.phi_hat, phi) * 180 / std::numbers::pi, 8.0);
    EXPECT_LT(std::abs(r.theta_hat - theta) * 180 / std::numbers::pi, 8.0);
  }
}
