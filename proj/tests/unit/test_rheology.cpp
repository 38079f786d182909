#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thermoslip/rheology.hpp"

using namespace thermoslip;

namespace {

const Vec3 kZero = Vec3::Zero();

MaterialModels with_viscosity(ViscosityModel vm) {
  MaterialModels m;
  m.viscosity = std::move(vm);
  m.conductivity = ConductivityModel::constant(1.0);
  m.source.r0 = 0.5;
  m.source.r_amp = 0.5;
  return m;
}

HypothesisReport sweep(const MaterialModels& m) {
  SamplingGrid grid;  // 100 x 100 points over theta in [-10, 10], s in [0, 1e3]
  return verify_hypotheses(m, grid, Vec3::Zero(), Vec3(1.0, 1.0, 0.0));
}

}  // namespace

TEST(Viscosity, ConstantModel) {
  const ViscosityModel m = ViscosityModel::constant(3.0);
  EXPECT_DOUBLE_EQ(mu(m, -4.0, kZero, 0.0), 3.0);
  EXPECT_DOUBLE_EQ(mu(m, 7.0, Vec3(1, 2, 3), 55.0), 3.0);
}

TEST(Viscosity, CarreauAtRestEqualsEta0) {
  const ViscosityModel m = ViscosityModel::carreau_clamped(1.0, 2.0, 1.0, 2.5, 0.5, 0.5, 10.0);
  EXPECT_DOUBLE_EQ(mu(m, 0.0, kZero, 0.0), 2.0);
  // Hand evaluation: eta(1) = 1 + exp(-0.5), factor (1 + 4)^(1/4).
  const double expect = 1.0 + std::exp(-0.5) * std::pow(5.0, 0.25);
  EXPECT_NEAR(mu(m, 1.0, kZero, 2.0), expect, 1e-14);
  // Negative temperatures use eta(0).
  EXPECT_DOUBLE_EQ(mu(m, -3.0, kZero, 0.0), 2.0);
}

TEST(Viscosity, ShearThinningApproachesMuInfFromAbove) {
  const ViscosityModel m = ViscosityModel::carreau_clamped(1.0, 2.0, 1.0, 1.5, 0.0, 0.5, 10.0);
  double prev = mu(m, 0.0, kZero, 0.0);
  for (double s : {1.0, 10.0, 1e2, 1e4, 1e8}) {
    const double value = mu(m, 0.0, kZero, s);
    EXPECT_LE(value, prev);
    EXPECT_GT(value, 1.0);
    prev = value;
  }
  EXPECT_NEAR(prev, 1.0, 1e-3);
  const ViscosityModel floored = ViscosityModel::carreau_clamped(0.1, 2.0, 1.0, 1.5, 0.0, 0.5, 10.0);
  EXPECT_DOUBLE_EQ(mu(floored, 0.0, kZero, 1e8), 0.5);
}

TEST(Viscosity, BinghamFormula) {
  const ViscosityModel m = ViscosityModel::bingham_regularized(1.0, 2.0, 0.1, 1e-4, 0.0, 0.5, 10.0);
  EXPECT_NEAR(mu(m, 0.0, kZero, 1.0), 2.0 + 0.1 / std::sqrt(1.0 + 1e-8), 1e-14);
  EXPECT_DOUBLE_EQ(mu(m, 0.0, kZero, 0.0), 10.0);  // clamped at mu1
  EXPECT_EQ(m.monotone_in_s, Monotonicity::Nonincreasing);
}

TEST(Viscosity, NegativeShearRejected) {
  const ViscosityModel m = ViscosityModel::constant(1.0);
  EXPECT_THROW(mu(m, 0.0, kZero, -1e-3), InvalidInput);
}

TEST(Dissipation, Values) {
  const ViscosityModel m = ViscosityModel::constant(1.5);
  EXPECT_DOUBLE_EQ(dissipation(m, 0.0, kZero, Mat3::Zero()), 0.0);
  Mat3 d = Mat3::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  EXPECT_NEAR(dissipation(m, 0.0, kZero, d), 4.0 * 1.5, 1e-14);
}

TEST(Dissipation, RecomposesFromMu) {
  const ViscosityModel m = ViscosityModel::carreau_clamped(1.0, 2.0, 0.7, 2.8, 0.3, 0.5, 10.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    Mat3 g;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) g(a, b) = uni(rng);
    }
    const Mat3 d = 0.5 * (g + g.transpose());
    const double t = uni(rng);
    double s2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) s2 += d(a, b) * d(a, b);
    }
    const double expect = 2.0 * mu(m, t, kZero, std::sqrt(s2)) * s2;
    EXPECT_NEAR(dissipation(m, t, kZero, d), expect, 1e-12 * expect);
    EXPECT_GE(dissipation(m, t, kZero, d), 0.0);
  }
}

TEST(Hypotheses, ConstantModelClean) {
  const HypothesisReport r = sweep(with_viscosity(ViscosityModel::constant(2.0)));
  EXPECT_EQ(r.points_sampled, 10000);
  EXPECT_TRUE(r.ok());
}

TEST(Hypotheses, ShearThickeningCarreauClean) {
  const HypothesisReport r = sweep(with_viscosity(ViscosityModel::carreau_clamped(1.0, 2.0, 1.0, 2.5, 0.5, 0.5, 10.0)));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.s_monotonicity_violation, 0.0);
  EXPECT_GE(r.mu_min, 0.5);
  EXPECT_LE(r.mu_max, 10.0);
  EXPECT_LE(r.max_temp_slope, 4.5 + 1e-9);
}

TEST(Hypotheses, BinghamClean) {
  EXPECT_TRUE(sweep(with_viscosity(ViscosityModel::bingham_regularized(1.0, 2.0, 0.1, 1e-4, 0.5, 0.5, 10.0))).ok());
}

TEST(Hypotheses, MismatchedMonotonicityReported) {
  ViscosityModel m = ViscosityModel::carreau_clamped(1.0, 2.0, 1.0, 1.5, 0.5, 0.5, 10.0);
  m.monotone_in_s = Monotonicity::Nondecreasing;
  const HypothesisReport r = sweep(with_viscosity(m));
  EXPECT_GT(r.s_monotonicity_violation, 0.0);
  EXPECT_FALSE(r.viscosity_ok());
}

TEST(Hypotheses, UnderstatedLipschitzReported) {
  ViscosityModel m = ViscosityModel::carreau_clamped(1.0, 2.0, 1.0, 2.5, 0.5, 0.5, 10.0);
  m.lipschitz_temp = 0.1;
  EXPECT_GT(sweep(with_viscosity(m)).temp_lipschitz_violation, 0.0);
}

TEST(Hypotheses, SourceAndConductivityChecks) {
  MaterialModels m = with_viscosity(ViscosityModel::constant(1.0));
  m.source.r_amp = -0.5;  // increasing in theta
  EXPECT_GT(sweep(m).source_increase_violation, 0.0);
  m = with_viscosity(ViscosityModel::constant(1.0));
  m.conductivity.k_grad = Vec3(0.5, 0.0, 0.0);  // K reaches 1.5 > k1
  const HypothesisReport r = sweep(m);
  EXPECT_GT(r.conductivity_violation, 0.0);
  EXPECT_NEAR(r.k_max, 1.5, 1e-14);
}

TEST(Source, BoundsAndLipschitz) {
  SourceModel s;
  s.r0 = 0.3;
  s.r_amp = 0.7;
  s.r_scale = 2.0;
  EXPECT_DOUBLE_EQ(s.bound(), 1.0);
  EXPECT_DOUBLE_EQ(s.lipschitz(), 0.35);
  EXPECT_TRUE(s.nonincreasing());
  EXPECT_DOUBLE_EQ(s(0.0), 0.3);
  for (double t = -20.0; t <= 20.0; t += 0.5) EXPECT_LE(std::abs(s(t)), s.bound());
}

TEST(TemperatureDependence, DerivedLipschitzBoundsSlope) {
  const ViscosityModel m = ViscosityModel::power_clamped(1.0, 3.0, 1.0, 2.4, 0.8, 0.5, 10.0);
  const double h = 1e-6;
  for (double s : {0.0, 0.5, 3.0, 40.0}) {
    for (double t = 0.0; t < 5.0; t += 0.25) {
      const double slope = (mu(m, t + h, kZero, s) - mu(m, t, kZero, s)) / h;
      EXPECT_LE(slope, 1e-6);
      EXPECT_LE(std::abs(slope), m.lipschitz_temp + 1e-6);
    }
  }
}
