#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thermoslip/heat_solver.hpp"

using namespace thermoslip;

namespace {

Discretization slab(int n, int m, double slope = 0.0) {
  DomainSpec spec;
  spec.height = HeightFunction::affine(1.0, {slope, 0.0});
  const int res[2] = {n, m};
  return Discretization::build(std::make_shared<const Mesh>(build_slab_mesh(spec, res)));
}

MaterialModels quiet_models(double k = 1.0) {
  MaterialModels m;
  m.viscosity = ViscosityModel::constant(1.0);
  m.conductivity = ConductivityModel::constant(k);
  return m;
}

Field shear_flow(const Discretization& disc) {
  return interpolate(disc.velocity, [](const Vec3& x) { return Vec3(1.0 - x[1] * x[1], 0.1 * x[0], 0.0); });
}

Field random_field(const SpacePtr& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Field f = Field::zeros(space);
  for (int i = 0; i < f.values.size(); ++i) f.values[i] = uni(rng);
  return f;
}

}  // namespace

TEST(AssembleB, NoConvectionGivesWeightedStiffness) {
  const Discretization disc = slab(4, 3, -0.25);
  MaterialModels m = quiet_models();
  m.conductivity.k_const = 1.0;
  m.conductivity.k_grad = Vec3(0.5, 0.0, 0.0);
  m.conductivity.k1 = 1.5;
  const HeatSolver hs(disc, m, {});
  const SparseMatrix B = hs.assemble_B(Field::zeros(disc.velocity));
  const SparseMatrix K = assemble_stiffness(*disc.temperature, [](const Vec3& x) { return 1.0 + 0.5 * x[0]; });
  EXPECT_LT((B - K).norm(), 1e-14);
  EXPECT_LT((B - SparseMatrix(B.transpose())).norm(), 1e-14);
}

TEST(AssembleB, ConvectionIsAntisymmetricAndEnergyNeutral) {
  const Discretization disc = slab(5, 3, -0.25);
  const HeatSolver hs(disc, quiet_models(2.0), {});
  const Field v = shear_flow(disc);
  const SparseMatrix C = hs.assemble_convection(v);
  const SparseMatrix S = SparseMatrix(C.transpose()) + C;
  double smax = 0.0, cmax = 0.0;
  for (int k = 0; k < S.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(S, k); it; ++it) smax = std::max(smax, std::abs(it.value()));
  }
  for (int k = 0; k < C.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(C, k); it; ++it) cmax = std::max(cmax, std::abs(it.value()));
  }
  EXPECT_GT(cmax, 0.0);
  EXPECT_LE(smax, 1e-12 * cmax);
  const SparseMatrix B = hs.assemble_B(v);
  for (int t = 0; t < 10; ++t) {
    const Field theta = random_field(disc.temperature, 100 + t);
    const double grad2 = std::pow(norm_w1p(theta, 2.0), 2);
    EXPECT_NEAR(theta.values.dot(B * theta.values), 2.0 * grad2, 1e-12 * grad2);
  }
}

TEST(AssembleL, ZeroAndConstantData) {
  const Discretization disc = slab(3, 2);
  const Field zero_v = Field::zeros(disc.velocity);
  const Field eta = Field::zeros(disc.temperature);
  const HeatSolver none(disc, quiet_models(), {});
  EXPECT_EQ(none.assemble_L(eta, zero_v).lpNorm<Eigen::Infinity>(), 0.0);
  MaterialModels m = quiet_models();
  m.source = SourceModel::constant(0.7);
  const HeatSolver src(disc, m, {});
  EXPECT_LT((src.assemble_L(eta, zero_v) - 0.7 * integrate_basis(*disc.temperature)).lpNorm<Eigen::Infinity>(), 1e-15);
}

TEST(AssembleL, DissipationMatchesRefinedQuadrature) {
  const Discretization disc = slab(4, 4);
  const double mu_bar = 1.8;
  MaterialModels m = quiet_models();
  m.viscosity = ViscosityModel::constant(mu_bar);
  const HeatSolver hs(disc, m, {});
  const Field v = interpolate(disc.velocity, [](const Vec3& x) { return Vec3(1.0 - x[1] * x[1], 0.0, 0.0); });
  const Vector L = hs.assemble_L(Field::zeros(disc.temperature), v);
  // 2 mu |D|^2 = 4 mu y^2 against the hat functions (barycentric coordinates).
  const Mesh& mesh = *disc.mesh;
  const SimplexRule rule = simplex_rule(2, 8);
  Vector ref = Vector::Zero(L.size());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec3 x = mesh.point(c, rule.points[q]);
      for (int a = 0; a < 3; ++a) {
        ref[mesh.cells[c][a]] += rule.weights[q] * mesh.cell_volume[c] * 4.0 * mu_bar * x[1] * x[1] * rule.points[q][a];
      }
    }
  }
  EXPECT_LT((L - ref).lpNorm<Eigen::Infinity>(), 1e-8);
  for (int i = 0; i < L.size(); ++i) EXPECT_GE(L[i], 0.0);
}

TEST(HeatSolve, ZeroDataGivesZero) {
  const Discretization disc = slab(3, 3);
  const HeatSolver hs(disc, quiet_models(), {});
  const HeatResult r = hs.solve(Field::zeros(disc.temperature), Field::zeros(disc.velocity));
  EXPECT_EQ(r.theta.values.lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_EQ(r.report.energy_balance, 0.0);
  MaterialModels inviscid = quiet_models();
  inviscid.viscosity = ViscosityModel::constant(0.0);
  const HeatResult convected = HeatSolver(disc, inviscid, {}).solve(Field::zeros(disc.temperature), shear_flow(disc));
  EXPECT_EQ(convected.theta.values.lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_GE(r.report.coercivity_gap, -1e-12);
}

TEST(HeatSolve, HeatingFromBelowStaysNonnegative) {
  const Discretization disc = slab(16, 8, -0.25);
  HeatBCs bcs;
  bcs.theta_omega = 1.0;
  const HeatSolver hs(disc, quiet_models(), bcs);
  const Field v = interpolate(disc.velocity, [](const Vec3&) { return Vec3(1.0, 0.0, 0.0); });
  const HeatResult r = hs.solve(Field::zeros(disc.temperature), v);
  EXPECT_GE(r.theta.values.minCoeff(), -1e-10);
  EXPECT_GT(r.theta.values.maxCoeff(), 0.0);
}

TEST(HeatSolve, SuperpositionInData) {
  const Discretization disc = slab(6, 4, -0.25);
  const Field v = shear_flow(disc);
  const Field eta = random_field(disc.temperature, 9);
  auto solve = [&](double r0, double flux) {
    MaterialModels m = quiet_models();
    m.viscosity = ViscosityModel::constant(0.0);  // isolate the (r, flux) data
    m.viscosity.mu0 = 0.0;
    m.source = SourceModel::constant(r0);
    HeatBCs b;
    b.theta_omega = flux;
    return HeatSolver(disc, m, b).solve(eta, v).theta.values;
  };
  const Vector a = solve(0.4, 0.0), b = solve(0.0, 1.3), ab = solve(0.4, 1.3);
  EXPECT_LT((ab - a - b).lpNorm<Eigen::Infinity>(), 1e-10 * ab.lpNorm<Eigen::Infinity>());
}

TEST(EnergyBalance, GalerkinOrthogonalityAndSensitivity) {
  const Discretization disc = slab(8, 4, -0.25);
  MaterialModels m = quiet_models();
  m.viscosity = ViscosityModel::carreau_clamped(1.0, 2.0, 1.0, 2.5, 0.5, 0.5, 10.0);
  m.source.r0 = 0.5;
  m.source.r_amp = 0.5;
  HeatBCs bcs;
  bcs.theta_omega = 1.0;
  const HeatSolver hs(disc, m, bcs);
  const Field v = shear_flow(disc);
  const Field eta = Field::zeros(disc.temperature);
  const HeatResult r = hs.solve(eta, v);
  EXPECT_LE(std::abs(r.report.energy_balance), 1e-9 * r.report.energy_scale);
  const auto [bal, scale] = hs.energy_balance(r.theta, eta, v);
  EXPECT_LE(std::abs(bal), 1e-9 * scale);
  EXPECT_NEAR(scale, r.report.energy_scale, 1e-12 * scale);

  Field noisy = r.theta;
  const DirichletSet& bc = hs.constraints();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vector noise = Vector::Zero(noisy.values.size());
  for (int i = 0; i < noise.size(); ++i) noise[i] = bc.constrained(i) ? 0.0 : uni(rng);
  noisy.values = r.theta.values + 1e-3 * noise;
  const double b1 = std::abs(hs.energy_balance(noisy, eta, v).first);
  noisy.values = r.theta.values + 2e-3 * noise;
  const double b2 = std::abs(hs.energy_balance(noisy, eta, v).first);
  EXPECT_GT(b1, 1e-9 * scale);
  EXPECT_NEAR(b2 / b1, 2.0, 1e-3);

  const HeatSolver zero(disc, quiet_models(), {});
  EXPECT_EQ(zero.energy_balance(Field::zeros(disc.temperature), eta, Field::zeros(disc.velocity)).first, 0.0);
}

TEST(HeatSolver, RejectsBadParameters) {
  const Discretization disc = slab(2, 2);
  EXPECT_THROW(HeatSolver(disc, quiet_models(0.0), {}), InvalidInput);
  HeatOptions opts;
  opts.artificial_diffusion = -1.0;
  EXPECT_THROW(HeatSolver(disc, quiet_models(), {}, opts), InvalidInput);
}

TEST(HeatSolver, ArtificialDiffusionIsAddedToK) {
  const Discretization disc = slab(3, 3);
  HeatOptions opts;
  opts.artificial_diffusion = 0.25;
  const HeatSolver hs(disc, quiet_models(), {}, opts);
  const SparseMatrix K = assemble_stiffness(*disc.temperature);
  EXPECT_LT((hs.diffusion() - 1.25 * K).norm(), 1e-13);
  EXPECT_DOUBLE_EQ(hs.solve(Field::zeros(disc.temperature), Field::zeros(disc.velocity)).report.added_diffusion, 0.25);
}
