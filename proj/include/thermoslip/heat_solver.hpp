#pragma once

#include "thermoslip/fem.hpp"
#include "thermoslip/rheology.hpp"

namespace thermoslip {

/// Flux K dtheta/dn = theta_omega on omega; theta = 0 on GAMMA1 and GAMMAL.
struct HeatBCs {
  double theta_omega = 0.0;
  ScalarFunction theta_omega_field;  ///< overrides the constant when set

  double flux_at(const Vec3& x) const { return theta_omega_field ? theta_omega_field(x) : theta_omega; }
};

struct HeatOptions {
  double artificial_diffusion = 0.0;  ///< added to K when positive
  ScalarFunction extra_source;        ///< manufactured-solution source, empty by default
};

struct HeatReport {
  double coercivity_gap = 0.0;   ///< min over probes of theta^T B theta / |theta|_{1,2}^2 - k0
  double energy_balance = 0.0;   ///< sum over free nodes of (B theta - L)_i
  double energy_scale = 0.0;     ///< sum over free nodes of |L_i|
  double linear_residual = 0.0;  ///< relative residual of the reduced solve
  double added_diffusion = 0.0;
  int free_dofs = 0;
};

struct HeatResult {
  Field theta;
  HeatReport report;
};

/// Linearized heat problem B(theta, psi) = L(eta, psi) with
///   B = int K grad theta . grad psi + (1/2) int (psi v.grad theta - theta v.grad psi),
///   L = int 2 mu(eta, v, |D v|) |D v|^2 psi + int r(eta) psi + int_omega theta_omega psi.
/// Immutable after construction; solve() is reentrant.
class HeatSolver {
 public:
  HeatSolver(const Discretization& disc, MaterialModels models, HeatBCs bcs, HeatOptions opts = {});

  /// Diffusion part int K grad theta . grad psi (symmetric).
  const SparseMatrix& diffusion() const { return diffusion_; }
  /// Skew convection block; exactly antisymmetric.
  SparseMatrix assemble_convection(const Field& v) const;
  SparseMatrix assemble_B(const Field& v) const;
  Vector assemble_L(const Field& eta, const Field& v) const;
  HeatResult solve(const Field& eta, const Field& v) const;
  /// (sum of Galerkin residuals over free nodes, sum of |L_i| over free nodes).
  std::pair<double, double> energy_balance(const Field& theta, const Field& eta, const Field& v) const;

  const DirichletSet& constraints() const { return bc_; }
  const Discretization& discretization() const { return disc_; }
  const MaterialModels& models() const { return models_; }
  const HeatBCs& bcs() const { return bcs_; }

 private:
  Discretization disc_;
  MaterialModels models_;
  HeatBCs bcs_;
  HeatOptions opts_;
  DirichletSet bc_;
  SparseMatrix diffusion_;
  Vector flux_load_;
};

}  // namespace thermoslip
