#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "thermoslip/fem.hpp"
#include "thermoslip/rheology.hpp"

namespace thermoslip {

/// Tresca data on omega: threshold k >= 0 and the surface velocity s
/// (tangential components 0..dim-2; the bottom is flat with n = -e_dim).
struct FrictionData {
  double k = 0.0;
  ScalarFunction k_field;  ///< overrides k when set
  Vec3 s = Vec3::Zero();

  double k_at(const Vec3& x) const { return k_field ? k_field(x) : k; }
};

/// Normalized friction traction at each omega quadrature point; sigma_t = -k lambda.
struct FrictionState {
  std::vector<Vec3> lambda;
  double max_norm() const;
};

enum class PressureGauge { MeanZero, PinFirst };

/// Where the friction multiplier lives. Nodal places one point on every
/// velocity trace node of omega (Simpson weights on segments, equal weights
/// on triangles); Gauss uses the facet Gauss rule.
enum class FrictionRule { Nodal, Gauss };

/// Points and weights used for j and for the multiplier.
std::vector<BoundaryQuadPoint> friction_points(const Space& velocity, FrictionRule rule,
                                               int facet_degree);

struct FlowConfig {
  double tol_picard = 1e-8;
  int max_picard = 200;
  int max_uzawa = 500;
  double tol_comp_rel = 1e-8;
  double tol_mom = 1e-8;
  double rho_scale = 1.0;
  double p_exponent = 4.0;
  PressureGauge gauge = PressureGauge::MeanZero;
  FrictionRule friction_rule = FrictionRule::Nodal;
};

struct FlowProblem {
  MaterialModels models;
  FrictionData friction;
  VectorFunction body_force;  ///< empty means f = 0
  VectorFunction lateral;     ///< g on GAMMAL; empty means g = 0
};

/// Both sides of the a priori inequality
///   mu0 |v|^2 <= 2(mu0+mu1)|v||G| + beta |f||v| + 2 mu1 |G|^2 + |f||G|_{1,q} + j(G)
/// with |.| = |.|_{1,2}, and the root C of the corresponding quadratic.
struct BoundReport {
  double norm_v = 0.0;
  double norm_G = 0.0;
  double norm_G_q = 0.0;
  double norm_f = 0.0;
  double beta_emb = 0.0;
  double j_G = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double C_bound = 0.0;
  bool ok() const { return slack >= -1e-8 * std::max(rhs, 1e-300); }
};

struct FlowReport {
  bool converged = false;
  std::string message;
  int picard_iters = 0;
  int uzawa_iters = 0;
  std::vector<double> picard_history;
  std::vector<double> uzawa_history;
  double complementarity = 0.0;
  double tol_comp = 0.0;
  double momentum_residual = 0.0;
  double pressure_mean = 0.0;
  double max_lambda = 0.0;
  double uzawa_step = 0.0;
  BoundReport apriori;
};

struct FlowResult {
  Field v;
  Field pi;
  FrictionState lam;
  FlowReport report;
};

struct TractionReport {
  std::vector<Vec3> sigma_t;
  std::vector<double> sigma_n;
  double max_overshoot = 0.0;         ///< max(|sigma_t| - k)
  double fraction_within = 1.0;       ///< share of points with |sigma_t| <= 1.05 k
};

/// lambda' = P(lambda + rho (v_t - s)) with P the projection on the unit ball.
FrictionState uzawa_update(const FrictionState& lam, const std::vector<Vec3>& v_t, const Vec3& s,
                           const std::vector<double>& rho);

/// sum_q w_q |(v_t - s).(-k lambda) + k |v_t - s||
double complementarity_residual(const std::vector<Vec3>& v_t, const FrictionState& lam,
                                const Vec3& s, const std::vector<double>& k_w);

/// <A(u), phi> = int 2 mu(theta, u, |D(u)|) D(u) : D(phi).
double operator_pairing(const Field& theta, const Field& u, const Field& phi,
                        const ViscosityModel& model, int degree = 4);

/// Mixed solver for the Tresca problem with the temperature frozen. The
/// object holds only immutable precomputed data; solve() may be called from
/// several threads at once.
class FlowSolver {
 public:
  FlowSolver(const Discretization& disc, FlowProblem problem, FlowConfig cfg = {});

  FlowResult solve(const Field& theta, const FrictionState* warm_start = nullptr) const;
  /// Reference solve with v_t = s imposed strongly on omega and no friction.
  FlowResult solve_stick(const Field& theta) const;

  const Discretization& discretization() const { return disc_; }
  const FlowProblem& problem() const { return problem_; }
  const FlowConfig& config() const { return cfg_; }
  const Field& lifting() const { return lifting_; }
  const std::vector<BoundaryQuadPoint>& omega_points() const { return omega_; }
  int num_omega_points() const { return static_cast<int>(omega_.size()); }

  std::vector<Vec3> tangential_trace(const Field& v) const;
  /// j(v) = sum_q w_q k_q |v_t - s|
  double friction_functional(const Field& v) const;
  double complementarity(const Field& v, const FrictionState& lam) const;
  double tol_comp(double free_slip_scale) const;
  TractionReport traction(const Field& v, const Field& pi, const Field& theta) const;
  BoundReport apriori_check(const Field& v, double p) const;
  /// min over free dofs i and signs of
  ///   [a(v, +-e_i) - (pi, div +-e_i) - (f, +-e_i) + j(v +- eps e_i) - j(v)] / eps,
  /// normalized by the load scale. Nonnegative up to round-off at a solution.
  double vi_residual(const FlowResult& result, const Field& theta) const;
  /// |f|: sup|f| h_max |Omega|^(1/p), a bound for the pairing (f, v) <= |f| |v|_{1,q}.
  double body_force_norm(double p) const;

 private:
  struct Saddle;
  FlowResult run(const Field& theta, const DirichletSet& bc, bool with_friction,
                 const ViscosityModel& model, const FrictionState* warm) const;

  Discretization disc_;
  FlowProblem problem_;
  FlowConfig cfg_;
  SparseMatrix div_;          ///< n_p x n_v
  Vector pressure_weights_;   ///< int q_i
  SparseMatrix trace_;        ///< (n_q (d-1)) x n_v tangential trace at omega points
  std::vector<BoundaryQuadPoint> omega_;
  std::vector<double> k_w_;   ///< w_q k_q
  Vector body_load_;
  DirichletSet bc_;
  Field lifting_;
  std::vector<int> trace_dofs_;
};

}  // namespace thermoslip
