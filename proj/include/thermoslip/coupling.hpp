#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermoslip/flow_solver.hpp"
#include "thermoslip/heat_solver.hpp"

namespace thermoslip {

enum class CouplingMode { GaussSeidel, PaperNested };

std::string_view to_string(CouplingMode mode);

struct CouplingConfig {
  CouplingMode mode = CouplingMode::GaussSeidel;
  double damping = 1.0;
  double tol_outer = 1e-8;
  int max_outer = 100;
  double p_exponent = 4.0;
  double inner_tol = 1e-10;
  int max_inner = 200;
  bool auto_damping = true;
};

/// Discrete embedding constants on the temperature space (fields vanishing on
/// GAMMA1 and GAMMAL).
struct EmbeddingConstants {
  double poincare = 0.0;     ///< C_P: |u|_2 <= C_P |grad u|_2
  double trace = 0.0;        ///< C'': |u|_{L2(omega)} <= C'' |grad u|_2
  double l4_sampled = 0.0;   ///< max of |u|_4 / |grad u|_2 over random fields (lower bound)
  double l4_analytic = 0.0;  ///< Ladyzhenskaya bound after even reflection across omega
  double l4 = 0.0;           ///< C' = max(sampled, analytic)
  int samples = 0;
  std::uint64_t seed = 0;
};

EmbeddingConstants estimate_constants(const Discretization& disc, int samples = 1000,
                                      std::uint64_t seed = 20240601ULL);

struct LipschitzEstimate {
  double L_hat = 0.0;
  double C_star = 0.0;
  double norm_D_p = 0.0;
  double volume_factor = 0.0;  ///< |Omega|^((p-4)/(2p))
  double flux_l2 = 0.0;        ///< |theta_omega|_{L2(omega)}
};

/// L = k0^-1 (2 |Omega|^((p-4)/(2p)) C_mu C'^2 |D v|_p^2 + C_P^2 C_r)
/// C* = k0^-1 (2 |Omega|^((p-4)/(2p)) mu1 C_P |D v|_p^2 + C'' |theta_omega|_{L2(omega)}
///             + C_P |Omega|^(1/2) r1)
LipschitzEstimate lipschitz_estimate(const Field& v, const MaterialModels& models, const HeatBCs& bcs,
                                     const EmbeddingConstants& constants, double p);

/// T(eta) for a fixed velocity: one linearized heat solve.
Field map_T(const HeatSolver& heat, const Field& eta, const Field& v);

struct OuterRecord {
  int iter = 0;
  double delta = 0.0;  ///< |theta^{k+1} - theta^k|_{1,2}
  double ratio = 0.0;  ///< delta_k / delta_{k-1}, 0 on the first iteration
  double damping = 1.0;
  int picard_iters = 0;
  int uzawa_iters = 0;
  bool flow_converged = false;
  double complementarity = 0.0;
  double tol_comp = 0.0;
  double bound_slack = 0.0;
  double bound_rhs = 0.0;
  double C_bound = 0.0;
  double norm_v = 0.0;
  double heat_balance = 0.0;  ///< |energy balance| / scale
  int inner_iters = 0;
  double inner_max_ratio = 0.0;
};

struct CoupledState {
  Field v;
  Field pi;
  Field theta;
  FrictionState lam;
  std::vector<OuterRecord> history;
  std::vector<double> inner_ratios;
  FlowReport flow;
  HeatReport heat;
  bool converged = false;
  std::string message;
};

/// Damped fixed-point iteration on theta. Non-convergence is reported in the
/// returned state, not thrown.
CoupledState run_coupled(const FlowSolver& flow, const HeatSolver& heat, const CouplingConfig& cfg,
                         const Field& theta0);

}  // namespace thermoslip
