#pragma once

#include <string>
#include <string_view>

#include "thermoslip/types.hpp"

namespace thermoslip {

enum class ViscosityKind { Constant, CarreauClamped, BinghamRegularized, PowerClamped };
enum class Monotonicity { Nondecreasing, Nonincreasing };

std::string_view to_string(ViscosityKind kind);
std::string_view to_string(Monotonicity m);

/// Viscosity mu(theta, v, s) with s = |D(v)|. Every kind is clamped to
/// [mu0, mu1], so the bounds hold by construction. Temperature enters through
///   eta(theta) = mu_inf + (eta0 - mu_inf) exp(-beta max(theta, 0)),
/// which is nonincreasing and Lipschitz in theta.
///
///   carreau_clamped:     mu_inf + (eta - mu_inf) (1 + relax^2 s^2)^((r_exp-2)/2)
///   bingham_regularized: eta + tau_y / sqrt(s^2 + epsilon^2)
///   power_clamped:       eta (relax s)^(r_exp-2)
///
/// The velocity slot is accepted but unused by every kind.
struct ViscosityModel {
  ViscosityKind kind = ViscosityKind::Constant;
  double mu_const = 1.0;
  double mu_inf = 1.0;
  double eta0 = 1.0;
  double relax = 1.0;
  double r_exp = 2.0;
  double beta = 0.0;
  double tau_y = 0.0;
  double epsilon = 1e-4;
  double mu0 = 1.0;
  double mu1 = 1.0;
  double lipschitz_temp = 0.0;  ///< declared C_mu
  Monotonicity monotone_in_s = Monotonicity::Nondecreasing;

  static ViscosityModel constant(double mu);
  static ViscosityModel carreau_clamped(double mu_inf, double eta0, double relax, double r_exp,
                                        double beta, double mu0, double mu1);
  static ViscosityModel bingham_regularized(double mu_inf, double eta0, double tau_y,
                                            double epsilon, double beta, double mu0, double mu1);
  static ViscosityModel power_clamped(double mu_inf, double eta0, double relax, double r_exp,
                                      double beta, double mu0, double mu1);

  double eta(double theta) const;
};

/// Smallest C with |mu(t1,.,s) - mu(t2,.,s)| <= C |t1 - t2| implied by the formulas.
double derived_temperature_lipschitz(const ViscosityModel& model);
/// Direction in which s -> mu(., ., s) is monotone for the given parameters.
Monotonicity derived_monotonicity(const ViscosityModel& model);

/// Throws InvalidInput when s < 0.
double mu(const ViscosityModel& model, double theta, const Vec3& v, double s);

/// Dissipation density 2 mu(theta, v, |Dv|) |Dv|^2.
double dissipation(const ViscosityModel& model, double theta, const Vec3& v, const Mat3& dv);

/// K(x) = k_const + k_grad . x, declared bounds [k0, k1].
struct ConductivityModel {
  double k_const = 1.0;
  Vec3 k_grad = Vec3::Zero();
  double k0 = 1.0;
  double k1 = 1.0;

  static ConductivityModel constant(double k);
  double operator()(const Vec3& x) const { return k_const + k_grad.dot(x); }
};

/// r(theta) = r0 - r_amp tanh(theta / r_scale): bounded, Lipschitz, and
/// nonincreasing when r_amp >= 0.
struct SourceModel {
  double r0 = 0.0;
  double r_amp = 0.0;
  double r_scale = 1.0;

  static SourceModel constant(double r);
  double operator()(double theta) const;
  double bound() const { return std::abs(r0) + std::abs(r_amp); }  ///< r1
  double lipschitz() const { return std::abs(r_amp) / r_scale; }   ///< C_r
  bool nonincreasing() const { return r_amp >= 0.0; }
};

struct MaterialModels {
  ViscosityModel viscosity;
  ConductivityModel conductivity;
  SourceModel source;
};

struct SamplingGrid {
  int n_theta = 100;
  int n_s = 100;
  double theta_min = -10.0;
  double theta_max = 10.0;
  double s_max = 1e3;
  int n_space = 11;  ///< per axis, for K(x)
};

struct HypothesisReport {
  int points_sampled = 0;
  double mu_min = 0.0;
  double mu_max = 0.0;
  double bound_violation = 0.0;           ///< max distance outside [mu0, mu1]
  double s_monotonicity_violation = 0.0;  ///< max step against the declared direction
  double temp_increase_violation = 0.0;   ///< max positive theta-slope
  double temp_lipschitz_violation = 0.0;  ///< max |theta-slope| - C_mu
  double max_temp_slope = 0.0;
  double source_bound_violation = 0.0;
  double source_lipschitz_violation = 0.0;
  double source_increase_violation = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
  double conductivity_violation = 0.0;

  bool viscosity_ok() const;
  bool source_ok() const;
  bool conductivity_ok() const;
  bool ok() const { return viscosity_ok() && source_ok() && conductivity_ok(); }
};

/// Samples the models on a tensor grid and reports (never throws on)
/// violations of their declared hypotheses. `box_lo`/`box_hi` bound the
/// region where K is sampled.
HypothesisReport verify_hypotheses(const MaterialModels& models, const SamplingGrid& grid,
                                   const Vec3& box_lo, const Vec3& box_hi);

}  // namespace thermoslip
