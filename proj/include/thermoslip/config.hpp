#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermoslip/types.hpp"

namespace thermoslip {

/// Raised by parse_config with every violation found, not just the first.
class ConfigError : public InvalidInput {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct DomainConfig {
  int dim = 2;
  double extent_x = 1.0;
  double extent_y = 1.0;
  std::string height_kind = "affine";  ///< constant | affine | sampled
  double h0 = 1.0;
  double slope_x = -0.25;
  double slope_y = 0.0;
  std::vector<double> height_samples;
  int sample_nx = 0;
  int sample_ny = 1;
  int nx = 16;
  int ny = 4;  ///< second horizontal axis (dim = 3 only)
  int nz = 8;  ///< vertical subdivisions
};

struct RheologyConfig {
  std::string kind = "carreau_clamped";  ///< constant | carreau_clamped | bingham_regularized | power_clamped
  double mu_const = 1.0;
  double mu_inf = 1.0;
  double eta0 = 2.0;
  double relax = 1.0;
  double r_exp = 2.5;
  double beta = 0.5;
  double tau_y = 0.0;
  double epsilon = 1e-4;
  double mu0 = 0.5;
  double mu1 = 10.0;
  double lipschitz_temp = -1.0;     ///< negative: derive from the formula
  std::string monotone_in_s;        ///< empty: derive
};

struct ConductivityConfig {
  double k_const = 1.0;
  double k_grad_x = 0.0;
  double k_grad_y = 0.0;
  double k_grad_z = 0.0;
  double k0 = 1.0;
  double k1 = 1.0;
};

struct SourceConfig {
  double r0 = 0.5;
  double r_amp = 0.5;
  double r_scale = 1.0;
};

struct FrictionConfig {
  double k = 0.5;
  double s_x = 0.5;
  double s_y = 0.0;
};

struct BcsConfig {
  double flow_rate = 1.0;    ///< Q of the lateral Poiseuille profile
  double theta_omega = 1.0;  ///< heat flux on omega
};

struct FlowSection {
  double tol_picard = 1e-8;
  int max_picard = 200;
  int max_uzawa = 500;
  double tol_comp_rel = 1e-8;
  double rho_scale = 1.0;
  double body_force_x = 0.1;
  double body_force_y = -0.2;
  double body_force_z = 0.0;
  std::string gauge = "mean_zero";       ///< mean_zero | pin_first
  std::string friction_rule = "nodal";   ///< nodal | gauss
  int cell_degree = 4;
  int facet_degree = 3;
};

struct HeatSection {
  double artificial_diffusion = 0.0;
};

struct CouplingSection {
  std::string mode = "gauss_seidel";  ///< gauss_seidel | paper_nested
  double damping = 1.0;
  double tol_outer = 1e-8;
  int max_outer = 100;
  double p_exponent = 4.0;
  double inner_tol = 1e-10;
  int max_inner = 200;
  std::uint64_t seed = 20240601ULL;
  int constant_samples = 1000;
};

struct OutputSection {
  std::string dir = "thermoslip_out";
  bool vtk = true;
};

struct RunConfig {
  DomainConfig domain;
  RheologyConfig rheology;
  ConductivityConfig conductivity;
  SourceConfig source;
  FrictionConfig friction;
  BcsConfig bcs;
  FlowSection flow;
  HeatSection heat;
  CouplingSection coupling;
  OutputSection output;
};

/// Parses INI text: [section] headers, key = value lines, '#' comments.
/// Missing keys keep their defaults. Throws ConfigError listing every problem.
RunConfig parse_config_string(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Bound checks on an assembled config; returns the violations.
std::vector<std::string> validate(const RunConfig& cfg);

/// The effective configuration as INI text (round-trips through parse_config_string).
std::string to_ini(const RunConfig& cfg);

}  // namespace thermoslip
