#include "thermoslip/scenario.hpp"

namespace thermoslip {

ViscosityModel make_viscosity(const RheologyConfig& r) {
  ViscosityModel m;
  if (r.kind == "constant") {
    m = ViscosityModel::constant(r.mu_const);
    m.mu0 = r.mu0;
    m.mu1 = r.mu1;
  } else if (r.kind == "carreau_clamped") {
    m = ViscosityModel::carreau_clamped(r.mu_inf, r.eta0, r.relax, r.r_exp, r.beta, r.mu0, r.mu1);
  } else if (r.kind == "bingham_regularized") {
    m = ViscosityModel::bingham_regularized(r.mu_inf, r.eta0, r.tau_y, r.epsilon, r.beta, r.mu0, r.mu1);
  } else if (r.kind == "power_clamped") {
    m = ViscosityModel::power_clamped(r.mu_inf, r.eta0, r.relax, r.r_exp, r.beta, r.mu0, r.mu1);
  } else {
    throw InvalidInput("unknown viscosity kind '" + r.kind + "'");
  }
  if (r.lipschitz_temp >= 0.0) m.lipschitz_temp = r.lipschitz_temp;
  if (r.monotone_in_s == "nondecreasing") m.monotone_in_s = Monotonicity::Nondecreasing;
  if (r.monotone_in_s == "nonincreasing") m.monotone_in_s = Monotonicity::Nonincreasing;
  return m;
}

DomainSpec make_domain(const DomainConfig& d) {
  DomainSpec spec;
  spec.dim = d.dim;
  spec.omega_extent = {d.extent_x, d.dim == 3 ? d.extent_y : 1.0};
  if (d.height_kind == "constant") {
    spec.height = HeightFunction::constant(d.h0);
  } else if (d.height_kind == "affine") {
    spec.height = HeightFunction::affine(d.h0, {d.slope_x, d.dim == 3 ? d.slope_y : 0.0});
  } else {
    spec.height = HeightFunction::sampled(d.height_samples, {d.sample_nx, d.sample_ny}, spec.omega_extent);
  }
  return spec;
}

VectorFunction lateral_profile(double flow_rate, const HeightFunction& height, int dim) {
  return [flow_rate, height, dim](const Vec3& x) {
    const double h = dim == 2 ? height(x[0]) : height(x[0], x[1]);
    const double z = x[dim - 1] / h;
    return Vec3(flow_rate * 1.5 * (1.0 - z * z) / h, 0.0, 0.0);
  };
}

Scenario build_scenario(const RunConfig& cfg) {
  if (auto errors = validate(cfg); !errors.empty()) throw ConfigError(std::move(errors));
  Scenario sc;
  sc.config = cfg;
  const DomainSpec spec = make_domain(cfg.domain);
  const int dim = cfg.domain.dim;
  std::vector<int> res = dim == 2 ? std::vector<int>{cfg.domain.nx, cfg.domain.nz}
                                  : std::vector<int>{cfg.domain.nx, cfg.domain.ny, cfg.domain.nz};
  sc.mesh = std::make_shared<const Mesh>(build_slab_mesh(spec, res));
  QuadratureOptions q;
  q.cell_degree = cfg.flow.cell_degree;
  q.facet_degree = cfg.flow.facet_degree;
  sc.disc = Discretization::build(sc.mesh, q);

  sc.models.viscosity = make_viscosity(cfg.rheology);
  const auto& k = cfg.conductivity;
  sc.models.conductivity.k_const = k.k_const;
  sc.models.conductivity.k_grad = Vec3(k.k_grad_x, k.k_grad_y, k.k_grad_z);
  sc.models.conductivity.k0 = k.k0;
  sc.models.conductivity.k1 = k.k1;
  sc.models.source.r0 = cfg.source.r0;
  sc.models.source.r_amp = cfg.source.r_amp;
  sc.models.source.r_scale = cfg.source.r_scale;

  FlowProblem& fp = sc.flow_problem;
  fp.models = sc.models;
  fp.friction.k = cfg.friction.k;
  fp.friction.s = Vec3(cfg.friction.s_x, dim == 3 ? cfg.friction.s_y : 0.0, 0.0);
  const Vec3 f = dim == 2 ? Vec3(cfg.flow.body_force_x, cfg.flow.body_force_y, 0.0)
                          : Vec3(cfg.flow.body_force_x, cfg.flow.body_force_y, cfg.flow.body_force_z);
  if (f.norm() > 0.0) fp.body_force = [f](const Vec3&) { return f; };
  fp.lateral = lateral_profile(cfg.bcs.flow_rate, spec.height, dim);

  FlowConfig& fc = sc.flow_config;
  fc.tol_picard = cfg.flow.tol_picard;
  fc.max_picard = cfg.flow.max_picard;
  fc.max_uzawa = cfg.flow.max_uzawa;
  fc.tol_comp_rel = cfg.flow.tol_comp_rel;
  fc.rho_scale = cfg.flow.rho_scale;
  fc.p_exponent = cfg.coupling.p_exponent;
  fc.gauge = cfg.flow.gauge == "pin_first" ? PressureGauge::PinFirst : PressureGauge::MeanZero;
  fc.friction_rule = cfg.flow.friction_rule == "gauss" ? FrictionRule::Gauss : FrictionRule::Nodal;

  sc.heat_bcs.theta_omega = cfg.bcs.theta_omega;
  sc.heat_options.artificial_diffusion = cfg.heat.artificial_diffusion;

  CouplingConfig& cc = sc.coupling;
  cc.mode = cfg.coupling.mode == "paper_nested" ? CouplingMode::PaperNested : CouplingMode::GaussSeidel;
  cc.damping = cfg.coupling.damping;
  cc.tol_outer = cfg.coupling.tol_outer;
  cc.max_outer = cfg.coupling.max_outer;
  cc.p_exponent = cfg.coupling.p_exponent;
  cc.inner_tol = cfg.coupling.inner_tol;
  cc.max_inner = cfg.coupling.max_inner;
  return sc;
}

}  // namespace thermoslip
