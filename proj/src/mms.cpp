#include "thermoslip/mms.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "thermoslip/coupling.hpp"

namespace thermoslip {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kU = 1.0;

std::shared_ptr<const Mesh> unit_square(int n) {
  DomainSpec spec;
  spec.height = HeightFunction::constant(1.0);
  const int res[2] = {n, n};
  return std::make_shared<const Mesh>(build_slab_mesh(spec, res));
}

double theta_star(const Vec3& x) { return std::sin(kPi * x[0]) * x[1] * (1.0 - x[1]); }

Mat3 theta_star_grad(const Vec3& x) {
  Mat3 g = Mat3::Zero();
  g(0, 0) = kPi * std::cos(kPi * x[0]) * x[1] * (1.0 - x[1]);
  g(0, 1) = std::sin(kPi * x[0]) * (1.0 - 2.0 * x[1]);
  return g;
}

double minus_laplace_theta_star(const Vec3& x) {
  return std::sin(kPi * x[0]) * (kPi * kPi * x[1] * (1.0 - x[1]) + 2.0);
}

Vec3 v_star(const Vec3& x) { return Vec3(kU * (1.0 - x[1] * x[1]), 0.0, 0.0); }

Mat3 v_star_grad(const Vec3& x) {
  Mat3 g = Mat3::Zero();
  g(0, 1) = -2.0 * kU * x[1];
  return g;
}

void finish_rates(MmsTable& t) {
  t.min_l2_rate = std::numeric_limits<double>::infinity();
  t.max_l2_rate = -std::numeric_limits<double>::infinity();
  t.min_h1_rate = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.levels.size(); ++i) {
    auto& cur = t.levels[i];
    const auto& prev = t.levels[i - 1];
    const double ratio = std::log(prev.h / cur.h);
    cur.l2_rate = std::log(prev.l2 / cur.l2) / ratio;
    cur.h1_rate = std::log(prev.h1 / cur.h1) / ratio;
    if (!(cur.l2 < prev.l2) || !(cur.h1 < prev.h1)) t.monotone = false;
    t.min_l2_rate = std::min(t.min_l2_rate, cur.l2_rate);
    t.max_l2_rate = std::max(t.max_l2_rate, cur.l2_rate);
    t.min_h1_rate = std::min(t.min_h1_rate, cur.h1_rate);
  }
  if (t.levels.size() < 2) t.min_l2_rate = t.max_l2_rate = t.min_h1_rate = 0.0;
}

void check_levels(int levels) {
  if (levels < 1 || levels > 7) throw InvalidInput("mms: levels must lie in [1, 7]");
}

}  // namespace

MmsTable run_heat_mms(int levels) {
  check_levels(levels);
  MmsTable t;
  t.name = "heat";
  for (int l = 0; l < levels; ++l) {
    const int n = 4 << l;
    auto disc = Discretization::build(unit_square(n));
    MaterialModels models;
    models.viscosity = ViscosityModel::constant(1.0);
    models.conductivity = ConductivityModel::constant(1.0);
    models.source = SourceModel::constant(0.0);
    HeatBCs bcs;
    bcs.theta_omega_field = [](const Vec3& x) { return -std::sin(kPi * x[0]); };
    HeatOptions opts;
    opts.extra_source = minus_laplace_theta_star;
    HeatSolver heat(disc, models, bcs, opts);
    const Field zero_v = Field::zeros(disc.velocity);
    const HeatResult r = heat.solve(Field::zeros(disc.temperature), zero_v);
    MmsLevel lv;
    lv.n = n;
    lv.h = 1.0 / n;
    lv.l2 = l2_error(r.theta, [](const Vec3& x) { return Vec3(theta_star(x), 0.0, 0.0); });
    lv.h1 = h1_error(r.theta, theta_star_grad);
    t.levels.push_back(lv);
  }
  finish_rates(t);
  return t;
}

MmsTable run_flow_mms(int levels) {
  check_levels(levels);
  MmsTable t;
  t.name = "flow";
  const double mu_bar = 2.0;
  for (int l = 0; l < levels; ++l) {
    const int n = 4 << l;
    auto disc = Discretization::build(unit_square(n));
    FlowProblem p;
    p.models.viscosity = ViscosityModel::constant(mu_bar);
    p.friction.k = 0.0;
    p.lateral = v_star;
    FlowSolver flow(disc, p);
    const FlowResult r = flow.solve(Field::zeros(disc.temperature));
    MmsLevel lv;
    lv.n = n;
    lv.h = 1.0 / n;
    lv.l2 = l2_error(r.v, v_star);
    lv.h1 = h1_error(r.v, v_star_grad);
    lv.aux = l2_error(r.pi, [mu_bar](const Vec3& x) { return Vec3(-2.0 * mu_bar * kU * (x[0] - 0.5), 0.0, 0.0); });
    t.levels.push_back(lv);
  }
  finish_rates(t);
  // Quadratic velocities are reproduced exactly, so rates carry no information.
  t.monotone = true;
  return t;
}

MmsTable run_coupled_mms(int levels) {
  check_levels(levels);
  MmsTable t;
  t.name = "coupled";
  const ViscosityModel visc = ViscosityModel::carreau_clamped(1.0, 2.0, 1.0, 2.5, 0.5, 0.5, 10.0);
  const SourceModel src{0.1, 0.2, 1.0};
  auto stress = [visc](const Vec3& x) {
    const Mat3 d = deformation_tensor(v_star_grad(x));
    return Mat3(2.0 * mu(visc, theta_star(x), v_star(x), frobenius(d)) * d);
  };
  // f = -div(2 mu D(v*)) + grad pi*, divergence by central differences.
  auto body = [stress](const Vec3& x) {
    const double e = 1e-5;
    Vec3 f = Vec3::Zero();
    for (int j = 0; j < 2; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += e;
      xm[j] -= e;
      const Mat3 dp = stress(xp), dm = stress(xm);
      for (int i = 0; i < 2; ++i) f[i] -= (dp(i, j) - dm(i, j)) / (2.0 * e);
    }
    f[0] += 1.0;  // grad of pi* = x - 1/2
    return f;
  };
  auto heat_source = [visc, src](const Vec3& x) {
    const Mat3 d = deformation_tensor(v_star_grad(x));
    const double conv = v_star(x).dot(theta_star_grad(x).row(0).transpose());
    return minus_laplace_theta_star(x) + conv - dissipation(visc, theta_star(x), v_star(x), d) -
           src(theta_star(x));
  };
  for (int l = 0; l < levels; ++l) {
    const int n = 4 << l;
    auto disc = Discretization::build(unit_square(n));
    MaterialModels models;
    models.viscosity = visc;
    models.conductivity = ConductivityModel::constant(1.0);
    models.source = src;
    FlowProblem p;
    p.models = models;
    p.friction.k = 0.0;
    p.lateral = v_star;
    p.body_force = body;
    FlowSolver flow(disc, p);
    HeatBCs bcs;
    bcs.theta_omega_field = [](const Vec3& x) { return -std::sin(kPi * x[0]); };
    HeatOptions opts;
    opts.extra_source = heat_source;
    HeatSolver heat(disc, models, bcs, opts);
    CouplingConfig cc;
    cc.tol_outer = 1e-10;
    const CoupledState st = run_coupled(flow, heat, cc, Field::zeros(disc.temperature));
    if (!st.converged) throw SolverFault("coupled mms: " + st.message);
    MmsLevel lv;
    lv.n = n;
    lv.h = 1.0 / n;
    lv.l2 = l2_error(st.theta, [](const Vec3& x) { return Vec3(theta_star(x), 0.0, 0.0); });
    lv.h1 = h1_error(st.theta, theta_star_grad);
    lv.aux = l2_error(st.v, v_star);
    t.levels.push_back(lv);
  }
  finish_rates(t);
  return t;
}

MmsTable run_mms(const std::string& name, int levels) {
  if (name == "heat") return run_heat_mms(levels);
  if (name == "flow") return run_flow_mms(levels);
  if (name == "coupled") return run_coupled_mms(levels);
  throw InvalidInput("unknown mms case '" + name + "' (expected flow, heat or coupled)");
}

}  // namespace thermoslip
