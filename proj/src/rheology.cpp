#include "thermoslip/rheology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermoslip {

std::string_view to_string(ViscosityKind kind) {
  switch (kind) {
    case ViscosityKind::Constant:
      return "constant";
    case ViscosityKind::CarreauClamped:
      return "carreau_clamped";
    case ViscosityKind::BinghamRegularized:
      return "bingham_regularized";
    case ViscosityKind::PowerClamped:
      return "power_clamped";
  }
  return "?";
}

std::string_view to_string(Monotonicity m) {
  return m == Monotonicity::Nondecreasing ? "nondecreasing" : "nonincreasing";
}

ViscosityModel ViscosityModel::constant(double mu) {
  ViscosityModel m;
  m.kind = ViscosityKind::Constant;
  m.mu_const = mu;
  m.mu_inf = mu;
  m.eta0 = mu;
  m.mu0 = mu;
  m.mu1 = mu;
  m.lipschitz_temp = 0.0;
  m.monotone_in_s = Monotonicity::Nondecreasing;
  return m;
}

ViscosityModel ViscosityModel::carreau_clamped(double mu_inf, double eta0, double relax,
                                               double r_exp, double beta, double mu0, double mu1) {
  ViscosityModel m;
  m.kind = ViscosityKind::CarreauClamped;
  m.mu_inf = mu_inf;
  m.eta0 = eta0;
  m.relax = relax;
  m.r_exp = r_exp;
  m.beta = beta;
  m.mu0 = mu0;
  m.mu1 = mu1;
  m.lipschitz_temp = derived_temperature_lipschitz(m);
  m.monotone_in_s = derived_monotonicity(m);
  return m;
}

ViscosityModel ViscosityModel::bingham_regularized(double mu_inf, double eta0, double tau_y,
                                                   double epsilon, double beta, double mu0,
                                                   double mu1) {
  ViscosityModel m;
  m.kind = ViscosityKind::BinghamRegularized;
  m.mu_inf = mu_inf;
  m.eta0 = eta0;
  m.tau_y = tau_y;
  m.epsilon = epsilon;
  m.beta = beta;
  m.mu0 = mu0;
  m.mu1 = mu1;
  m.lipschitz_temp = derived_temperature_lipschitz(m);
  m.monotone_in_s = derived_monotonicity(m);
  return m;
}

ViscosityModel ViscosityModel::power_clamped(double mu_inf, double eta0, double relax,
                                             double r_exp, double beta, double mu0, double mu1) {
  ViscosityModel m;
  m.kind = ViscosityKind::PowerClamped;
  m.mu_inf = mu_inf;
  m.eta0 = eta0;
  m.relax = relax;
  m.r_exp = r_exp;
  m.beta = beta;
  m.mu0 = mu0;
  m.mu1 = mu1;
  m.lipschitz_temp = derived_temperature_lipschitz(m);
  m.monotone_in_s = derived_monotonicity(m);
  return m;
}

double ViscosityModel::eta(double theta) const {
  return mu_inf + (eta0 - mu_inf) * std::exp(-beta * std::max(theta, 0.0));
}

double derived_temperature_lipschitz(const ViscosityModel& m) {
  const double drop = std::max(m.eta0 - m.mu_inf, 0.0);
  switch (m.kind) {
    case ViscosityKind::Constant:
      return 0.0;
    case ViscosityKind::CarreauClamped: {
      // |d mu/d theta| = beta (eta - mu_inf) F(s); where unclamped,
      // (eta - mu_inf) F(s) = mu - mu_inf <= mu1 - mu_inf.
      const double cap = std::max(m.mu1 - m.mu_inf, 0.0);
      return m.beta * (m.r_exp <= 2.0 ? std::min(drop, cap) : cap);
    }
    case ViscosityKind::BinghamRegularized:
      return m.beta * drop;
    case ViscosityKind::PowerClamped:
      // |d mu/d theta| = beta (eta - mu_inf)/eta * mu <= beta mu1.
      return m.beta * m.mu1;
  }
  return 0.0;
}

Monotonicity derived_monotonicity(const ViscosityModel& m) {
  switch (m.kind) {
    case ViscosityKind::Constant:
      return Monotonicity::Nondecreasing;
    case ViscosityKind::CarreauClamped:
    case ViscosityKind::PowerClamped:
      return m.r_exp >= 2.0 ? Monotonicity::Nondecreasing : Monotonicity::Nonincreasing;
    case ViscosityKind::BinghamRegularized:
      return Monotonicity::Nonincreasing;
  }
  return Monotonicity::Nondecreasing;
}

double mu(const ViscosityModel& m, double theta, const Vec3& /*v*/, double s) {
  if (!(s >= 0.0)) throw InvalidInput("mu: shear magnitude must be nonnegative");
  double value = m.mu_const;
  switch (m.kind) {
    case ViscosityKind::Constant:
      return m.mu_const;
    case ViscosityKind::CarreauClamped: {
      const double factor = std::pow(1.0 + m.relax * m.relax * s * s, 0.5 * (m.r_exp - 2.0));
      value = m.mu_inf + (m.eta(theta) - m.mu_inf) * factor;
      break;
    }
    case ViscosityKind::BinghamRegularized:
      value = m.eta(theta) + m.tau_y / std::sqrt(s * s + m.epsilon * m.epsilon);
      break;
    case ViscosityKind::PowerClamped: {
      const double rate = m.relax * s;
      double factor = 1.0;
      if (m.r_exp != 2.0) {
        factor = rate > 0.0 ? std::pow(rate, m.r_exp - 2.0)
                            : (m.r_exp < 2.0 ? std::numeric_limits<double>::infinity() : 0.0);
      }
      value = m.eta(theta) * factor;
      break;
    }
  }
  return std::clamp(value, m.mu0, m.mu1);
}

double dissipation(const ViscosityModel& model, double theta, const Vec3& v, const Mat3& dv) {
  const double s2 = dv.squaredNorm();
  return 2.0 * mu(model, theta, v, std::sqrt(s2)) * s2;
}

ConductivityModel ConductivityModel::constant(double k) {
  ConductivityModel c;
  c.k_const = k;
  c.k0 = k;
  c.k1 = k;
  return c;
}

SourceModel SourceModel::constant(double r) {
  SourceModel s;
  s.r0 = r;
  return s;
}

double SourceModel::operator()(double theta) const {
  return r0 - r_amp * std::tanh(theta / r_scale);
}

bool HypothesisReport::viscosity_ok() const {
  return bound_violation == 0.0 && s_monotonicity_violation == 0.0 &&
         temp_increase_violation == 0.0 && temp_lipschitz_violation == 0.0;
}

bool HypothesisReport::source_ok() const {
  return source_bound_violation == 0.0 && source_lipschitz_violation == 0.0 &&
         source_increase_violation == 0.0;
}

bool HypothesisReport::conductivity_ok() const { return conductivity_violation == 0.0; }

HypothesisReport verify_hypotheses(const MaterialModels& models, const SamplingGrid& grid,
                                   const Vec3& box_lo, const Vec3& box_hi) {
  HypothesisReport rep;
  const ViscosityModel& vm = models.viscosity;
  const Vec3 v0 = Vec3::Zero();
  const int nt = std::max(grid.n_theta, 1);
  const int ns = std::max(grid.n_s, 1);
  auto theta_at = [&](int i) {
    return nt == 1 ? grid.theta_min
                   : grid.theta_min + (grid.theta_max - grid.theta_min) * i / (nt - 1);
  };
  auto s_at = [&](int j) { return ns == 1 ? 0.0 : grid.s_max * j / (ns - 1); };

  // Finite-difference slopes carry rounding of order eps * |mu| / dtheta.
  const double eps = 64.0 * std::numeric_limits<double>::epsilon();
  rep.mu_min = std::numeric_limits<double>::infinity();
  rep.mu_max = -std::numeric_limits<double>::infinity();

  std::vector<double> prev_row(ns), row(ns);
  for (int i = 0; i < nt; ++i) {
    const double t = theta_at(i);
    for (int j = 0; j < ns; ++j) {
      const double value = mu(vm, t, v0, s_at(j));
      row[j] = value;
      ++rep.points_sampled;
      rep.mu_min = std::min(rep.mu_min, value);
      rep.mu_max = std::max(rep.mu_max, value);
      rep.bound_violation = std::max({rep.bound_violation, vm.mu0 - value, value - vm.mu1});
      if (j > 0) {
        const double step = value - row[j - 1];
        const double tol = eps * std::max(std::abs(value), 1.0);
        const double against = vm.monotone_in_s == Monotonicity::Nondecreasing ? -step : step;
        if (against > tol) rep.s_monotonicity_violation = std::max(rep.s_monotonicity_violation, against);
      }
      if (i > 0) {
        const double dt = t - theta_at(i - 1);
        const double slope = (value - prev_row[j]) / dt;
        const double tol = eps * std::max(std::abs(value), 1.0) / dt;
        rep.max_temp_slope = std::max(rep.max_temp_slope, std::abs(slope));
        if (slope > tol) rep.temp_increase_violation = std::max(rep.temp_increase_violation, slope);
        const double over = std::abs(slope) - vm.lipschitz_temp;
        if (over > tol) rep.temp_lipschitz_violation = std::max(rep.temp_lipschitz_violation, over);
      }
    }
    std::swap(prev_row, row);
  }

  const SourceModel& src = models.source;
  const int nr = std::max(nt, 2) * 10;
  double prev_r = 0.0, prev_t = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double t = grid.theta_min + (grid.theta_max - grid.theta_min) * i / (nr - 1);
    const double r = src(t);
    const double tol = eps * std::max(std::abs(r), 1.0);
    if (std::abs(r) - src.bound() > tol) {
      rep.source_bound_violation = std::max(rep.source_bound_violation, std::abs(r) - src.bound());
    }
    if (i > 0) {
      const double slope = (r - prev_r) / (t - prev_t);
      const double stol = tol / (t - prev_t);
      if (std::abs(slope) - src.lipschitz() > stol) {
        rep.source_lipschitz_violation =
            std::max(rep.source_lipschitz_violation, std::abs(slope) - src.lipschitz());
      }
      if (slope > stol) rep.source_increase_violation = std::max(rep.source_increase_violation, slope);
    }
    prev_r = r;
    prev_t = t;
  }

  const ConductivityModel& kc = models.conductivity;
  rep.k_min = std::numeric_limits<double>::infinity();
  rep.k_max = -std::numeric_limits<double>::infinity();
  const int nx = std::max(grid.n_space, 2);
  for (int a = 0; a < nx; ++a) {
    for (int b = 0; b < nx; ++b) {
      for (int c = 0; c < nx; ++c) {
        const Vec3 frac(double(a) / (nx - 1), double(b) / (nx - 1), double(c) / (nx - 1));
        const Vec3 x = box_lo + (box_hi - box_lo).cwiseProduct(frac);
        const double k = kc(x);
        rep.k_min = std::min(rep.k_min, k);
        rep.k_max = std::max(rep.k_max, k);
        rep.conductivity_violation = std::max({rep.conductivity_violation, kc.k0 - k, k - kc.k1});
      }
    }
  }
  if (!(kc.k0 > 0.0)) rep.conductivity_violation = std::max(rep.conductivity_violation, -kc.k0);
  return rep;
}

}  // namespace thermoslip
