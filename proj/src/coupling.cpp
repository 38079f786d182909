#include "thermoslip/coupling.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace thermoslip {

std::string_view to_string(CouplingMode mode) {
  return mode == CouplingMode::GaussSeidel ? "gauss_seidel" : "paper_nested";
}

namespace {

// Restriction of a square matrix to the unconstrained dofs.
SparseMatrix restrict_free(const SparseMatrix& A, const std::vector<int>& free_index) {
  std::vector<Triplet> trips;
  int n = 0;
  for (int i : free_index) n = std::max(n, i + 1);
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      const int r = free_index[it.row()];
      const int c = free_index[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

double field_l4(const Space& space, const Vector& values, int degree) {
  return norm_lp(Field{std::shared_ptr<const Space>(&space, [](const Space*) {}), values}, 4.0, degree);
}

}  // namespace

EmbeddingConstants estimate_constants(const Discretization& disc, int samples, std::uint64_t seed) {
  const Space& ts = *disc.temperature;
  const int deg = disc.quadrature.cell_degree;
  const DirichletSet bc = temperature_constraints(ts);
  std::vector<int> index(ts.num_dofs(), -1);
  std::vector<int> free;
  for (int i = 0; i < ts.num_dofs(); ++i) {
    if (!bc.constrained(i)) {
      index[i] = static_cast<int>(free.size());
      free.push_back(i);
    }
  }
  const int nf = static_cast<int>(free.size());
  if (nf == 0) throw InvalidInput("estimate_constants: no free temperature dofs");
  const SparseMatrix K = restrict_free(assemble_stiffness(ts, {}, deg), index);
  const SparseMatrix M = restrict_free(assemble_mass(ts, deg), index);
  const SparseMatrix Mw =
      restrict_free(assemble_boundary_mass(ts, BoundaryTag::Omega, disc.quadrature.facet_degree), index);
  Eigen::SimplicialLDLT<SparseMatrix> chol(K);
  if (chol.info() != Eigen::Success) throw SolverFault("estimate_constants: stiffness not definite");

  EmbeddingConstants out;
  out.samples = samples;
  out.seed = seed;

  // Smallest eigenvalue of K x = l M x by inverse iteration.
  Vector x = Vector::Ones(nf);
  double lmin = 0.0;
  for (int it = 0; it < 1000; ++it) {
    x = chol.solve(M * x);
    x /= std::sqrt(x.dot(M * x));
    const double rq = x.dot(K * x);
    const bool done = std::abs(rq - lmin) <= 1e-15 * rq;
    lmin = rq;
    if (done) break;
  }
  out.poincare = 1.0 / std::sqrt(lmin);

  // Largest eigenvalue of Mw x = l K x by power iteration on K^-1 Mw.
  x = Vector::Ones(nf);
  double lmax = 0.0;
  for (int it = 0; it < 5000; ++it) {
    x = chol.solve(Mw * x);
    const double kn = x.dot(K * x);
    if (!(kn > 0.0)) break;
    x /= std::sqrt(kn);
    const double rq = x.dot(Mw * x);
    const bool done = std::abs(rq - lmax) <= 1e-14 * rq;
    lmax = rq;
    if (done) break;
  }
  out.trace = std::sqrt(lmax);

  const int dim = disc.mesh->dim;
  out.l4_analytic = dim == 2 ? std::sqrt(2.0 * out.poincare) : std::pow(8.0 * out.poincare, 0.25);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vector full = Vector::Zero(ts.num_dofs());
  for (int sidx = 0; sidx < samples; ++sidx) {
    Vector r(nf);
    for (int i = 0; i < nf; ++i) r[i] = uni(rng);
    // Alternate rough and smoothed samples.
    if (sidx % 2 == 1) r = chol.solve(M * r);
    const double g = std::sqrt(r.dot(K * r));
    if (!(g > 0.0)) continue;
    for (int i = 0; i < nf; ++i) full[free[i]] = r[i];
    out.l4_sampled = std::max(out.l4_sampled, field_l4(ts, full, deg) / g);
  }
  out.l4 = std::max(out.l4_sampled, out.l4_analytic);
  return out;
}

LipschitzEstimate lipschitz_estimate(const Field& v, const MaterialModels& models, const HeatBCs& bcs,
                                     const EmbeddingConstants& constants, double p) {
  if (!(p >= 4.0)) throw InvalidInput("lipschitz_estimate: p must be at least 4");
  const Mesh& mesh = v.sp().mesh();
  const double volume = mesh.volume();
  LipschitzEstimate e;
  e.norm_D_p = deformation_norm_lp(v, p);
  e.volume_factor = std::pow(volume, (p - 4.0) / (2.0 * p));
  double flux2 = 0.0;
  for (const auto& bp : boundary_quadrature(mesh, BoundaryTag::Omega, 4)) {
    const double f = bcs.flux_at(bp.point);
    flux2 += bp.weight * f * f;
  }
  e.flux_l2 = std::sqrt(flux2);
  const double k0 = models.conductivity.k0;
  const double d2 = e.norm_D_p * e.norm_D_p;
  const double cp = constants.poincare;
  e.L_hat = (2.0 * e.volume_factor * models.viscosity.lipschitz_temp * constants.l4 * constants.l4 * d2 +
             cp * cp * models.source.lipschitz()) / k0;
  e.C_star = (2.0 * e.volume_factor * models.viscosity.mu1 * cp * d2 + constants.trace * e.flux_l2 +
              cp * std::sqrt(volume) * models.source.bound()) / k0;
  return e;
}

Field map_T(const HeatSolver& heat, const Field& eta, const Field& v) { return heat.solve(eta, v).theta; }

CoupledState run_coupled(const FlowSolver& flow, const HeatSolver& heat, const CouplingConfig& cfg,
                         const Field& theta0) {
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw InvalidInput("coupling: damping must lie in (0, 1]");
  if (!(cfg.tol_outer > 0.0) || cfg.max_outer < 1) throw InvalidInput("coupling: bad tolerance or limit");
  if (!(cfg.p_exponent >= 4.0)) throw InvalidInput("coupling: p must be at least 4");
  const Discretization& disc = flow.discretization();
  const SparseMatrix K = assemble_stiffness(*disc.temperature, {}, disc.quadrature.cell_degree);
  auto h1 = [&K](const Vector& x) { return std::sqrt(std::max(x.dot(K * x), 0.0)); };

  CoupledState st;
  st.theta = theta0;
  double damping = cfg.damping;
  double prev_delta = 0.0;
  int above_one = 0;
  const FrictionState* warm = nullptr;

  for (int k = 1; k <= cfg.max_outer; ++k) {
    FlowResult fr = flow.solve(st.theta, warm);
    OuterRecord rec;
    rec.iter = k;
    rec.picard_iters = fr.report.picard_iters;
    rec.uzawa_iters = fr.report.uzawa_iters;
    rec.flow_converged = fr.report.converged;
    rec.complementarity = fr.report.complementarity;
    rec.tol_comp = fr.report.tol_comp;
    rec.bound_slack = fr.report.apriori.slack;
    rec.bound_rhs = fr.report.apriori.rhs;
    rec.C_bound = fr.report.apriori.C_bound;
    rec.norm_v = fr.report.apriori.norm_v;

    Vector target;
    HeatResult hr;
    if (cfg.mode == CouplingMode::GaussSeidel) {
      hr = heat.solve(st.theta, fr.v);
      target = hr.theta.values;
    } else {
      Field eta = st.theta;
      double prev_inner = 0.0;
      for (int i = 1; i <= cfg.max_inner; ++i) {
        hr = heat.solve(eta, fr.v);
        const double dn = h1(hr.theta.values - eta.values);
        if (i > 1 && prev_inner > 0.0) {
          const double ratio = dn / prev_inner;
          st.inner_ratios.push_back(ratio);
          rec.inner_max_ratio = std::max(rec.inner_max_ratio, ratio);
        }
        prev_inner = dn;
        rec.inner_iters = i;
        eta = hr.theta;
        if (dn <= cfg.inner_tol) break;
      }
      target = eta.values;
    }
    rec.heat_balance = std::abs(hr.report.energy_balance) / std::max(hr.report.energy_scale, 1e-300);

    const Vector next = (1.0 - damping) * st.theta.values + damping * target;
    const double delta = h1(next - st.theta.values);
    rec.delta = delta;
    rec.ratio = k > 1 && prev_delta > 0.0 ? delta / prev_delta : 0.0;
    rec.damping = damping;
    st.history.push_back(rec);

    st.v = fr.v;
    st.pi = fr.pi;
    st.lam = fr.lam;
    st.flow = fr.report;
    st.heat = hr.report;
    st.theta.values = next;
    warm = &st.lam;

    if (delta <= cfg.tol_outer) {
      st.converged = fr.report.converged;
      st.message = st.converged ? "converged" : "outer loop converged but flow sub-solve did not";
      return st;
    }
    if (cfg.auto_damping && k > 1 && rec.ratio > 1.0) {
      if (++above_one >= 3) {
        damping *= 0.5;
        above_one = 0;
      }
    } else {
      above_one = 0;
    }
    prev_delta = delta;
  }
  st.converged = false;
  st.message = "outer iteration did not converge";
  return st;
}

}  // namespace thermoslip
