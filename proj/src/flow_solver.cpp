#include "thermoslip/flow_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermoslip {

namespace {

constexpr int kMaxNodes = 10;

Vec3 tangential_part(const Vec3& s, int dim) {
  Vec3 t = Vec3::Zero();
  for (int c = 0; c + 1 < dim; ++c) t[c] = s[c];
  return t;
}

Vec3 project_unit_ball(const Vec3& x) {
  const double n = x.norm();
  return n > 1.0 ? Vec3(x / n) : x;
}

}  // namespace

std::vector<BoundaryQuadPoint> friction_points(const Space& velocity, FrictionRule rule,
                                               int facet_degree) {
  const Mesh& mesh = velocity.mesh();
  if (rule == FrictionRule::Gauss) return boundary_quadrature(mesh, BoundaryTag::Omega, facet_degree);
  if (velocity.kind() != SpaceKind::VectorQuadratic) throw InvalidInput("friction_points: needs the velocity space");
  const int vpc = mesh.vertices_per_cell();
  const auto ledges = local_edges(mesh.dim);
  std::vector<BoundaryQuadPoint> pts;
  std::vector<int> index(velocity.num_nodes(), -1);
  auto add = [&](int node, int fi, int cell, const Barycentric& b, double w) {
    if (index[node] < 0) {
      index[node] = static_cast<int>(pts.size());
      BoundaryQuadPoint bp;
      bp.point = velocity.node_point(node);
      bp.normal = mesh.facets[fi].normal;
      bp.facet = fi;
      bp.cell = cell;
      bp.bary = b;
      pts.push_back(bp);
    }
    pts[index[node]].weight += w;
  };
  for (int fi : mesh.facets_with_tag(BoundaryTag::Omega)) {
    const Facet& f = mesh.facets[fi];
    const int c = f.cells[0];
    const auto nodes = velocity.cell_nodes(c);
    const double w_vertex = mesh.dim == 2 ? f.measure / 6.0 : f.measure / 6.0;
    const double w_edge = mesh.dim == 2 ? 4.0 * f.measure / 6.0 : f.measure / 6.0;
    for (int i = 0; i < vpc; ++i) {
      if (i == f.local_in_cell) continue;
      Barycentric b{};
      b[i] = 1.0;
      add(nodes[i], fi, c, b, w_vertex);
    }
    for (std::size_t e = 0; e < ledges.size(); ++e) {
      if (ledges[e][0] == f.local_in_cell || ledges[e][1] == f.local_in_cell) continue;
      Barycentric b{};
      b[ledges[e][0]] = 0.5;
      b[ledges[e][1]] = 0.5;
      add(nodes[vpc + e], fi, c, b, w_edge);
    }
  }
  return pts;
}

double FrictionState::max_norm() const {
  double m = 0.0;
  for (const auto& l : lambda) m = std::max(m, l.norm());
  return m;
}

FrictionState uzawa_update(const FrictionState& lam, const std::vector<Vec3>& v_t, const Vec3& s,
                           const std::vector<double>& rho) {
  if (v_t.size() != lam.lambda.size() || rho.size() != lam.lambda.size()) {
    throw InvalidInput("uzawa_update: size mismatch");
  }
  FrictionState out;
  out.lambda.resize(lam.lambda.size());
  for (std::size_t q = 0; q < lam.lambda.size(); ++q) {
    if (!(rho[q] >= 0.0)) throw InvalidInput("uzawa_update: step must be nonnegative");
    out.lambda[q] = project_unit_ball(lam.lambda[q] + rho[q] * (v_t[q] - s));
  }
  return out;
}

double complementarity_residual(const std::vector<Vec3>& v_t, const FrictionState& lam,
                                const Vec3& s, const std::vector<double>& k_w) {
  double sum = 0.0;
  for (std::size_t q = 0; q < v_t.size(); ++q) {
    const Vec3 d = v_t[q] - s;
    sum += std::abs(k_w[q] * (d.norm() - d.dot(lam.lambda[q])));
  }
  return sum;
}

double operator_pairing(const Field& theta, const Field& u, const Field& phi,
                        const ViscosityModel& model, int degree) {
  const Mesh& mesh = u.sp().mesh();
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Barycentric& b = rule.points[q];
      const Mat3 du = deformation_tensor(u.gradient(c, b));
      const Mat3 dphi = deformation_tensor(phi.gradient(c, b));
      const double m = mu(model, theta.scalar(c, b), u.value(c, b), frobenius(du));
      sum += rule.weights[q] * mesh.cell_volume[c] * 2.0 * m * (du.cwiseProduct(dphi)).sum();
    }
  }
  return sum;
}

// Augmented system [[A, -B^T, 0], [-B, 0, m], [0, w^T, 0]] with essential
// rows replaced by the identity and essential columns moved to the load.
struct FlowSolver::Saddle {
  int nv = 0;
  int np = 0;
  SparseMatrix full;
  SparseMatrix reduced;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  Vector lift;
  const DirichletSet* bc = nullptr;

  void build(const SparseMatrix& A, const SparseMatrix& B, const Vector& m, const Vector& w,
             const DirichletSet& dirichlet) {
    bc = &dirichlet;
    nv = static_cast<int>(A.rows());
    np = static_cast<int>(B.rows());
    const int n = nv + np + 1;
    std::vector<Triplet> trips;
    trips.reserve(A.nonZeros() + 2 * B.nonZeros() + 2 * np);
    for (int k = 0; k < A.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    }
    for (int k = 0; k < B.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
        trips.emplace_back(nv + it.row(), it.col(), -it.value());
        trips.emplace_back(it.col(), nv + it.row(), -it.value());
      }
    }
    for (int i = 0; i < np; ++i) {
      if (m[i] != 0.0) trips.emplace_back(nv + i, nv + np, m[i]);
      if (w[i] != 0.0) trips.emplace_back(nv + np, nv + i, w[i]);
    }
    full.resize(n, n);
    full.setFromTriplets(trips.begin(), trips.end());

    std::vector<Triplet> red;
    red.reserve(trips.size());
    for (int k = 0; k < full.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(full, k); it; ++it) {
        const bool row_fixed = it.row() < nv && dirichlet.constrained(static_cast<int>(it.row()));
        const bool col_fixed = it.col() < nv && dirichlet.constrained(static_cast<int>(it.col()));
        if (!row_fixed && !col_fixed) red.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (int dof : dirichlet.dofs) red.emplace_back(dof, dof, 1.0);
    reduced.resize(n, n);
    reduced.setFromTriplets(red.begin(), red.end());
    reduced.makeCompressed();
    lu.analyzePattern(reduced);
    lu.factorize(reduced);
    if (lu.info() != Eigen::Success) throw SolverFault("flow: saddle-point system is singular");

    Vector g = Vector::Zero(n);
    for (std::size_t i = 0; i < dirichlet.dofs.size(); ++i) g[dirichlet.dofs[i]] = dirichlet.values[i];
    lift = full * g;
  }

  Vector rhs(const Vector& load_v, bool homogeneous) const {
    Vector b = Vector::Zero(nv + np + 1);
    b.head(nv) = load_v;
    if (!homogeneous) b -= lift;
    for (std::size_t i = 0; i < bc->dofs.size(); ++i) {
      b[bc->dofs[i]] = homogeneous ? 0.0 : bc->values[i];
    }
    return b;
  }

  Vector solve(const Vector& load_v, bool homogeneous) const {
    Vector x = lu.solve(rhs(load_v, homogeneous));
    if (!x.allFinite()) throw SolverFault("flow: non-finite saddle solution");
    return x;
  }
};

FlowSolver::FlowSolver(const Discretization& disc, FlowProblem problem, FlowConfig cfg)
    : disc_(disc), problem_(std::move(problem)), cfg_(cfg) {
  if (!(cfg_.tol_picard > 0.0) || !(cfg_.tol_comp_rel > 0.0) || !(cfg_.tol_mom > 0.0) ||
      cfg_.max_picard < 1 || cfg_.max_uzawa < 1 || !(cfg_.rho_scale > 0.0)) {
    throw InvalidInput("flow: tolerances, step scale and iteration limits must be positive");
  }
  const Space& vel = *disc_.velocity;
  const Space& pres = *disc_.pressure;
  const int deg = disc_.quadrature.cell_degree;
  div_ = assemble_divergence(vel, pres, deg);
  pressure_weights_ = integrate_basis(pres, deg);
  omega_ = friction_points(vel, cfg_.friction_rule, disc_.quadrature.facet_degree);

  const int d = vel.components();
  const int nt = d - 1;
  std::vector<Triplet> trips;
  std::array<double, kMaxNodes> phi{};
  std::vector<char> on_trace(vel.num_dofs(), 0);
  k_w_.resize(omega_.size());
  for (std::size_t q = 0; q < omega_.size(); ++q) {
    const auto& bp = omega_[q];
    const double kq = problem_.friction.k_at(bp.point);
    if (!(kq >= 0.0)) throw InvalidInput("flow: friction threshold k must be nonnegative");
    k_w_[q] = kq * bp.weight;
    vel.basis_values(bp.bary, std::span<double>(phi.data(), vel.nodes_per_cell()));
    const auto nodes = vel.cell_nodes(bp.cell);
    for (int a = 0; a < vel.nodes_per_cell(); ++a) {
      if (phi[a] == 0.0) continue;
      for (int t = 0; t < nt; ++t) {
        const int dof = vel.dof(nodes[a], t);
        trips.emplace_back(static_cast<int>(q) * nt + t, dof, phi[a]);
        on_trace[dof] = 1;
      }
    }
  }
  trace_.resize(static_cast<Eigen::Index>(omega_.size()) * nt, vel.num_dofs());
  trace_.setFromTriplets(trips.begin(), trips.end());
  for (int i = 0; i < vel.num_dofs(); ++i) {
    if (on_trace[i]) trace_dofs_.push_back(i);
  }

  body_load_ = assemble_body_force(vel, problem_.body_force, deg);
  bc_ = velocity_constraints(vel, problem_.lateral);

  // Lifting of the boundary data: Stokes flow with viscosity mu1, no load, free slip.
  const ViscosityModel stokes = ViscosityModel::constant(problem_.models.viscosity.mu1);
  Field zero_theta = Field::zeros(disc_.temperature);
  Field v0 = Field::zeros(disc_.velocity);
  SparseMatrix A = assemble_viscous(zero_theta, v0, stokes, deg);
  Saddle s;
  s.build(A, div_, pressure_weights_, pressure_weights_, bc_);
  Vector x = s.solve(Vector::Zero(vel.num_dofs()), false);
  lifting_ = Field{disc_.velocity, x.head(vel.num_dofs())};
}

std::vector<Vec3> FlowSolver::tangential_trace(const Field& v) const {
  const int nt = disc_.velocity->components() - 1;
  const Vector t = trace_ * v.values;
  std::vector<Vec3> out(omega_.size(), Vec3::Zero());
  for (std::size_t q = 0; q < omega_.size(); ++q) {
    for (int c = 0; c < nt; ++c) out[q][c] = t[q * nt + c];
  }
  return out;
}

double FlowSolver::friction_functional(const Field& v) const {
  const Vec3 s = tangential_part(problem_.friction.s, disc_.mesh->dim);
  const auto vt = tangential_trace(v);
  double j = 0.0;
  for (std::size_t q = 0; q < vt.size(); ++q) j += k_w_[q] * (vt[q] - s).norm();
  return j;
}

double FlowSolver::complementarity(const Field& v, const FrictionState& lam) const {
  return complementarity_residual(tangential_trace(v), lam,
                                  tangential_part(problem_.friction.s, disc_.mesh->dim), k_w_);
}

double FlowSolver::tol_comp(double free_slip_scale) const {
  double k_int = 0.0;
  for (double kw : k_w_) k_int += kw;
  const double s_inf = problem_.friction.s.head(disc_.mesh->dim - 1).cwiseAbs().maxCoeff();
  const double floor = 1e-3 * k_int * free_slip_scale;
  return cfg_.tol_comp_rel * (k_int * s_inf + floor) + std::numeric_limits<double>::min();
}

FlowResult FlowSolver::solve(const Field& theta, const FrictionState* warm_start) const {
  return run(theta, bc_, true, problem_.models.viscosity, warm_start);
}

FlowResult FlowSolver::solve_stick(const Field& theta) const {
  const DirichletSet stick =
      velocity_constraints_stick(*disc_.velocity, problem_.lateral,
                                 tangential_part(problem_.friction.s, disc_.mesh->dim));
  return run(theta, stick, false, problem_.models.viscosity, nullptr);
}

FlowResult FlowSolver::run(const Field& theta, const DirichletSet& bc, bool with_friction,
                           const ViscosityModel& model, const FrictionState* warm) const {
  if (theta.space == nullptr || theta.space->mesh_ptr() != disc_.mesh ||
      theta.sp().kind() != SpaceKind::ScalarLinear) {
    throw InvalidInput("flow: temperature must live on the temperature space");
  }
  const Space& vel = *disc_.velocity;
  const int nv = vel.num_dofs();
  const int np = disc_.pressure->num_dofs();
  const int nq = static_cast<int>(omega_.size());
  const int nt = vel.components() - 1;
  const int deg = disc_.quadrature.cell_degree;
  const Vec3 s = tangential_part(problem_.friction.s, disc_.mesh->dim);

  bool friction_active = false;
  if (with_friction) {
    for (double kw : k_w_) friction_active = friction_active || kw > 0.0;
  }

  Vector w = pressure_weights_;
  if (cfg_.gauge == PressureGauge::PinFirst) {
    w.setZero();
    w[0] = 1.0;
  }
  const double volume = pressure_weights_.sum();

  FlowResult result;
  result.v = lifting_;
  bc.apply(result.v.values);
  result.pi = Field::zeros(disc_.pressure);
  result.lam.lambda.assign(nq, Vec3::Zero());
  if (warm != nullptr && static_cast<int>(warm->lambda.size()) == nq) {
    for (int q = 0; q < nq; ++q) result.lam.lambda[q] = project_unit_ball(warm->lambda[q]);
  }
  FlowReport& rep = result.report;

  // Friction load -Tr^T (w k lambda) on the velocity block.
  auto friction_load = [&](const std::vector<Vec3>& lam) {
    Vector z(static_cast<Eigen::Index>(nq) * nt);
    for (int q = 0; q < nq; ++q) {
      for (int t = 0; t < nt; ++t) z[q * nt + t] = k_w_[q] * lam[q][t];
    }
    return Vector(trace_.transpose() * z);
  };
  auto trace_of = [&](const Vector& x) {
    const Vector t = trace_ * x.head(nv);
    std::vector<Vec3> out(nq, Vec3::Zero());
    for (int q = 0; q < nq; ++q) {
      for (int c = 0; c < nt; ++c) out[q][c] = t[q * nt + c];
    }
    return out;
  };

  double tol_c = 0.0;
  bool uzawa_ok = !friction_active;
  Vector x_final;
  Saddle S;
  for (int m = 1; m <= cfg_.max_picard; ++m) {
    const SparseMatrix A = assemble_viscous(theta, result.v, model, deg);
    S.build(A, div_, pressure_weights_, w, bc);
    Vector x;
    if (!friction_active) {
      x = S.solve(body_load_, false);
    } else {
      if (m == 1) {
        const Vector x0 = S.solve(body_load_, false);
        double u_free = 0.0;
        for (const auto& vt : trace_of(x0)) u_free = std::max(u_free, (vt - s).norm());
        tol_c = tol_comp(u_free);
      }
      // Step from the largest eigenvalue of D Tr S^-1 Tr^T D, D = diag(w k).
      Vector z = Vector::Ones(static_cast<Eigen::Index>(nq) * nt);
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] += 0.1 * static_cast<double>(i % 7);
      double lmax = 0.0;
      for (int it = 0; it < 50; ++it) {
        z /= z.norm();
        std::vector<Vec3> zl(nq, Vec3::Zero());
        for (int q = 0; q < nq; ++q) {
          for (int t = 0; t < nt; ++t) zl[q][t] = z[q * nt + t];
        }
        const Vector y = S.solve(friction_load(zl), true);
        const Vector ty = trace_ * y.head(nv);
        Vector next(z.size());
        for (int q = 0; q < nq; ++q) {
          for (int t = 0; t < nt; ++t) next[q * nt + t] = k_w_[q] * ty[q * nt + t];
        }
        const double est = next.norm();
        const bool settled = std::abs(est - lmax) <= 1e-4 * est;
        lmax = est;
        z = next;
        if (settled || est == 0.0) break;
      }
      double tau = lmax > 0.0 ? cfg_.rho_scale / (1.1 * lmax) : 0.0;
      rep.uzawa_step = tau;

      // Accelerated projected gradient ascent on the dual, with restart.
      std::vector<Vec3> lam = result.lam.lambda;
      Vector x_lam = S.solve(body_load_ - friction_load(lam), false);
      std::vector<Vec3> y = lam;
      Vector x_y = x_lam;
      double t_k = 1.0;
      double best = std::numeric_limits<double>::infinity();
      double best_checkpoint = best;
      uzawa_ok = false;
      std::vector<double> rho(nq);
      for (int q = 0; q < nq; ++q) rho[q] = tau * k_w_[q];
      const double comp0 = complementarity_residual(trace_of(x_lam), FrictionState{lam}, s, k_w_);
      if (comp0 <= tol_c) {
        uzawa_ok = true;
        x = x_lam;
      }
      for (int it = 1; it <= cfg_.max_uzawa && !uzawa_ok; ++it) {
        const auto vt_y = trace_of(x_y);
        FrictionState next = uzawa_update(FrictionState{y}, vt_y, s, rho);
        const Vector x_next = S.solve(body_load_ - friction_load(next.lambda), false);
        const double comp = complementarity_residual(trace_of(x_next), next, s, k_w_);
        rep.uzawa_history.push_back(comp);
        ++rep.uzawa_iters;
        double restart = 0.0;
        for (int q = 0; q < nq; ++q) {
          if (rho[q] > 0.0) restart += (y[q] - next.lambda[q]).dot(next.lambda[q] - lam[q]) / rho[q];
        }
        if (comp <= tol_c) {
          lam = next.lambda;
          x = x_next;
          uzawa_ok = true;
          break;
        }
        best = std::min(best, comp);
        if (it % 100 == 0) {
          if (best > 0.9 * best_checkpoint) {
            for (double& r : rho) r *= 0.5;
            tau *= 0.5;
            restart = 1.0;
          }
          best_checkpoint = best;
        }
        if (restart > 0.0) {
          t_k = 1.0;
          y = next.lambda;
          x_y = x_next;
        } else {
          const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
          const double beta = (t_k - 1.0) / t_next;
          for (int q = 0; q < nq; ++q) y[q] = next.lambda[q] + beta * (next.lambda[q] - lam[q]);
          x_y = x_next + beta * (x_next - x_lam);
          t_k = t_next;
        }
        lam = next.lambda;
        x_lam = x_next;
      }
      if (!uzawa_ok) x = x_lam;
      result.lam.lambda = lam;
      rep.uzawa_step = tau;
    }

    Field v_new{disc_.velocity, x.head(nv)};
    const double nrm = norm_w1p(v_new, 2.0, deg);
    Field diff{disc_.velocity, v_new.values - result.v.values};
    const double dn = norm_w1p(diff, 2.0, deg);
    const double delta = nrm > 0.0 ? dn / nrm : dn;
    rep.picard_history.push_back(delta);
    rep.picard_iters = m;
    result.v = std::move(v_new);
    x_final = x;
    if (delta <= cfg_.tol_picard && uzawa_ok) {
      rep.converged = true;
      break;
    }
  }

  Vector pi = x_final.segment(nv, np);
  pi.array() -= pressure_weights_.dot(pi) / volume;
  result.pi.values = pi;

  {
    Vector load = body_load_;
    if (friction_active) load -= friction_load(result.lam.lambda);
    Vector b = S.rhs(load, false);
    const Vector r = S.reduced * x_final - b;
    rep.momentum_residual = r.lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
  }
  rep.pressure_mean = pressure_weights_.dot(pi);
  rep.tol_comp = tol_c;
  rep.complementarity = friction_active ? complementarity(result.v, result.lam) : 0.0;
  rep.max_lambda = result.lam.max_norm();
  rep.apriori = apriori_check(result.v, cfg_.p_exponent);
  if (rep.converged && rep.momentum_residual > cfg_.tol_mom) {
    rep.converged = false;
    rep.message = "momentum residual above tolerance";
  } else if (!rep.converged) {
    rep.message = uzawa_ok ? "Picard iteration did not converge" : "Uzawa iteration did not converge";
  } else {
    rep.message = "converged";
  }
  return result;
}

TractionReport FlowSolver::traction(const Field& v, const Field& pi, const Field& theta) const {
  TractionReport rep;
  int within = 0;
  rep.max_overshoot = -std::numeric_limits<double>::infinity();
  for (const auto& bp : omega_) {
    const Mat3 dv = deformation_tensor(v.gradient(bp.cell, bp.bary));
    const double m = mu(problem_.models.viscosity, theta.scalar(bp.cell, bp.bary),
                        v.value(bp.cell, bp.bary), frobenius(dv));
    const Mat3 sigma = 2.0 * m * dv - pi.scalar(bp.cell, bp.bary) * Mat3::Identity();
    const Vec3 sn = sigma * bp.normal;
    const double sn_n = sn.dot(bp.normal);
    const Vec3 st = sn - sn_n * bp.normal;
    const double k = problem_.friction.k_at(bp.point);
    rep.sigma_t.push_back(st);
    rep.sigma_n.push_back(sn_n);
    rep.max_overshoot = std::max(rep.max_overshoot, st.norm() - k);
    if (st.norm() <= 1.05 * k + 1e-14) ++within;
  }
  if (!omega_.empty()) rep.fraction_within = static_cast<double>(within) / omega_.size();
  else rep.max_overshoot = 0.0;
  return rep;
}

double FlowSolver::body_force_norm(double p) const {
  if (!problem_.body_force) return 0.0;
  const Mesh& mesh = *disc_.mesh;
  const SimplexRule rule = simplex_rule(mesh.dim, disc_.quadrature.cell_degree);
  double sup = 0.0;
  for (const auto& x : mesh.vertices) sup = std::max(sup, problem_.body_force(x).norm());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (const auto& b : rule.points) sup = std::max(sup, problem_.body_force(mesh.point(c, b)).norm());
  }
  return sup * mesh.h_max() * std::pow(mesh.volume(), 1.0 / p);
}

BoundReport FlowSolver::apriori_check(const Field& v, double p) const {
  if (!(p > 1.0)) throw InvalidInput("apriori_check: exponent must exceed 1");
  const double q = p / (p - 1.0);
  const int deg = disc_.quadrature.cell_degree;
  const double mu0 = problem_.models.viscosity.mu0;
  const double mu1 = problem_.models.viscosity.mu1;
  BoundReport r;
  r.norm_v = norm_w1p(v, 2.0, deg);
  r.norm_G = norm_w1p(lifting_, 2.0, deg);
  r.norm_G_q = norm_w1p(lifting_, q, deg);
  r.norm_f = body_force_norm(p);
  r.beta_emb = std::pow(disc_.mesh->volume(), 1.0 / q - 0.5);
  r.j_G = friction_functional(lifting_);
  const double b = 2.0 * (mu0 + mu1) * r.norm_G + r.beta_emb * r.norm_f;
  const double c = 2.0 * mu1 * r.norm_G * r.norm_G + r.norm_f * r.norm_G_q + r.j_G;
  r.lhs = mu0 * r.norm_v * r.norm_v;
  r.rhs = b * r.norm_v + c;
  r.slack = r.rhs - r.lhs;
  r.C_bound = (b + std::sqrt(b * b + 4.0 * mu0 * c)) / (2.0 * mu0);
  return r;
}

double FlowSolver::vi_residual(const FlowResult& result, const Field& theta) const {
  const int deg = disc_.quadrature.cell_degree;
  const SparseMatrix A = assemble_viscous(theta, result.v, problem_.models.viscosity, deg);
  const Vector av = A * result.v.values;
  const Vector r = av - div_.transpose() * result.pi.values - body_load_;
  const double scale =
      std::max({av.lpNorm<Eigen::Infinity>(), body_load_.lpNorm<Eigen::Infinity>(), 1e-300});
  const double eps = 1e-3 * std::max(result.v.values.lpNorm<Eigen::Infinity>(), 1e-3);
  const double j0 = friction_functional(result.v);
  std::vector<char> on_trace(r.size(), 0);
  for (int i : trace_dofs_) on_trace[i] = 1;
  double worst = std::numeric_limits<double>::infinity();
  Field probe = result.v;
  for (int i = 0; i < static_cast<int>(r.size()); ++i) {
    if (bc_.constrained(i)) continue;
    for (double sign : {1.0, -1.0}) {
      double dj = 0.0;
      if (on_trace[i]) {
        probe.values[i] += sign * eps;
        dj = friction_functional(probe) - j0;
        probe.values[i] = result.v.values[i];
      }
      worst = std::min(worst, (sign * eps * r[i] + dj) / (eps * scale));
    }
  }
  return worst;
}

}  // namespace thermoslip
