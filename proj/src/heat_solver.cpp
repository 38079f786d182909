#include "thermoslip/heat_solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace thermoslip {

namespace {
constexpr int kMaxNodes = 10;
}

HeatSolver::HeatSolver(const Discretization& disc, MaterialModels models, HeatBCs bcs, HeatOptions opts)
    : disc_(disc), models_(std::move(models)), bcs_(std::move(bcs)), opts_(std::move(opts)) {
  if (!(models_.conductivity.k0 > 0.0)) throw InvalidInput("heat: k0 must be positive");
  if (opts_.artificial_diffusion < 0.0) throw InvalidInput("heat: artificial diffusion must be >= 0");
  const Space& ts = *disc_.temperature;
  bc_ = temperature_constraints(ts);
  const ConductivityModel K = models_.conductivity;
  const double extra = opts_.artificial_diffusion;
  diffusion_ = assemble_stiffness(ts, [K, extra](const Vec3& x) { return K(x) + extra; },
                                  disc_.quadrature.cell_degree);

  flux_load_ = Vector::Zero(ts.num_dofs());
  std::array<double, kMaxNodes> phi{};
  for (const auto& bp : boundary_quadrature(*disc_.mesh, BoundaryTag::Omega, disc_.quadrature.facet_degree)) {
    ts.basis_values(bp.bary, std::span<double>(phi.data(), ts.nodes_per_cell()));
    const double flux = bcs_.flux_at(bp.point);
    const auto nodes = ts.cell_nodes(bp.cell);
    for (int a = 0; a < ts.nodes_per_cell(); ++a) flux_load_[nodes[a]] += bp.weight * flux * phi[a];
  }
}

SparseMatrix HeatSolver::assemble_convection(const Field& v) const {
  const Space& ts = *disc_.temperature;
  const Mesh& mesh = *disc_.mesh;
  const SimplexRule rule = simplex_rule(mesh.dim, disc_.quadrature.cell_degree);
  const int npc = ts.nodes_per_cell();
  std::vector<Triplet> trips;
  std::array<double, kMaxNodes> phi{};
  std::array<Vec3, kMaxNodes> g;
  Eigen::MatrixXd local(npc, npc);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    local.setZero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Barycentric& b = rule.points[q];
      const double w = rule.weights[q] * mesh.cell_volume[c];
      const Vec3 vq = v.value(c, b);
      ts.basis_values(b, std::span<double>(phi.data(), npc));
      ts.basis_gradients(c, b, std::span<Vec3>(g.data(), npc));
      for (int a = 0; a < npc; ++a) {
        for (int bb = 0; bb < npc; ++bb) {
          local(a, bb) += 0.5 * w * (phi[a] * vq.dot(g[bb]) - phi[bb] * vq.dot(g[a]));
        }
      }
    }
    const auto nodes = ts.cell_nodes(c);
    for (int a = 0; a < npc; ++a) {
      for (int bb = 0; bb < npc; ++bb) trips.emplace_back(nodes[a], nodes[bb], local(a, bb));
    }
  }
  SparseMatrix C(ts.num_dofs(), ts.num_dofs());
  C.setFromTriplets(trips.begin(), trips.end());
  return C;
}

SparseMatrix HeatSolver::assemble_B(const Field& v) const {
  SparseMatrix B = diffusion_ + assemble_convection(v);
  return B;
}

Vector HeatSolver::assemble_L(const Field& eta, const Field& v) const {
  const Space& ts = *disc_.temperature;
  const Mesh& mesh = *disc_.mesh;
  const SimplexRule rule = simplex_rule(mesh.dim, disc_.quadrature.cell_degree);
  const int npc = ts.nodes_per_cell();
  Vector L = flux_load_;
  std::array<double, kMaxNodes> phi{};
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto nodes = ts.cell_nodes(c);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Barycentric& b = rule.points[q];
      const double w = rule.weights[q] * mesh.cell_volume[c];
      const double eq = eta.scalar(c, b);
      const Mat3 dv = deformation_tensor(v.gradient(c, b));
      double density = dissipation(models_.viscosity, eq, v.value(c, b), dv) + models_.source(eq);
      if (opts_.extra_source) density += opts_.extra_source(mesh.point(c, b));
      ts.basis_values(b, std::span<double>(phi.data(), npc));
      for (int a = 0; a < npc; ++a) L[nodes[a]] += w * density * phi[a];
    }
  }
  return L;
}

HeatResult HeatSolver::solve(const Field& eta, const Field& v) const {
  const Space& ts = *disc_.temperature;
  const int n = ts.num_dofs();
  const SparseMatrix B = assemble_B(v);
  Vector L = assemble_L(eta, v);

  std::vector<Triplet> trips;
  trips.reserve(B.nonZeros());
  for (int k = 0; k < B.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(B, k); it; ++it) {
      if (!bc_.constrained(static_cast<int>(it.row())) && !bc_.constrained(static_cast<int>(it.col()))) {
        trips.emplace_back(it.row(), it.col(), it.value());
      }
    }
  }
  for (int d : bc_.dofs) trips.emplace_back(d, d, 1.0);
  SparseMatrix R(n, n);
  R.setFromTriplets(trips.begin(), trips.end());
  R.makeCompressed();
  Vector rhs = L;
  for (int d : bc_.dofs) rhs[d] = 0.0;

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(R);
  lu.factorize(R);
  if (lu.info() != Eigen::Success) throw SolverFault("heat: system is singular");
  Vector x = lu.solve(rhs);
  if (!x.allFinite()) throw SolverFault("heat: non-finite solution");

  HeatResult out;
  out.theta = Field{disc_.temperature, x};
  HeatReport& rep = out.report;
  rep.linear_residual = (R * x - rhs).lpNorm<Eigen::Infinity>() / std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
  rep.added_diffusion = opts_.artificial_diffusion;
  rep.free_dofs = bc_.num_free();
  double bal = 0.0, scale = 0.0;
  const Vector Bx = B * x;
  for (int i = 0; i < n; ++i) {
    if (bc_.constrained(i)) continue;
    bal += Bx[i] - L[i];
    scale += std::abs(L[i]);
  }
  rep.energy_balance = bal;
  rep.energy_scale = scale;

  // Coercivity probes on a fixed pseudo-random family of constrained fields.
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double gap = std::numeric_limits<double>::infinity();
  const SparseMatrix K1 = assemble_stiffness(ts, {}, disc_.quadrature.cell_degree);
  for (int p = 0; p < 4; ++p) {
    Vector t(n);
    for (int i = 0; i < n; ++i) t[i] = bc_.constrained(i) ? 0.0 : uni(rng);
    const double grad2 = t.dot(K1 * t);
    if (grad2 <= 0.0) continue;
    gap = std::min(gap, t.dot(B * t) / grad2 - models_.conductivity.k0);
  }
  rep.coercivity_gap = std::isfinite(gap) ? gap : 0.0;
  return out;
}

std::pair<double, double> HeatSolver::energy_balance(const Field& theta, const Field& eta,
                                                     const Field& v) const {
  const Vector L = assemble_L(eta, v);
  const Vector r = assemble_B(v) * theta.values - L;
  double bal = 0.0, scale = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    if (bc_.constrained(i)) continue;
    bal += r[i];
    scale += std::abs(L[i]);
  }
  return {bal, scale};
}

}  // namespace thermoslip
