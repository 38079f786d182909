#include "thermoslip/fem.hpp"

#include <algorithm>
#include <cmath>

namespace thermoslip {

namespace {

constexpr int kMaxNodes = 10;

// Shape function values at every point of a rule, shared by all cells.
std::vector<std::array<double, kMaxNodes>> tabulate(const Space& space, const SimplexRule& rule) {
  std::vector<std::array<double, kMaxNodes>> table(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    space.basis_values(rule.points[q], std::span<double>(table[q].data(), space.nodes_per_cell()));
  }
  return table;
}

void require_same_mesh(const Field& a, const Field& b) {
  if (a.space->mesh_ptr() != b.space->mesh_ptr()) {
    throw InvalidInput("fields live on different meshes");
  }
}

}  // namespace

Space::Space(std::shared_ptr<const Mesh> mesh, SpaceKind kind) : mesh_(std::move(mesh)), kind_(kind) {
  const Mesh& m = *mesh_;
  const int nv = static_cast<int>(m.vertices.size());
  const int vpc = m.vertices_per_cell();
  if (kind_ == SpaceKind::ScalarLinear) {
    components_ = 1;
    nodes_per_cell_ = vpc;
    node_points_ = m.vertices;
    cell_nodes_.reserve(m.cells.size() * vpc);
    for (const auto& cell : m.cells) {
      for (int i = 0; i < vpc; ++i) cell_nodes_.push_back(cell[i]);
    }
  } else {
    components_ = m.dim;
    nodes_per_cell_ = vpc + m.edges_per_cell();
    node_points_ = m.vertices;
    for (const auto& e : m.edges) node_points_.push_back(0.5 * (m.vertices[e[0]] + m.vertices[e[1]]));
    cell_nodes_.reserve(m.cells.size() * nodes_per_cell_);
    for (std::size_t c = 0; c < m.cells.size(); ++c) {
      for (int i = 0; i < vpc; ++i) cell_nodes_.push_back(m.cells[c][i]);
      for (int e = 0; e < m.edges_per_cell(); ++e) cell_nodes_.push_back(nv + m.cell_edges[c][e]);
    }
  }

  node_tags_.assign(node_points_.size(), 0u);
  const auto ledges = local_edges(m.dim);
  for (int fi : m.boundary_facets) {
    const Facet& f = m.facets[fi];
    const unsigned bit = 1u << static_cast<int>(f.tag);
    for (int k = 0; k < m.dim; ++k) node_tags_[f.vertices[k]] |= bit;
    if (kind_ != SpaceKind::VectorQuadratic) continue;
    const int c = f.cells[0];
    for (std::size_t e = 0; e < ledges.size(); ++e) {
      // Edges of the facet are exactly the cell edges avoiding the opposite vertex.
      if (ledges[e][0] == f.local_in_cell || ledges[e][1] == f.local_in_cell) continue;
      node_tags_[nv + m.cell_edges[c][e]] |= bit;
    }
  }
}

void Space::basis_values(const Barycentric& bary, std::span<double> out) const {
  const int vpc = mesh_->vertices_per_cell();
  if (kind_ == SpaceKind::ScalarLinear) {
    for (int i = 0; i < vpc; ++i) out[i] = bary[i];
    return;
  }
  for (int i = 0; i < vpc; ++i) out[i] = bary[i] * (2.0 * bary[i] - 1.0);
  const auto ledges = local_edges(mesh_->dim);
  for (std::size_t e = 0; e < ledges.size(); ++e) {
    out[vpc + e] = 4.0 * bary[ledges[e][0]] * bary[ledges[e][1]];
  }
}

void Space::basis_gradients(int cell, const Barycentric& bary, std::span<Vec3> out) const {
  const auto& gl = mesh_->grad_lambda[cell];
  const int vpc = mesh_->vertices_per_cell();
  if (kind_ == SpaceKind::ScalarLinear) {
    for (int i = 0; i < vpc; ++i) out[i] = gl[i];
    return;
  }
  for (int i = 0; i < vpc; ++i) out[i] = (4.0 * bary[i] - 1.0) * gl[i];
  const auto ledges = local_edges(mesh_->dim);
  for (std::size_t e = 0; e < ledges.size(); ++e) {
    const int a = ledges[e][0], b = ledges[e][1];
    out[vpc + e] = 4.0 * (bary[b] * gl[a] + bary[a] * gl[b]);
  }
}

Field Field::zeros(SpacePtr space) {
  Field f;
  f.values = Vector::Zero(space->num_dofs());
  f.space = std::move(space);
  return f;
}

Vec3 Field::value(int cell, const Barycentric& bary) const {
  std::array<double, kMaxNodes> phi{};
  const Space& s = *space;
  s.basis_values(bary, std::span<double>(phi.data(), s.nodes_per_cell()));
  const auto nodes = s.cell_nodes(cell);
  Vec3 out = Vec3::Zero();
  for (int c = 0; c < s.components(); ++c) {
    for (int a = 0; a < s.nodes_per_cell(); ++a) out[c] += values[s.dof(nodes[a], c)] * phi[a];
  }
  return out;
}

double Field::scalar(int cell, const Barycentric& bary) const { return value(cell, bary)[0]; }

Mat3 Field::gradient(int cell, const Barycentric& bary) const {
  std::array<Vec3, kMaxNodes> grads;
  const Space& s = *space;
  s.basis_gradients(cell, bary, std::span<Vec3>(grads.data(), s.nodes_per_cell()));
  const auto nodes = s.cell_nodes(cell);
  Mat3 g = Mat3::Zero();
  for (int c = 0; c < s.components(); ++c) {
    for (int a = 0; a < s.nodes_per_cell(); ++a) {
      g.row(c) += values[s.dof(nodes[a], c)] * grads[a].transpose();
    }
  }
  return g;
}

Discretization Discretization::build(std::shared_ptr<const Mesh> mesh, QuadratureOptions q) {
  Discretization d;
  d.mesh = mesh;
  d.velocity = std::make_shared<const Space>(mesh, SpaceKind::VectorQuadratic);
  d.pressure = std::make_shared<const Space>(mesh, SpaceKind::ScalarLinear);
  d.temperature = d.pressure;
  d.quadrature = q;
  return d;
}

void DirichletSet::apply(Vector& x) const {
  for (std::size_t i = 0; i < dofs.size(); ++i) x[dofs[i]] = values[i];
}

namespace {

DirichletSet make_velocity_constraints(const Space& space, const VectorFunction& g,
                                       const Vec3* stick) {
  if (space.kind() != SpaceKind::VectorQuadratic) throw InvalidInput("velocity constraints need a vector space");
  DirichletSet set;
  set.mask.assign(space.num_dofs(), 0);
  const int d = space.components();
  auto fix = [&](int node, int comp, double value) {
    const int dof = space.dof(node, comp);
    set.mask[dof] = 1;
    set.dofs.push_back(dof);
    set.values.push_back(value);
  };
  for (int n = 0; n < space.num_nodes(); ++n) {
    if (space.node_on(n, BoundaryTag::Gamma1)) {
      for (int c = 0; c < d; ++c) fix(n, c, 0.0);
    } else if (space.node_on(n, BoundaryTag::GammaL)) {
      const Vec3 value = g ? g(space.node_point(n)) : Vec3::Zero();
      for (int c = 0; c < d; ++c) fix(n, c, value[c]);
    } else if (space.node_on(n, BoundaryTag::Omega)) {
      if (stick != nullptr) {
        for (int c = 0; c + 1 < d; ++c) fix(n, c, (*stick)[c]);
      }
      fix(n, d - 1, 0.0);
    }
  }
  return set;
}

}  // namespace

DirichletSet velocity_constraints(const Space& velocity, const VectorFunction& g) {
  return make_velocity_constraints(velocity, g, nullptr);
}

DirichletSet velocity_constraints_stick(const Space& velocity, const VectorFunction& g,
                                        const Vec3& s) {
  return make_velocity_constraints(velocity, g, &s);
}

DirichletSet temperature_constraints(const Space& temperature) {
  DirichletSet set;
  set.mask.assign(temperature.num_dofs(), 0);
  for (int n = 0; n < temperature.num_nodes(); ++n) {
    if (temperature.node_on(n, BoundaryTag::Gamma1) || temperature.node_on(n, BoundaryTag::GammaL)) {
      set.mask[n] = 1;
      set.dofs.push_back(n);
      set.values.push_back(0.0);
    }
  }
  return set;
}

Mat3 deformation_tensor(const Mat3& grad) { return 0.5 * (grad + grad.transpose()); }

Field interpolate(SpacePtr space, const VectorFunction& f) {
  Field out = Field::zeros(space);
  for (int n = 0; n < space->num_nodes(); ++n) {
    const Vec3 value = f(space->node_point(n));
    for (int c = 0; c < space->components(); ++c) out.values[space->dof(n, c)] = value[c];
  }
  return out;
}

Field interpolate_scalar(SpacePtr space, const ScalarFunction& f) {
  return interpolate(std::move(space), [&f](const Vec3& x) { return Vec3(f(x), 0.0, 0.0); });
}

SparseMatrix assemble_viscous(const Field& theta, const Field& v_frozen, const ViscosityModel& model,
                              int degree) {
  require_same_mesh(theta, v_frozen);
  const Space& vs = v_frozen.sp();
  const Mesh& mesh = vs.mesh();
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  const int npc = vs.nodes_per_cell();
  const int d = vs.components();
  const int nloc = npc * d;
  const double slack = 1e-12 * std::max(std::abs(model.mu1), 1.0);

  std::vector<Triplet> trips;
  trips.reserve(mesh.cells.size() * nloc * nloc);
  Eigen::MatrixXd local(nloc, nloc);
  std::array<Vec3, kMaxNodes> g;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    local.setZero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Barycentric& b = rule.points[q];
      const double w = rule.weights[q] * mesh.cell_volume[c];
      const Mat3 dv = deformation_tensor(v_frozen.gradient(c, b));
      const double m = mu(model, theta.scalar(c, b), v_frozen.value(c, b), frobenius(dv));
      if (!(m >= model.mu0 - slack && m <= model.mu1 + slack)) {
        throw ModelViolation("assemble_viscous: viscosity outside [mu0, mu1]");
      }
      vs.basis_gradients(c, b, std::span<Vec3>(g.data(), npc));
      const double coef = 2.0 * m * w;
      // D(e_ci g_a) : D(e_cj g_b) = (delta_ij g_a.g_b + (g_a)_j (g_b)_i) / 2
      for (int a = 0; a < npc; ++a) {
        for (int bb = 0; bb < npc; ++bb) {
          const double dot = g[a].dot(g[bb]);
          for (int ci = 0; ci < d; ++ci) {
            for (int cj = 0; cj < d; ++cj) {
              double val = g[a][cj] * g[bb][ci];
              if (ci == cj) val += dot;
              local(ci * npc + a, cj * npc + bb) += 0.5 * coef * val;
            }
          }
        }
      }
    }
    const auto nodes = vs.cell_nodes(c);
    for (int ci = 0; ci < d; ++ci) {
      for (int a = 0; a < npc; ++a) {
        const int row = vs.dof(nodes[a], ci);
        for (int cj = 0; cj < d; ++cj) {
          for (int bb = 0; bb < npc; ++bb) {
            trips.emplace_back(row, vs.dof(nodes[bb], cj), local(ci * npc + a, cj * npc + bb));
          }
        }
      }
    }
  }
  SparseMatrix mat(vs.num_dofs(), vs.num_dofs());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

SparseMatrix assemble_divergence(const Space& velocity, const Space& pressure, int degree) {
  const Mesh& mesh = velocity.mesh();
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  const auto ptab = tabulate(pressure, rule);
  const int npv = velocity.nodes_per_cell();
  const int npp = pressure.nodes_per_cell();
  const int d = velocity.components();
  std::vector<Triplet> trips;
  std::array<Vec3, kMaxNodes> g;
  Eigen::MatrixXd local(npp, npv * d);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    local.setZero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * mesh.cell_volume[c];
      velocity.basis_gradients(c, rule.points[q], std::span<Vec3>(g.data(), npv));
      for (int i = 0; i < npp; ++i) {
        for (int cc = 0; cc < d; ++cc) {
          for (int a = 0; a < npv; ++a) local(i, cc * npv + a) += w * ptab[q][i] * g[a][cc];
        }
      }
    }
    const auto pn = pressure.cell_nodes(c);
    const auto vn = velocity.cell_nodes(c);
    for (int i = 0; i < npp; ++i) {
      for (int cc = 0; cc < d; ++cc) {
        for (int a = 0; a < npv; ++a) {
          trips.emplace_back(pressure.dof(pn[i], 0), velocity.dof(vn[a], cc), local(i, cc * npv + a));
        }
      }
    }
  }
  SparseMatrix mat(pressure.num_dofs(), velocity.num_dofs());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

SparseMatrix assemble_stiffness(const Space& scalar, const ScalarFunction& coeff, int degree) {
  const Mesh& mesh = scalar.mesh();
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  const int npc = scalar.nodes_per_cell();
  std::vector<Triplet> trips;
  std::array<Vec3, kMaxNodes> g;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(npc, npc);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      double w = rule.weights[q] * mesh.cell_volume[c];
      if (coeff) w *= coeff(mesh.point(c, rule.points[q]));
      scalar.basis_gradients(c, rule.points[q], std::span<Vec3>(g.data(), npc));
      for (int a = 0; a < npc; ++a) {
        for (int b = 0; b < npc; ++b) local(a, b) += w * g[a].dot(g[b]);
      }
    }
    const auto nodes = scalar.cell_nodes(c);
    for (int a = 0; a < npc; ++a) {
      for (int b = 0; b < npc; ++b) trips.emplace_back(nodes[a], nodes[b], local(a, b));
    }
  }
  SparseMatrix mat(scalar.num_dofs(), scalar.num_dofs());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

SparseMatrix assemble_mass(const Space& scalar, int degree) {
  const Mesh& mesh = scalar.mesh();
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  const auto tab = tabulate(scalar, rule);
  const int npc = scalar.nodes_per_cell();
  std::vector<Triplet> trips;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto nodes = scalar.cell_nodes(c);
    for (int a = 0; a < npc; ++a) {
      for (int b = 0; b < npc; ++b) {
        double v = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) v += rule.weights[q] * tab[q][a] * tab[q][b];
        trips.emplace_back(nodes[a], nodes[b], v * mesh.cell_volume[c]);
      }
    }
  }
  SparseMatrix mat(scalar.num_dofs(), scalar.num_dofs());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

SparseMatrix assemble_boundary_mass(const Space& scalar, BoundaryTag tag, int degree) {
  const auto pts = boundary_quadrature(scalar.mesh(), tag, degree);
  const int npc = scalar.nodes_per_cell();
  std::vector<Triplet> trips;
  std::array<double, kMaxNodes> phi{};
  for (const auto& bp : pts) {
    scalar.basis_values(bp.bary, std::span<double>(phi.data(), npc));
    const auto nodes = scalar.cell_nodes(bp.cell);
    for (int a = 0; a < npc; ++a) {
      for (int b = 0; b < npc; ++b) {
        if (phi[a] != 0.0 && phi[b] != 0.0) trips.emplace_back(nodes[a], nodes[b], bp.weight * phi[a] * phi[b]);
      }
    }
  }
  SparseMatrix mat(scalar.num_dofs(), scalar.num_dofs());
  mat.setFromTriplets(trips.begin(), trips.end());
  return mat;
}

Vector assemble_body_force(const Space& velocity, const VectorFunction& f, int degree) {
  const Mesh& mesh = velocity.mesh();
  Vector out = Vector::Zero(velocity.num_dofs());
  if (!f) return out;
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  const auto tab = tabulate(velocity, rule);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto nodes = velocity.cell_nodes(c);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * mesh.cell_volume[c];
      const Vec3 fx = f(mesh.point(c, rule.points[q]));
      for (int cc = 0; cc < velocity.components(); ++cc) {
        for (int a = 0; a < velocity.nodes_per_cell(); ++a) {
          out[velocity.dof(nodes[a], cc)] += w * fx[cc] * tab[q][a];
        }
      }
    }
  }
  return out;
}

Vector integrate_basis(const Space& scalar, int degree) {
  const Mesh& mesh = scalar.mesh();
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  const auto tab = tabulate(scalar, rule);
  Vector out = Vector::Zero(scalar.num_dofs());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto nodes = scalar.cell_nodes(c);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      for (int a = 0; a < scalar.nodes_per_cell(); ++a) {
        out[nodes[a]] += rule.weights[q] * mesh.cell_volume[c] * tab[q][a];
      }
    }
  }
  return out;
}

namespace {

template <typename Integrand>
double integrate_cells(const Mesh& mesh, int degree, Integrand&& fn) {
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      sum += rule.weights[q] * mesh.cell_volume[c] * fn(c, rule.points[q]);
    }
  }
  return sum;
}

}  // namespace

double norm_w1p(const Field& u, double p, int degree) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("norm_w1p: exponent must be finite and >= 1");
  const double s = integrate_cells(u.sp().mesh(), degree, [&](int c, const Barycentric& b) {
    return std::pow(frobenius(u.gradient(c, b)), p);
  });
  return std::pow(s, 1.0 / p);
}

double norm_lp(const Field& u, double p, int degree) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("norm_lp: exponent must be finite and >= 1");
  const double s = integrate_cells(u.sp().mesh(), degree, [&](int c, const Barycentric& b) {
    return std::pow(u.value(c, b).norm(), p);
  });
  return std::pow(s, 1.0 / p);
}

double deformation_norm_lp(const Field& v, double p, int degree) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("deformation_norm_lp: bad exponent");
  const double s = integrate_cells(v.sp().mesh(), degree, [&](int c, const Barycentric& b) {
    return std::pow(frobenius(deformation_tensor(v.gradient(c, b))), p);
  });
  return std::pow(s, 1.0 / p);
}

double korn_ratio(const Field& u, int degree) {
  double num = 0.0, den = 0.0;
  const Mesh& mesh = u.sp().mesh();
  const SimplexRule rule = simplex_rule(mesh.dim, degree);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * mesh.cell_volume[c];
      const Mat3 g = u.gradient(c, rule.points[q]);
      num += w * deformation_tensor(g).squaredNorm();
      den += w * g.squaredNorm();
    }
  }
  if (!(den > 0.0)) throw InvalidInput("korn_ratio: field has zero gradient");
  return num / den;
}

double integrate(const Field& u, int degree) {
  return integrate_cells(u.sp().mesh(), degree,
                         [&](int c, const Barycentric& b) { return u.scalar(c, b); });
}

double l2_error(const Field& u, const VectorFunction& exact, int degree) {
  const Mesh& mesh = u.sp().mesh();
  const int ncomp = u.sp().components();
  const double s = integrate_cells(mesh, degree, [&](int c, const Barycentric& b) {
    const Vec3 diff = u.value(c, b) - exact(mesh.point(c, b));
    return diff.head(ncomp).squaredNorm();
  });
  return std::sqrt(s);
}

double h1_error(const Field& u, const std::function<Mat3(const Vec3&)>& exact_grad, int degree) {
  const Mesh& mesh = u.sp().mesh();
  const int ncomp = u.sp().components();
  const double s = integrate_cells(mesh, degree, [&](int c, const Barycentric& b) {
    const Mat3 diff = u.gradient(c, b) - exact_grad(mesh.point(c, b));
    return diff.topRows(ncomp).squaredNorm();
  });
  return std::sqrt(s);
}

}  // namespace thermoslip
