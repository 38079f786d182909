#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "thermoslip/mesh.hpp"
#include "thermoslip/quadrature.hpp"
#include "thermoslip/rheology.hpp"
#include "thermoslip/types.hpp"

namespace thermoslip {

enum class SpaceKind { VectorQuadratic, ScalarLinear };

/// Continuous Lagrange space on a simplicial mesh. Vector spaces store their
/// coefficients component-blocked: dof(node, c) = c * num_nodes() + node.
class Space {
 public:
  Space(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  SpaceKind kind() const { return kind_; }
  int components() const { return components_; }
  int nodes_per_cell() const { return nodes_per_cell_; }
  int num_nodes() const { return static_cast<int>(node_points_.size()); }
  int num_dofs() const { return components_ * num_nodes(); }
  int dof(int node, int comp) const { return comp * num_nodes() + node; }

  std::span<const int> cell_nodes(int cell) const {
    return {cell_nodes_.data() + static_cast<std::size_t>(cell) * nodes_per_cell_,
            static_cast<std::size_t>(nodes_per_cell_)};
  }
  const Vec3& node_point(int node) const { return node_points_[node]; }
  bool node_on(int node, BoundaryTag tag) const {
    return (node_tags_[node] >> static_cast<int>(tag)) & 1u;
  }

  /// Shape function values at a barycentric point; `out` has nodes_per_cell() entries.
  void basis_values(const Barycentric& bary, std::span<double> out) const;
  /// Physical gradients of the shape functions of `cell`.
  void basis_gradients(int cell, const Barycentric& bary, std::span<Vec3> out) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  SpaceKind kind_;
  int components_ = 1;
  int nodes_per_cell_ = 0;
  std::vector<int> cell_nodes_;
  std::vector<Vec3> node_points_;
  std::vector<unsigned> node_tags_;
};

using SpacePtr = std::shared_ptr<const Space>;

/// Coefficient vector over a space.
struct Field {
  SpacePtr space;
  Vector values;

  static Field zeros(SpacePtr space);
  const Space& sp() const { return *space; }

  /// Scalar value (scalar spaces) or velocity vector (vector spaces).
  Vec3 value(int cell, const Barycentric& bary) const;
  double scalar(int cell, const Barycentric& bary) const;
  /// Row c holds the gradient of component c; scalars use row 0.
  Mat3 gradient(int cell, const Barycentric& bary) const;
};

/// The three spaces of the problem on a shared mesh.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  SpacePtr velocity;
  SpacePtr pressure;
  SpacePtr temperature;
  QuadratureOptions quadrature;

  static Discretization build(std::shared_ptr<const Mesh> mesh, QuadratureOptions q = {});
};

/// Essential conditions on a space: dof indices with prescribed values.
struct DirichletSet {
  std::vector<int> dofs;
  std::vector<double> values;
  std::vector<char> mask;  ///< per dof, 1 when constrained

  bool constrained(int dof) const { return mask[dof] != 0; }
  int num_free() const { return static_cast<int>(mask.size() - dofs.size()); }
  void apply(Vector& x) const;
};

/// v = 0 on GAMMA1, v = g on GAMMAL, v.n = 0 on OMEGA. GAMMA1 wins at shared nodes.
DirichletSet velocity_constraints(const Space& velocity, const VectorFunction& g);
/// All tangential components on OMEGA fixed to s as well (strongly imposed stick).
DirichletSet velocity_constraints_stick(const Space& velocity, const VectorFunction& g,
                                        const Vec3& s);
/// theta = 0 on GAMMA1 and GAMMAL.
DirichletSet temperature_constraints(const Space& temperature);

Mat3 deformation_tensor(const Mat3& grad);
/// |A| = sqrt(a_ij a_ij)
inline double frobenius(const Mat3& a) { return std::sqrt(a.squaredNorm()); }

Field interpolate(SpacePtr space, const VectorFunction& f);
Field interpolate_scalar(SpacePtr space, const ScalarFunction& f);

/// Matrix of int 2 mu(theta, v_frozen, |D(v_frozen)|) D(phi_j) : D(phi_i).
SparseMatrix assemble_viscous(const Field& theta, const Field& v_frozen,
                              const ViscosityModel& model, int degree = 4);
/// Matrix (n_p x n_v) of int q_i div(phi_j).
SparseMatrix assemble_divergence(const Space& velocity, const Space& pressure, int degree = 4);
/// Scalar stiffness int coeff(x) grad(phi_j).grad(phi_i); coeff defaults to 1.
SparseMatrix assemble_stiffness(const Space& scalar, const ScalarFunction& coeff = {},
                                int degree = 4);
SparseMatrix assemble_mass(const Space& scalar, int degree = 4);
/// Mass matrix of the traces on facets tagged `tag`.
SparseMatrix assemble_boundary_mass(const Space& scalar, BoundaryTag tag, int degree = 3);
/// Vector of int f . phi_i.
Vector assemble_body_force(const Space& velocity, const VectorFunction& f, int degree = 4);
/// Vector of int phi_i (scalar space).
Vector integrate_basis(const Space& scalar, int degree = 4);

/// (int |grad u|^p)^(1/p) with the Frobenius norm for vector fields.
double norm_w1p(const Field& u, double p, int degree = 4);
/// (int |u|^p)^(1/p)
double norm_lp(const Field& u, double p, int degree = 4);
/// (int |D(v)|^p)^(1/p)
double deformation_norm_lp(const Field& v, double p, int degree = 4);
/// int |D(u)|^2 / int |grad u|^2. Throws InvalidInput for u = 0.
double korn_ratio(const Field& u, int degree = 4);

double integrate(const Field& u, int degree = 4);
double l2_error(const Field& u, const VectorFunction& exact, int degree = 6);
/// || grad(u - exact) ||_2 with the exact gradient supplied row-per-component.
double h1_error(const Field& u, const std::function<Mat3(const Vec3&)>& exact_grad,
                int degree = 6);

}  // namespace thermoslip
