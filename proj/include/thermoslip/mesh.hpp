#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "thermoslip/types.hpp"

namespace thermoslip {

/// Boundary parts of the slab: the sliding bottom, the fixed top surface and
/// the lateral wall.
enum class BoundaryTag : std::uint8_t { Omega = 0, Gamma1 = 1, GammaL = 2 };

std::string_view to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(std::string_view name);

/// Height h(x') of the top surface over the bottom omega.
class HeightFunction {
 public:
  enum class Kind { Constant, Affine, Sampled };

  static HeightFunction constant(double h);
  /// h(x') = h0 + slope[0] x1 + slope[1] x2
  static HeightFunction affine(double h0, std::array<double, 2> slope);
  /// Samples on a uniform grid over [0, extent[0]] x [0, extent[1]], row-major
  /// in x1, bilinear in between. For a one-dimensional omega use counts[1] = 1.
  static HeightFunction sampled(std::vector<double> samples, std::array<int, 2> counts,
                                std::array<double, 2> extent);

  double operator()(double x1, double x2 = 0.0) const;
  Kind kind() const { return kind_; }

  double h0() const { return h0_; }
  const std::array<double, 2>& slope() const { return slope_; }
  const std::vector<double>& samples() const { return samples_; }
  const std::array<int, 2>& sample_counts() const { return counts_; }

 private:
  Kind kind_ = Kind::Constant;
  double h0_ = 1.0;
  std::array<double, 2> slope_{0.0, 0.0};
  std::vector<double> samples_;
  std::array<int, 2> counts_{1, 1};
  std::array<double, 2> extent_{1.0, 1.0};
};

struct DomainSpec {
  int dim = 2;
  std::array<double, 2> omega_extent{1.0, 1.0};
  HeightFunction height = HeightFunction::constant(1.0);
};

struct Facet {
  std::array<int, 3> vertices{-1, -1, -1};
  std::array<int, 2> cells{-1, -1};
  int local_in_cell = -1;  ///< index of the opposite vertex in cells[0]
  bool on_boundary = false;
  BoundaryTag tag = BoundaryTag::GammaL;
  Vec3 normal = Vec3::Zero();  ///< outward unit normal (boundary facets only)
  Vec3 centroid = Vec3::Zero();
  double measure = 0.0;
};

/// Simplicial mesh of the slab. Built once by build_slab_mesh and immutable
/// afterwards; safe to share between readers.
struct Mesh {
  int dim = 2;
  DomainSpec domain;
  std::array<int, 3> resolution{1, 1, 1};

  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;  ///< first dim+1 entries used
  std::vector<Facet> facets;
  std::vector<int> boundary_facets;       ///< indices into facets
  std::vector<std::array<int, 2>> edges;  ///< sorted vertex pairs
  std::vector<std::array<int, 6>> cell_edges;
  std::vector<std::array<int, 4>> cell_facets;  ///< facet opposite each local vertex

  std::vector<double> cell_volume;
  std::vector<std::array<Vec3, 4>> grad_lambda;  ///< gradients of barycentric coordinates

  int vertices_per_cell() const { return dim + 1; }
  int edges_per_cell() const { return dim == 2 ? 3 : 6; }
  int num_cells() const { return static_cast<int>(cells.size()); }

  Vec3 point(int cell, const Barycentric& bary) const;
  Vec3 cell_centroid(int cell) const;
  double volume() const;
  double h_max() const;
  double tagged_measure(BoundaryTag tag) const;
  std::vector<int> facets_with_tag(BoundaryTag tag) const;
};

/// Local vertex pairs for the edges of a simplex, in the order used by
/// cell_edges and by the quadratic basis.
std::span<const std::array<int, 2>> local_edges(int dim);

/// Structured grid over omega x [0,1], scaled vertically by h and split into
/// simplices. Throws InvalidInput on zero subdivisions or non-positive h.
Mesh build_slab_mesh(const DomainSpec& spec, std::span<const int> resolution);

/// Outward unit normal of a boundary facet. Throws InvalidInput for interior facets.
Vec3 outward_normal(const Mesh& mesh, int facet);

struct BoundaryQuadPoint {
  Vec3 point = Vec3::Zero();
  double weight = 0.0;
  Vec3 normal = Vec3::Zero();
  int facet = -1;
  int cell = -1;
  Barycentric bary{};  ///< position inside the adjacent cell
};

/// Facet quadrature over every facet carrying `tag`, exact to `degree`.
std::vector<BoundaryQuadPoint> boundary_quadrature(const Mesh& mesh, BoundaryTag tag,
                                                   int degree = 3);

}  // namespace thermoslip
