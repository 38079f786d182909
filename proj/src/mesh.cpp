#include "thermoslip/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "thermoslip/quadrature.hpp"

namespace thermoslip {

namespace {

constexpr std::array<std::array<int, 2>, 3> kTriangleEdges{{{0, 1}, {0, 2}, {1, 2}}};
constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

double signed_volume(const Mesh& mesh, const std::array<int, 4>& cell) {
  const Vec3& x0 = mesh.vertices[cell[0]];
  if (mesh.dim == 2) {
    const Vec3 a = mesh.vertices[cell[1]] - x0;
    const Vec3 b = mesh.vertices[cell[2]] - x0;
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  const Vec3 a = mesh.vertices[cell[1]] - x0;
  const Vec3 b = mesh.vertices[cell[2]] - x0;
  const Vec3 c = mesh.vertices[cell[3]] - x0;
  return a.dot(b.cross(c)) / 6.0;
}

void compute_cell_geometry(Mesh& mesh) {
  const int d = mesh.dim;
  mesh.cell_volume.resize(mesh.cells.size());
  mesh.grad_lambda.resize(mesh.cells.size());
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    Eigen::MatrixXd jac(d, d);
    for (int k = 0; k < d; ++k) {
      const Vec3 e = mesh.vertices[cell[k + 1]] - mesh.vertices[cell[0]];
      for (int r = 0; r < d; ++r) jac(r, k) = e[r];
    }
    const Eigen::MatrixXd inv = jac.inverse();
    std::array<Vec3, 4> grads{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    for (int k = 0; k < d; ++k) {
      for (int r = 0; r < d; ++r) grads[k + 1][r] = inv(k, r);
      grads[0] -= grads[k + 1];
    }
    mesh.grad_lambda[c] = grads;
    mesh.cell_volume[c] = signed_volume(mesh, cell);
  }
}

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Omega:
      return "OMEGA";
    case BoundaryTag::Gamma1:
      return "GAMMA1";
    case BoundaryTag::GammaL:
      return "GAMMAL";
  }
  return "?";
}

BoundaryTag boundary_tag_from_string(std::string_view name) {
  if (name == "OMEGA") return BoundaryTag::Omega;
  if (name == "GAMMA1") return BoundaryTag::Gamma1;
  if (name == "GAMMAL") return BoundaryTag::GammaL;
  throw InvalidInput("unknown boundary tag '" + std::string(name) + "'");
}

HeightFunction HeightFunction::constant(double h) {
  HeightFunction f;
  f.kind_ = Kind::Constant;
  f.h0_ = h;
  return f;
}

HeightFunction HeightFunction::affine(double h0, std::array<double, 2> slope) {
  HeightFunction f;
  f.kind_ = Kind::Affine;
  f.h0_ = h0;
  f.slope_ = slope;
  return f;
}

HeightFunction HeightFunction::sampled(std::vector<double> samples, std::array<int, 2> counts,
                                       std::array<double, 2> extent) {
  if (counts[0] < 2 || counts[1] < 1) throw InvalidInput("height samples: need at least 2 along x1");
  if (static_cast<std::size_t>(counts[0]) * counts[1] != samples.size()) {
    throw InvalidInput("height samples: count does not match grid");
  }
  HeightFunction f;
  f.kind_ = Kind::Sampled;
  f.samples_ = std::move(samples);
  f.counts_ = counts;
  f.extent_ = extent;
  return f;
}

double HeightFunction::operator()(double x1, double x2) const {
  switch (kind_) {
    case Kind::Constant:
      return h0_;
    case Kind::Affine:
      return h0_ + slope_[0] * x1 + slope_[1] * x2;
    case Kind::Sampled: {
      auto locate = [](double x, double extent, int n, int& i, double& t) {
        if (n == 1) {
          i = 0;
          t = 0.0;
          return;
        }
        const double s = std::clamp(x / extent, 0.0, 1.0) * (n - 1);
        i = std::min(static_cast<int>(std::floor(s)), n - 2);
        t = s - i;
      };
      int i = 0, j = 0;
      double tx = 0.0, ty = 0.0;
      locate(x1, extent_[0], counts_[0], i, tx);
      locate(x2, extent_[1], counts_[1], j, ty);
      auto at = [&](int a, int b) { return samples_[static_cast<std::size_t>(b) * counts_[0] + a]; };
      if (counts_[1] == 1) return (1.0 - tx) * at(i, 0) + tx * at(i + 1, 0);
      return (1.0 - tx) * (1.0 - ty) * at(i, j) + tx * (1.0 - ty) * at(i + 1, j) +
             (1.0 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1);
    }
  }
  return h0_;
}

std::span<const std::array<int, 2>> local_edges(int dim) {
  if (dim == 2) return {kTriangleEdges.data(), kTriangleEdges.size()};
  return {kTetEdges.data(), kTetEdges.size()};
}

Vec3 Mesh::point(int cell, const Barycentric& bary) const {
  Vec3 x = Vec3::Zero();
  for (int i = 0; i <= dim; ++i) x += bary[i] * vertices[cells[cell][i]];
  return x;
}

Vec3 Mesh::cell_centroid(int cell) const {
  Vec3 x = Vec3::Zero();
  for (int i = 0; i <= dim; ++i) x += vertices[cells[cell][i]];
  return x / (dim + 1);
}

double Mesh::volume() const {
  double v = 0.0;
  for (double c : cell_volume) v += c;
  return v;
}

double Mesh::h_max() const {
  double h = 0.0;
  for (const auto& x : vertices) h = std::max(h, x[dim - 1]);
  return h;
}

double Mesh::tagged_measure(BoundaryTag tag) const {
  double m = 0.0;
  for (int f : boundary_facets) {
    if (facets[f].tag == tag) m += facets[f].measure;
  }
  return m;
}

std::vector<int> Mesh::facets_with_tag(BoundaryTag tag) const {
  std::vector<int> out;
  for (int f : boundary_facets) {
    if (facets[f].tag == tag) out.push_back(f);
  }
  return out;
}

Mesh build_slab_mesh(const DomainSpec& spec, std::span<const int> resolution) {
  if (spec.dim != 2 && spec.dim != 3) throw InvalidInput("build_slab_mesh: dim must be 2 or 3");
  if (static_cast<int>(resolution.size()) != spec.dim) {
    throw InvalidInput("build_slab_mesh: need one subdivision count per axis");
  }
  for (int n : resolution) {
    if (n < 1) throw InvalidInput("build_slab_mesh: subdivision counts must be >= 1");
  }
  for (int a = 0; a < spec.dim - 1; ++a) {
    if (!(spec.omega_extent[a] > 0.0)) throw InvalidInput("build_slab_mesh: omega extent must be positive");
  }

  Mesh mesh;
  mesh.dim = spec.dim;
  mesh.domain = spec;
  const int d = spec.dim;
  const int nx = resolution[0];
  const int ny = d == 3 ? resolution[1] : 1;
  const int nz = resolution[d - 1];
  mesh.resolution = {nx, d == 3 ? ny : nz, d == 3 ? nz : 1};

  std::vector<char> on_bottom, on_top;

  if (d == 2) {
    const double lx = spec.omega_extent[0];
    for (int j = 0; j <= nz; ++j) {
      for (int i = 0; i <= nx; ++i) {
        const double x1 = lx * i / nx;
        const double h = spec.height(x1);
        if (!(h > 0.0)) throw InvalidInput("build_slab_mesh: height must be positive on the grid");
        mesh.vertices.emplace_back(x1, h * j / nz, 0.0);
        on_bottom.push_back(j == 0);
        on_top.push_back(j == nz);
      }
    }
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < nz; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
        mesh.cells.push_back({v00, v10, v11, -1});
        mesh.cells.push_back({v00, v11, v01, -1});
      }
    }
  } else {
    const double lx = spec.omega_extent[0], ly = spec.omega_extent[1];
    for (int k = 0; k <= nz; ++k) {
      for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
          const double x1 = lx * i / nx, x2 = ly * j / ny;
          const double h = spec.height(x1, x2);
          if (!(h > 0.0)) throw InvalidInput("build_slab_mesh: height must be positive on the grid");
          mesh.vertices.emplace_back(x1, x2, h * k / nz);
          on_bottom.push_back(k == 0);
          on_top.push_back(k == nz);
        }
      }
    }
    auto vid = [nx, ny](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
    static constexpr std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (int k = 0; k < nz; ++k) {
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          for (const auto& p : perms) {
            std::array<int, 3> off{0, 0, 0};
            std::array<int, 4> tet{};
            tet[0] = vid(i, j, k);
            for (int s = 0; s < 3; ++s) {
              off[p[s]] = 1;
              tet[s + 1] = vid(i + off[0], j + off[1], k + off[2]);
            }
            mesh.cells.push_back(tet);
          }
        }
      }
    }
  }

  for (auto& cell : mesh.cells) {
    double vol = signed_volume(mesh, cell);
    if (d == 3 && vol < 0.0) {
      std::swap(cell[2], cell[3]);
      vol = -vol;
    }
    if (!(vol > 0.0)) throw InvalidInput("build_slab_mesh: height function produces inverted cells");
  }
  compute_cell_geometry(mesh);

  // Edges.
  std::map<std::array<int, 2>, int> edge_ids;
  const auto ledges = local_edges(d);
  mesh.cell_edges.assign(mesh.cells.size(), {-1, -1, -1, -1, -1, -1});
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    for (std::size_t e = 0; e < ledges.size(); ++e) {
      std::array<int, 2> key{mesh.cells[c][ledges[e][0]], mesh.cells[c][ledges[e][1]]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(mesh.edges.size()));
      if (inserted) mesh.edges.push_back(key);
      mesh.cell_edges[c][e] = it->second;
    }
  }

  // Facets.
  std::map<std::array<int, 3>, int> facet_ids;
  mesh.cell_facets.assign(mesh.cells.size(), {-1, -1, -1, -1});
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    for (int i = 0; i <= d; ++i) {
      std::array<int, 3> key{-1, -1, -1};
      int n = 0;
      for (int k = 0; k <= d; ++k) {
        if (k != i) key[n++] = mesh.cells[c][k];
      }
      std::sort(key.begin(), key.begin() + d);
      auto [it, inserted] = facet_ids.try_emplace(key, static_cast<int>(mesh.facets.size()));
      if (inserted) {
        Facet f;
        f.vertices = key;
        f.cells[0] = static_cast<int>(c);
        f.local_in_cell = i;
        mesh.facets.push_back(f);
      } else {
        mesh.facets[it->second].cells[1] = static_cast<int>(c);
      }
      mesh.cell_facets[c][i] = it->second;
    }
  }

  for (std::size_t fi = 0; fi < mesh.facets.size(); ++fi) {
    Facet& f = mesh.facets[fi];
    Vec3 centroid = Vec3::Zero();
    for (int k = 0; k < d; ++k) centroid += mesh.vertices[f.vertices[k]];
    f.centroid = centroid / d;
    Vec3 n;
    if (d == 2) {
      const Vec3 t = mesh.vertices[f.vertices[1]] - mesh.vertices[f.vertices[0]];
      f.measure = t.norm();
      n = Vec3(t.y(), -t.x(), 0.0) / f.measure;
    } else {
      const Vec3 a = mesh.vertices[f.vertices[1]] - mesh.vertices[f.vertices[0]];
      const Vec3 b = mesh.vertices[f.vertices[2]] - mesh.vertices[f.vertices[0]];
      const Vec3 cr = a.cross(b);
      f.measure = 0.5 * cr.norm();
      n = cr.normalized();
    }
    f.on_boundary = f.cells[1] < 0;
    if (!f.on_boundary) continue;
    const Vec3& opposite = mesh.vertices[mesh.cells[f.cells[0]][f.local_in_cell]];
    if (n.dot(f.centroid - opposite) < 0.0) n = -n;
    f.normal = n;

    bool all_bottom = true, all_top = true;
    for (int k = 0; k < d; ++k) {
      all_bottom = all_bottom && on_bottom[f.vertices[k]];
      all_top = all_top && on_top[f.vertices[k]];
    }
    f.tag = all_bottom ? BoundaryTag::Omega : all_top ? BoundaryTag::Gamma1 : BoundaryTag::GammaL;
    mesh.boundary_facets.push_back(static_cast<int>(fi));
  }
  return mesh;
}

Vec3 outward_normal(const Mesh& mesh, int facet) {
  if (facet < 0 || facet >= static_cast<int>(mesh.facets.size())) {
    throw InvalidInput("outward_normal: facet index out of range");
  }
  if (!mesh.facets[facet].on_boundary) throw InvalidInput("outward_normal: facet is interior");
  return mesh.facets[facet].normal;
}

std::vector<BoundaryQuadPoint> boundary_quadrature(const Mesh& mesh, BoundaryTag tag, int degree) {
  const SimplexRule rule = simplex_rule(mesh.dim - 1, degree);
  std::vector<BoundaryQuadPoint> out;
  for (int fi : mesh.boundary_facets) {
    const Facet& f = mesh.facets[fi];
    if (f.tag != tag) continue;
    const auto& cell = mesh.cells[f.cells[0]];
    std::array<int, 3> local{};
    for (int k = 0; k < mesh.dim; ++k) {
      for (int i = 0; i <= mesh.dim; ++i) {
        if (cell[i] == f.vertices[k]) local[k] = i;
      }
    }
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      BoundaryQuadPoint bp;
      bp.facet = fi;
      bp.cell = f.cells[0];
      bp.normal = f.normal;
      bp.weight = rule.weights[q] * f.measure;
      for (int k = 0; k < mesh.dim; ++k) {
        bp.point += rule.points[q][k] * mesh.vertices[f.vertices[k]];
        bp.bary[local[k]] = rule.points[q][k];
      }
      out.push_back(bp);
    }
  }
  return out;
}

}  // namespace thermoslip
