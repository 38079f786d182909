#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "thermoslip/mesh.hpp"

using namespace thermoslip;

namespace {

Mesh square(int n, int m, HeightFunction h = HeightFunction::constant(1.0)) {
  DomainSpec spec;
  spec.height = std::move(h);
  const int res[2] = {n, m};
  return build_slab_mesh(spec, res);
}

double sum_weights(const std::vector<BoundaryQuadPoint>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s += p.weight;
  return s;
}

}  // namespace

TEST(SlabMesh, SmallestSplit) {
  const Mesh mesh = square(1, 1);
  EXPECT_EQ(mesh.vertices.size(), 4u);
  EXPECT_EQ(mesh.num_cells(), 2);
}

TEST(SlabMesh, CountingIdentity) {
  const int n = 5, m = 3;
  const Mesh mesh = square(n, m);
  EXPECT_EQ(mesh.vertices.size(), static_cast<std::size_t>((n + 1) * (m + 1)));
  EXPECT_EQ(mesh.num_cells(), 2 * n * m);
  EXPECT_EQ(mesh.facets_with_tag(BoundaryTag::Omega).size(), static_cast<std::size_t>(n));
  EXPECT_EQ(mesh.facets_with_tag(BoundaryTag::Gamma1).size(), static_cast<std::size_t>(n));
  EXPECT_EQ(mesh.facets_with_tag(BoundaryTag::GammaL).size(), static_cast<std::size_t>(2 * m));
}

TEST(SlabMesh, AffineHeightScalesVertically) {
  const Mesh mesh = square(4, 4, HeightFunction::affine(1.0, {1.0, 0.0}));
  double top = 0.0;
  for (const auto& v : mesh.vertices) {
    top = std::max(top, v[1]);
    EXPECT_LE(v[1], 1.0 + v[0] + 1e-14);
  }
  EXPECT_DOUBLE_EQ(top, 2.0);
}

TEST(SlabMesh, VolumeMatchesIntegralOfHeight) {
  const Mesh m2 = square(7, 3, HeightFunction::affine(1.0, {-0.25, 0.0}));
  EXPECT_NEAR(m2.volume(), 1.0 - 0.125, 1e-12);

  DomainSpec spec;
  spec.dim = 3;
  spec.omega_extent = {2.0, 1.0};
  spec.height = HeightFunction::affine(1.0, {0.25, 0.5});
  const int res[3] = {3, 2, 2};
  const Mesh m3 = build_slab_mesh(spec, res);
  // int_0^2 int_0^1 (1 + x/4 + y/2) dy dx = 2 + 0.5 + 0.5
  EXPECT_NEAR(m3.volume(), 3.0, 1e-12);
  EXPECT_EQ(m3.num_cells(), 6 * 3 * 2 * 2);
}

TEST(SlabMesh, CellsPositivelyOriented) {
  const Mesh mesh = square(6, 4, HeightFunction::affine(1.0, {-0.5, 0.0}));
  for (double v : mesh.cell_volume) EXPECT_GT(v, 0.0);
}

TEST(SlabMesh, NormalsAreUnitAndOutward) {
  for (int dim : {2, 3}) {
    DomainSpec spec;
    spec.dim = dim;
    spec.height = HeightFunction::affine(1.0, {-0.3, 0.2});
    std::vector<int> res(dim, 3);
    const Mesh mesh = build_slab_mesh(spec, res);
    for (int f : mesh.boundary_facets) {
      const Facet& facet = mesh.facets[f];
      const Vec3 n = outward_normal(mesh, f);
      EXPECT_NEAR(n.norm(), 1.0, 1e-14);
      EXPECT_GT(n.dot(facet.centroid - mesh.cell_centroid(facet.cells[0])), 0.0);
      for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) {
          const Vec3 edge = mesh.vertices[facet.vertices[b]] - mesh.vertices[facet.vertices[a]];
          EXPECT_NEAR(n.dot(edge), 0.0, 1e-14);
        }
      }
    }
  }
}

TEST(SlabMesh, AxisAlignedNormals) {
  const Mesh mesh = square(2, 2);
  for (int f : mesh.facets_with_tag(BoundaryTag::Omega)) EXPECT_TRUE(outward_normal(mesh, f).isApprox(Vec3(0, -1, 0)));
  for (int f : mesh.facets_with_tag(BoundaryTag::Gamma1)) EXPECT_TRUE(outward_normal(mesh, f).isApprox(Vec3(0, 1, 0)));
  for (int f : mesh.facets_with_tag(BoundaryTag::GammaL)) {
    const Vec3 expect = mesh.facets[f].centroid[0] < 0.5 ? Vec3(-1, 0, 0) : Vec3(1, 0, 0);
    EXPECT_TRUE(outward_normal(mesh, f).isApprox(expect));
  }
}

TEST(SlabMesh, TagsPartitionBoundary) {
  DomainSpec spec;
  spec.dim = 3;
  const int res[3] = {2, 3, 2};
  const Mesh mesh = build_slab_mesh(spec, res);
  std::set<int> seen;
  std::size_t total = 0;
  for (BoundaryTag t : {BoundaryTag::Omega, BoundaryTag::Gamma1, BoundaryTag::GammaL}) {
    const auto list = mesh.facets_with_tag(t);
    total += list.size();
    seen.insert(list.begin(), list.end());
  }
  EXPECT_EQ(total, mesh.boundary_facets.size());
  EXPECT_EQ(seen.size(), mesh.boundary_facets.size());
  // Unit cube: every face has measure 1.
  EXPECT_NEAR(mesh.tagged_measure(BoundaryTag::Omega), 1.0, 1e-14);
  EXPECT_NEAR(mesh.tagged_measure(BoundaryTag::GammaL), 4.0, 1e-14);
}

TEST(SlabMesh, RejectsBadInput) {
  DomainSpec spec;
  const int zero[2] = {0, 3};
  EXPECT_THROW(build_slab_mesh(spec, zero), InvalidInput);
  spec.height = HeightFunction::affine(1.0, {-2.0, 0.0});
  const int ok[2] = {4, 2};
  EXPECT_THROW(build_slab_mesh(spec, ok), InvalidInput);
  const Mesh mesh = square(2, 2);
  int interior = -1;
  for (int f = 0; f < static_cast<int>(mesh.facets.size()); ++f) {
    if (!mesh.facets[f].on_boundary) interior = f;
  }
  ASSERT_GE(interior, 0);
  EXPECT_THROW(outward_normal(mesh, interior), InvalidInput);
}

TEST(SampledHeight, BilinearInterpolation) {
  const HeightFunction h = HeightFunction::sampled({1.0, 2.0, 3.0, 5.0}, {2, 2}, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(h(0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(h(1.0, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(h(0.5, 0.5), 2.75);
  EXPECT_THROW(HeightFunction::sampled({1.0, 2.0}, {2, 2}, {1.0, 1.0}), InvalidInput);
}

TEST(BoundaryQuadrature, WeightsSumToTaggedMeasure) {
  const Mesh flat = square(4, 3);
  EXPECT_NEAR(sum_weights(boundary_quadrature(flat, BoundaryTag::Omega)), 1.0, 1e-14);
  EXPECT_NEAR(sum_weights(boundary_quadrature(flat, BoundaryTag::Gamma1)), 1.0, 1e-14);

  const Mesh sloped = square(4, 4, HeightFunction::affine(1.0, {1.0, 0.0}));
  // Arc length of x2 = 1 + x1 as a fine polyline.
  double arc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x0 = double(i) / n, x1 = double(i + 1) / n;
    arc += std::hypot(x1 - x0, (1.0 + x1) - (1.0 + x0));
  }
  EXPECT_NEAR(sum_weights(boundary_quadrature(sloped, BoundaryTag::Gamma1)), arc, 1e-12);
}

TEST(BoundaryQuadrature, ExactForPolynomialsOnOmega) {
  const Mesh mesh = square(3, 2);
  for (int deg : {1, 3, 5}) {
    double s = 0.0;
    for (const auto& p : boundary_quadrature(mesh, BoundaryTag::Omega, deg)) {
      s += p.weight * std::pow(p.point[0], deg);
      EXPECT_TRUE(p.normal.isApprox(Vec3(0, -1, 0)));
      EXPECT_TRUE(mesh.point(p.cell, p.bary).isApprox(p.point, 1e-14));
    }
    EXPECT_NEAR(s, 1.0 / (deg + 1), 1e-14);
  }
}
