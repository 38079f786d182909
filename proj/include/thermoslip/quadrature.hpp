#pragma once

#include <vector>

#include "thermoslip/types.hpp"

namespace thermoslip {

/// Quadrature on the reference simplex of a given dimension. Points are
/// barycentric; weights are fractions of the simplex measure (they sum to 1).
struct SimplexRule {
  int dim = 0;
  int degree = 0;
  std::vector<Barycentric> points;
  std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed-coordinate (Duffy) product rule, exact for polynomials of total
/// degree `degree` on a simplex of dimension 1, 2 or 3. All weights positive.
SimplexRule simplex_rule(int dim, int degree);

struct QuadratureOptions {
  int cell_degree = 4;
  int facet_degree = 3;
};

}  // namespace thermoslip
