#include "thermoslip/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace thermoslip {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidInput("gauss_legendre: need at least one point");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix on [-1, 1].
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    nodes[i] = 0.5 * (eig.eigenvalues()(i) + 1.0);
    weights[i] = v0 * v0;  // total weight 2 on [-1,1] maps to 1 on [0,1]
  }
}

SimplexRule simplex_rule(int dim, int degree) {
  if (dim < 1 || dim > 3) throw InvalidInput("simplex_rule: dim must be 1, 2 or 3");
  if (degree < 0) throw InvalidInput("simplex_rule: negative degree");

  SimplexRule rule;
  rule.dim = dim;
  rule.degree = degree;

  // The collapsed map contributes a Jacobian factor (1-u)^(dim-1) (1-v)^(dim-2);
  // each direction needs enough points to absorb it.
  auto points_for = [](int deg) { return std::max(1, (deg + 2) / 2); };

  if (dim == 1) {
    std::vector<double> x, w;
    gauss_legendre(points_for(degree), x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      rule.points.push_back({1.0 - x[i], x[i], 0.0, 0.0});
      rule.weights.push_back(w[i]);
    }
    return rule;
  }

  if (dim == 2) {
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre(points_for(degree + 1), xu, wu);
    gauss_legendre(points_for(degree), xv, wv);
    for (std::size_t i = 0; i < xu.size(); ++i) {
      for (std::size_t j = 0; j < xv.size(); ++j) {
        const double x = xu[i];
        const double y = xv[j] * (1.0 - xu[i]);
        rule.points.push_back({1.0 - x - y, x, y, 0.0});
        rule.weights.push_back(2.0 * wu[i] * wv[j] * (1.0 - xu[i]));
      }
    }
    return rule;
  }

  std::vector<double> xu, wu, xv, wv, xw, ww;
  gauss_legendre(points_for(degree + 2), xu, wu);
  gauss_legendre(points_for(degree + 1), xv, wv);
  gauss_legendre(points_for(degree), xw, ww);
  for (std::size_t i = 0; i < xu.size(); ++i) {
    for (std::size_t j = 0; j < xv.size(); ++j) {
      for (std::size_t k = 0; k < xw.size(); ++k) {
        const double u = xu[i], v = xv[j];
        const double x = u;
        const double y = v * (1.0 - u);
        const double z = xw[k] * (1.0 - u) * (1.0 - v);
        rule.points.push_back({1.0 - x - y - z, x, y, z});
        rule.weights.push_back(6.0 * wu[i] * wv[j] * ww[k] * (1.0 - u) * (1.0 - u) * (1.0 - v));
      }
    }
  }
  return rule;
}

}  // namespace thermoslip
