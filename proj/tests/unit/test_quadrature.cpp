#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "thermoslip/quadrature.hpp"

using namespace thermoslip;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Mean of x^a y^b z^c over the reference simplex with vertices at the origin
// and the unit points: a! b! c! d! / (a + b + c + d)!.
double simplex_mean(int dim, int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) * factorial(dim) / factorial(a + b + c + dim);
}

double apply(const SimplexRule& r, int a, int b, int c) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.points.size(); ++q) {
    const auto& p = r.points[q];
    s += r.weights[q] * std::pow(p[1], a) * std::pow(p[2], b) * std::pow(p[3], c);
  }
  return s;
}

}  // namespace

TEST(GaussLegendre, IntegratesMonomialsOnUnitInterval) {
  std::vector<double> x, w;
  gauss_legendre(4, x, w);
  ASSERT_EQ(x.size(), 4u);
  for (int k = 0; k <= 7; ++k) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += w[i] * std::pow(x[i], k);
    EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14) << "k=" << k;
  }
}

TEST(GaussLegendre, RejectsEmptyRule) {
  std::vector<double> x, w;
  EXPECT_THROW(gauss_legendre(0, x, w), InvalidInput);
}

class SimplexRuleExactness : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(SimplexRuleExactness, AllMonomialsUpToDegree) {
  const auto [dim, degree] = GetParam();
  const SimplexRule r = simplex_rule(dim, degree);
  EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 1.0, 1e-14);
  for (double w : r.weights) EXPECT_GT(w, 0.0);
  for (const auto& p : r.points) {
    double sum = 0.0;
    for (int i = 0; i <= dim; ++i) {
      EXPECT_GE(p[i], -1e-15);
      sum += p[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; b + a <= degree; ++b) {
      for (int c = 0; a + b + c <= degree; ++c) {
        if ((dim < 2 && b > 0) || (dim < 3 && c > 0)) continue;
        EXPECT_NEAR(apply(r, a, b, c), simplex_mean(dim, a, b, c), 1e-13)
            << "dim=" << dim << " x^" << a << " y^" << b << " z^" << c;
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Rules, SimplexRuleExactness,
                         ::testing::Values(std::make_pair(1, 3), std::make_pair(1, 6), std::make_pair(2, 2),
                                           std::make_pair(2, 4), std::make_pair(2, 6), std::make_pair(3, 3),
                                           std::make_pair(3, 4)));
