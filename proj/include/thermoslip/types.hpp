#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace thermoslip {

// Points and vectors always carry three components; unused trailing
// components are zero when the mesh is two-dimensional.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Barycentric coordinates of a point in a simplex; entries past dim+1 are zero.
using Barycentric = std::array<double, 4>;

using ScalarFunction = std::function<double(const Vec3&)>;
using VectorFunction = std::function<Vec3(const Vec3&)>;

/// Bad user input: malformed arguments, out-of-range parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear or nonlinear solve that cannot proceed (singular system, ...).
class SolverFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constitutive model produced a value outside its declared bounds.
class ModelViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace thermoslip
