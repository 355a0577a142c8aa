#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace maxdd {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

/// a x b without conjugation (Eigen's cross conjugates complex results).
inline CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Compressed-row complex matrix. Column indices are sorted and unique per
/// row once compressed.
using ComplexSparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor, int>;
using RealSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

using CTriplet = Eigen::Triplet<cplx, int>;
using RTriplet = Eigen::Triplet<double, int>;

/// Invalid user input (parameters, configuration files, ranges).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point queries outside the meshed box.
class OutOfDomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Numerical failure inside a solver or factorization.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maxdd
