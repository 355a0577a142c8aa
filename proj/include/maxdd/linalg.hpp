#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "maxdd/types.hpp"

namespace maxdd {

/// Sparse LU factorization of a square complex matrix (UMFPACK backend).
/// The factorization is immutable once built and solves may be issued from
/// several threads.
class SparseLU {
 public:
  explicit SparseLU(const ComplexSparseMatrix& A);
  ~SparseLU();
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;

  int rows() const { return n_; }
  CVector solve(const CVector& b) const;
  CMatrix solve(const CMatrix& B) const;

 private:
  int n_ = 0;
  // CSR of A, read by UMFPACK as the CSC of A^T.
  std::vector<int> ptr_, idx_;
  std::vector<cplx> val_;
  void* numeric_ = nullptr;
};

CVector lu_solve(const SparseLU& lu, const CVector& b);

struct GenEigResult {
  RVector values;   // ascending
  CMatrix vectors;  // R-orthonormal columns
};

/// Solves L v = lambda R v for Hermitian L and Hermitian positive definite R.
/// Throws NumericalError naming the failing leading minor when R is not
/// positive definite, ConfigError when L is not Hermitian.
GenEigResult hermitian_gen_eig(const CMatrix& L, const CMatrix& R);

/// Lower-triangular Cholesky factor R = G G^H; throws NumericalError naming
/// the first leading minor that is not positive.
CMatrix cholesky_lower(const CMatrix& R);

using LinearOperator = std::function<CVector(const CVector&)>;

enum class PrecondSide { Left, Right };

struct GmresOptions {
  double tol = 1e-6;
  int maxit = 1000;
  PrecondSide side = PrecondSide::Left;
  /// Optional Hermitian positive definite weight M: residuals are minimized
  /// in |v|_M = sqrt(v^H M v). Null means the Euclidean inner product.
  const ComplexSparseMatrix* weight = nullptr;
  /// Compute orthogonality_drift at exit (O(m^2 n)).
  bool check_orthogonality = false;
};

struct GmresResult {
  CVector x;
  /// Relative residual estimates |r_m| / |r_0| for m = 0..iterations, in the
  /// norm that GMRES minimizes (preconditioned residual for left
  /// preconditioning).
  std::vector<double> history;
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  /// Largest entry of |V^H M V - I| over the Arnoldi basis.
  double orthogonality_drift = 0.0;
};

/// Un-restarted GMRES from a zero initial guess with modified Gram-Schmidt
/// and one reorthogonalization pass. `precond` may be empty.
GmresResult gmres(const LinearOperator& A, const LinearOperator& precond, const CVector& b,
                  const GmresOptions& opts = {});

}  // namespace maxdd
