#include "maxdd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <umfpack.h>

namespace maxdd {

namespace {

std::string umf_status(int status) {
  switch (status) {
    case UMFPACK_ERROR_out_of_memory: return "out of memory";
    case UMFPACK_ERROR_invalid_matrix: return "invalid matrix";
    case UMFPACK_WARNING_singular_matrix: return "singular matrix";
    default: return "status " + std::to_string(status);
  }
}

}  // namespace

SparseLU::SparseLU(const ComplexSparseMatrix& A) {
  if (A.rows() != A.cols()) throw ConfigError("lu_factor: matrix must be square");
  n_ = static_cast<int>(A.rows());
  if (n_ == 0) return;
  ComplexSparseMatrix a = A;
  a.makeCompressed();
  ptr_.assign(a.outerIndexPtr(), a.outerIndexPtr() + n_ + 1);
  idx_.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
  val_.assign(a.valuePtr(), a.valuePtr() + a.nonZeros());

  // Az == nullptr selects packed (interleaved) complex storage.
  const double* ax = reinterpret_cast<const double*>(val_.data());
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_zi_defaults(control);
  // Edge element matrices are structurally symmetric.
  control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
  void* symbolic = nullptr;
  int status = umfpack_zi_symbolic(n_, n_, ptr_.data(), idx_.data(), ax, nullptr, &symbolic,
                                   control, info);
  if (status != UMFPACK_OK)
    throw NumericalError("lu_factor: symbolic analysis failed (" + umf_status(status) + ")");
  status = umfpack_zi_numeric(ptr_.data(), idx_.data(), ax, nullptr, symbolic, &numeric_,
                              control, info);
  umfpack_zi_free_symbolic(&symbolic);
  if (status == UMFPACK_WARNING_singular_matrix) {
    std::vector<double> d(2 * static_cast<std::size_t>(n_));
    std::vector<int> p(n_), q(n_);
    int do_recip = 0;
    umfpack_zi_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                           nullptr, p.data(), q.data(), d.data(), nullptr, &do_recip, nullptr,
                           numeric_);
    int k = 0;
    while (k < n_ && (d[2 * k] != 0.0 || d[2 * k + 1] != 0.0)) ++k;
    umfpack_zi_free_numeric(&numeric_);
    // The factored matrix is A^T: its column q[k] is row q[k] of A.
    throw NumericalError("lu_factor: matrix is singular at pivot " + std::to_string(k) +
                         " (row " + std::to_string(k < n_ ? q[k] : -1) + ")");
  }
  if (status != UMFPACK_OK) {
    if (numeric_) umfpack_zi_free_numeric(&numeric_);
    throw NumericalError("lu_factor: numeric factorization failed (" + umf_status(status) + ")");
  }
}

SparseLU::~SparseLU() {
  if (numeric_) umfpack_zi_free_numeric(&numeric_);
}

CVector SparseLU::solve(const CVector& b) const {
  if (b.size() != n_) throw ConfigError("lu_solve: dimension mismatch");
  CVector x(n_);
  if (n_ == 0) return x;
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_zi_defaults(control);
  control[UMFPACK_IRSTEP] = 0;
  // UMFPACK_Aat solves with the non-conjugate transpose of the stored CSC
  // matrix, i.e. with A itself.
  const int status = umfpack_zi_solve(
      UMFPACK_Aat, ptr_.data(), idx_.data(), reinterpret_cast<const double*>(val_.data()),
      nullptr, reinterpret_cast<double*>(x.data()), nullptr,
      reinterpret_cast<const double*>(b.data()), nullptr, numeric_, control, info);
  if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
    throw NumericalError("lu_solve failed (" + umf_status(status) + ")");
  return x;
}

CMatrix SparseLU::solve(const CMatrix& B) const {
  CMatrix X(n_, B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j) X.col(j) = solve(CVector(B.col(j)));
  return X;
}

CVector lu_solve(const SparseLU& lu, const CVector& b) { return lu.solve(b); }

CMatrix cholesky_lower(const CMatrix& R) {
  const Eigen::Index m = R.rows();
  if (R.cols() != m) throw ConfigError("cholesky: matrix must be square");
  CMatrix G = CMatrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    CVector v = R.col(j).tail(m - j);
    if (j > 0) v.noalias() -= G.block(j, 0, m - j, j) * G.row(j).head(j).adjoint();
    const double d = v[0].real();
    if (!(d > 0.0) || !std::isfinite(d))
      throw NumericalError("matrix is not positive definite: leading minor of order " +
                           std::to_string(j + 1) + " is not positive");
    const double s = std::sqrt(d);
    G(j, j) = s;
    G.col(j).tail(m - j - 1) = v.tail(m - j - 1) / s;
  }
  return G;
}

GenEigResult hermitian_gen_eig(const CMatrix& L, const CMatrix& R) {
  const Eigen::Index m = L.rows();
  if (L.cols() != m || R.rows() != m || R.cols() != m)
    throw ConfigError("hermitian_gen_eig: dimension mismatch");
  GenEigResult out;
  if (m == 0) return out;
  const double lscale = std::max(1.0, L.cwiseAbs().maxCoeff());
  if ((L - L.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * lscale)
    throw ConfigError("hermitian_gen_eig: L is not Hermitian");
  const CMatrix Ls = 0.5 * (L + L.adjoint());
  const CMatrix G = cholesky_lower(0.5 * (R + R.adjoint()));
  const auto Gl = G.triangularView<Eigen::Lower>();
  // C = G^{-1} L G^{-H}
  const CMatrix Y = Gl.solve(Ls);
  CMatrix C = Gl.solve(CMatrix(Y.adjoint())).adjoint();
  C = 0.5 * (C + C.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(C);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_gen_eig: QR iteration failed");
  out.values = es.eigenvalues();
  out.vectors = G.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());
  return out;
}

GmresResult gmres(const LinearOperator& A, const LinearOperator& precond, const CVector& b,
                  const GmresOptions& opts) {
  if (opts.maxit < 1) throw ConfigError("gmres: maxit must be >= 1");
  const bool left = precond && opts.side == PrecondSide::Left;
  const bool right = precond && opts.side == PrecondSide::Right;
  auto op = [&](const CVector& v) -> CVector {
    if (left) return precond(A(v));
    if (right) return A(precond(v));
    return A(v);
  };
  auto weighted = [&](const CVector& v) -> CVector {
    if (opts.weight) return *opts.weight * v;
    return v;
  };
  auto inner = [&](const CVector& u, const CVector& v) { return u.dot(weighted(v)); };
  auto norm = [&](const CVector& v) { return std::sqrt(std::max(0.0, inner(v, v).real())); };

  GmresResult res;
  const Eigen::Index n = b.size();
  const CVector r0 = left ? precond(b) : b;
  const double beta = norm(r0);
  res.x = CVector::Zero(n);
  if (beta == 0.0) {
    res.history.push_back(0.0);
    res.converged = true;
    return res;
  }
  res.history.push_back(1.0);

  std::vector<CVector> V;
  V.push_back(r0 / beta);
  std::vector<CVector> H;  // rotated Hessenberg columns (upper triangular part)
  std::vector<double> cs;
  std::vector<cplx> sn;
  std::vector<cplx> g{cplx(beta)};

  int k = 0;
  for (int j = 0; j < opts.maxit; ++j) {
    CVector w = op(V[j]);
    const double w0 = norm(w);
    CVector h = CVector::Zero(j + 2);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        const cplx hij = inner(V[i], w);
        w -= hij * V[i];
        h[i] += hij;
      }
    }
    const double hnext = norm(w);
    h[j + 1] = hnext;
    for (int i = 0; i < j; ++i) {
      const cplx a = h[i], bb = h[i + 1];
      h[i] = cs[i] * a + sn[i] * bb;
      h[i + 1] = -std::conj(sn[i]) * a + cs[i] * bb;
    }
    const cplx a = h[j];
    const double bnorm = std::abs(h[j + 1]);
    const double nu = std::hypot(std::abs(a), bnorm);
    double c;
    cplx s;
    if (bnorm == 0.0) {
      c = 1.0;
      s = 0.0;
    } else if (std::abs(a) == 0.0) {
      c = 0.0;
      s = 1.0;
    } else {
      c = std::abs(a) / nu;
      s = (a / std::abs(a)) * std::conj(h[j + 1]) / nu;
    }
    cs.push_back(c);
    sn.push_back(s);
    h[j] = c * a + s * h[j + 1];
    h[j + 1] = 0.0;
    g.push_back(-std::conj(s) * g[j]);
    g[j] = c * g[j];
    H.push_back(h);
    k = j + 1;
    const double rel = std::abs(g[j + 1]) / beta;
    res.history.push_back(rel);
    if (hnext <= 1e-14 * w0) {
      res.breakdown = true;
      break;
    }
    if (rel <= opts.tol) break;
    V.push_back(w / hnext);
  }
  res.iterations = k;
  res.converged = res.breakdown || res.history.back() <= opts.tol;

  CVector y(k);
  for (int i = k - 1; i >= 0; --i) {
    cplx s = g[i];
    for (int l = i + 1; l < k; ++l) s -= H[l][i] * y[l];
    y[i] = s / H[i][i];
  }
  CVector x = CVector::Zero(n);
  for (int i = 0; i < k; ++i) x += y[i] * V[i];
  res.x = right ? precond(x) : x;

  if (opts.check_orthogonality) {
    double drift = 0.0;
    for (int i = 0; i < k; ++i)
      for (int l = 0; l <= i; ++l)
        drift = std::max(drift, std::abs(inner(V[l], V[i]) - (i == l ? 1.0 : 0.0)));
    res.orthogonality_drift = drift;
  }
  return res;
}

}  // namespace maxdd
