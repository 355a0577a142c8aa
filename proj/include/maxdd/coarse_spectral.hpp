#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "maxdd/linalg.hpp"
#include "maxdd/local_problems.hpp"

namespace maxdd {

struct GeneoPencil {
  CMatrix L;  // V^H W S W V
  CMatrix R;  // V^H S V
};

/// Pencil of the weighted harmonic space; chi is the partition-of-unity
/// weight on the local DOFs.
GeneoPencil build_geneo_pencil(const LocalSystem& local, const CMatrix& V, const RVector& chi);

struct SpectralSelection {
  RVector eigenvalues;  // ascending, clamped at zero
  CMatrix eigenvectors;  // R-orthonormal coefficient vectors
  double rho = 0.0;
  std::vector<int> selected;
};

/// Eigen-decomposes the pencil and keeps modes with lambda >= rho^2.
SpectralSelection select_modes(const GeneoPencil& pencil, double rho);
/// Threshold step only, on precomputed eigenpairs.
SpectralSelection select_modes(GenEigResult eig, double rho);

/// min(C0 kappa^{-sigma}, 0.999) with sigma = 2 - (alpha + beta) + gamma / 2.
double choose_rho(double kappa, double alpha, double beta, double gamma, double C0);

/// Global coarse basis C and Galerkin operator C^H A C.
struct CoarseSpace {
  Eigen::SparseMatrix<cplx, Eigen::ColMajor, int> C;
  ComplexSparseMatrix A0;
  std::shared_ptr<const SparseLU> lu;  // sparse A0
  std::shared_ptr<const Eigen::PartialPivLU<CMatrix>> dense_lu;  // A0 with dense blocks
  std::vector<int> owner;  // subdomain of each column
  int rejected = 0;        // columns dropped for small norm

  int dim() const { return static_cast<int>(C.cols()); }
  /// A0^{-1} b
  CVector solve(const CVector& b) const;
};

/// Accumulates weighted local columns into a global coarse space.
class CoarseBuilder {
 public:
  explicit CoarseBuilder(int n_global) : n_(n_global) {}
  /// Adds P_l * col; columns with max-norm <= 1e-13 are rejected.
  void add_column(int l, const std::vector<int>& dofs, const CVector& col);
  /// Forms A0 and factors it. An empty builder yields dim 0.
  CoarseSpace finish(const ComplexSparseMatrix& A) const;
  int dim() const { return static_cast<int>(owner_.size()); }

 private:
  int n_;
  struct Block {
    int owner;
    std::vector<int> dofs;
    std::vector<CVector> cols;
  };
  std::vector<CTriplet> trip_;
  std::vector<Block> blocks_;
  std::vector<int> owner_;
  int rejected_ = 0;
};

/// Columns P_l diag(chi_l) V_l xi for the selected modes of one subdomain.
void add_spectral_columns(CoarseBuilder& builder, const LocalSystem& local, const CMatrix& V,
                          const RVector& chi, const SpectralSelection& sel);

/// CSV dump of per-subdomain spectra: subdomain,index,eigenvalue,selected.
void write_spectra_csv(const std::string& path, const std::vector<SpectralSelection>& spectra);

}  // namespace maxdd
