#include "maxdd/coarse_spectral.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace maxdd {

GeneoPencil build_geneo_pencil(const LocalSystem& local, const CMatrix& V, const RVector& chi) {
  if (V.rows() != local.size() || chi.size() != local.size())
    throw ConfigError("build_geneo_pencil: dimension mismatch");
  if (V.cols() == 0) throw ConfigError("build_geneo_pencil: empty harmonic basis");
  const CMatrix SV = local.S * V;
  const CMatrix WV = chi.cast<cplx>().asDiagonal() * V;
  GeneoPencil p;
  p.R = V.adjoint() * SV;
  p.L = WV.adjoint() * (local.S * WV);
  p.R = 0.5 * (p.R + p.R.adjoint()).eval();
  p.L = 0.5 * (p.L + p.L.adjoint()).eval();
  return p;
}

SpectralSelection select_modes(GenEigResult eig, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("select_modes: rho must lie in (0, 1)");
  SpectralSelection s;
  s.rho = rho;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    double& v = eig.values[i];
    if (v < -1e-10)
      throw NumericalError("select_modes: negative eigenvalue " + std::to_string(v) +
                           " in a semidefinite pencil");
    if (v < 0.0) v = 0.0;
  }
  const double thr = rho * rho;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values[i] >= thr) s.selected.push_back(static_cast<int>(i));
  s.eigenvalues = std::move(eig.values);
  s.eigenvectors = std::move(eig.vectors);
  return s;
}

SpectralSelection select_modes(const GeneoPencil& pencil, double rho) {
  return select_modes(hermitian_gen_eig(pencil.L, pencil.R), rho);
}

double choose_rho(double kappa, double alpha, double beta, double gamma, double C0) {
  if (!(kappa > 0.0)) throw ConfigError("choose_rho: kappa must be positive");
  if (!(0.0 <= alpha && alpha <= beta && beta <= 1.0))
    throw ConfigError("choose_rho: need 0 <= alpha <= beta <= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("choose_rho: gamma must lie in (0, 1]");
  if (!(C0 > 0.0)) throw ConfigError("choose_rho: C0 must be positive");
  const double sigma = 2.0 - (alpha + beta) + 0.5 * gamma;
  return std::min(C0 * std::pow(kappa, -sigma), 0.999);
}

void CoarseBuilder::add_column(int l, const std::vector<int>& dofs, const CVector& col) {
  if (col.size() != static_cast<Eigen::Index>(dofs.size()))
    throw ConfigError("add_column: dimension mismatch");
  if (col.size() == 0 || col.cwiseAbs().maxCoeff() <= 1e-13) {
    ++rejected_;
    return;
  }
  const int j = dim();
  for (std::size_t i = 0; i < dofs.size(); ++i)
    if (col[i] != cplx(0.0)) trip_.emplace_back(dofs[i], j, col[i]);
  owner_.push_back(l);
  if (blocks_.empty() || blocks_.back().owner != l || blocks_.back().dofs != dofs)
    blocks_.push_back({l, dofs, {}});
  blocks_.back().cols.push_back(col);
}

CoarseSpace CoarseBuilder::finish(const ComplexSparseMatrix& A) const {
  CoarseSpace cs;
  cs.owner = owner_;
  cs.rejected = rejected_;
  cs.C.resize(n_, dim());
  cs.C.setFromTriplets(trip_.begin(), trip_.end());
  cs.C.makeCompressed();
  if (dim() == 0) return cs;

  // A0 block by block: Z_i^H (A P_j Z_j) restricted to the rows of block i.
  const std::size_t nb = blocks_.size();
  std::vector<CMatrix> Z(nb);
  std::vector<int> offset(nb + 1, 0);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& blk = blocks_[b];
    Z[b].resize(static_cast<Eigen::Index>(blk.dofs.size()), static_cast<Eigen::Index>(blk.cols.size()));
    for (std::size_t j = 0; j < blk.cols.size(); ++j) Z[b].col(j) = blk.cols[j];
    offset[b + 1] = offset[b] + static_cast<int>(blk.cols.size());
  }
  CMatrix A0 = CMatrix::Zero(dim(), dim());
  CMatrix AZ;
  std::vector<char> touched;
  for (std::size_t bj = 0; bj < nb; ++bj) {
    const auto& dj = blocks_[bj].dofs;
    AZ.setZero(n_, Z[bj].cols());
    touched.assign(n_, 0);
    for (std::size_t k = 0; k < dj.size(); ++k) {
      // A is structurally symmetric: row dj[k] lists the rows coupled to dj[k].
      for (ComplexSparseMatrix::InnerIterator it(A, dj[k]); it; ++it) touched[it.col()] = 1;
    }
    std::vector<int> local(n_, -1);
    for (std::size_t k = 0; k < dj.size(); ++k) local[dj[k]] = static_cast<int>(k);
    for (int r = 0; r < n_; ++r) {
      if (!touched[r]) continue;
      for (ComplexSparseMatrix::InnerIterator it(A, r); it; ++it) {
        const int c = local[it.col()];
        if (c >= 0) AZ.row(r) += it.value() * Z[bj].row(c);
      }
    }
    for (std::size_t bi = 0; bi < nb; ++bi) {
      const auto& di = blocks_[bi].dofs;
      std::vector<int> rows;
      for (std::size_t k = 0; k < di.size(); ++k)
        if (touched[di[k]]) rows.push_back(static_cast<int>(k));
      if (rows.empty()) continue;
      const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
      CMatrix Zi(nr, Z[bi].cols()), Yj(nr, AZ.cols());
      for (Eigen::Index k = 0; k < nr; ++k) {
        Zi.row(k) = Z[bi].row(rows[k]);
        Yj.row(k) = AZ.row(di[rows[k]]);
      }
      A0.block(offset[bi], offset[bj], Z[bi].cols(), Z[bj].cols()).noalias() = Zi.adjoint() * Yj;
    }
  }
  cs.A0 = A0.sparseView(cplx(0.0), 0.0);
  cs.A0.makeCompressed();
  auto lu = std::make_shared<Eigen::PartialPivLU<CMatrix>>(A0);
  const auto d = lu->matrixLU().diagonal().cwiseAbs();
  if (!(d.minCoeff() > 1e-13 * d.maxCoeff())) {
    Eigen::Index k;
    d.minCoeff(&k);
    throw NumericalError("coarse operator is singular, try a larger rho: pivot " +
                         std::to_string(k) + " vanishes");
  }
  cs.dense_lu = std::move(lu);
  return cs;
}

CVector CoarseSpace::solve(const CVector& b) const {
  if (dense_lu) return dense_lu->solve(b);
  return lu->solve(b);
}

void add_spectral_columns(CoarseBuilder& builder, const LocalSystem& local, const CMatrix& V,
                          const RVector& chi, const SpectralSelection& sel) {
  CMatrix xi(sel.eigenvectors.rows(), static_cast<Eigen::Index>(sel.selected.size()));
  for (std::size_t k = 0; k < sel.selected.size(); ++k) xi.col(k) = sel.eigenvectors.col(sel.selected[k]);
  const CMatrix cols = chi.cast<cplx>().asDiagonal() * (V * xi);
  for (Eigen::Index k = 0; k < cols.cols(); ++k) builder.add_column(local.id, local.dofs, cols.col(k));
}

void write_spectra_csv(const std::string& path, const std::vector<SpectralSelection>& spectra) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << "subdomain,index,eigenvalue,selected\n" << std::setprecision(17);
  for (std::size_t l = 0; l < spectra.size(); ++l) {
    const auto& s = spectra[l];
    std::vector<char> sel(s.eigenvalues.size(), 0);
    for (int i : s.selected) sel[i] = 1;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
      out << l << ',' << i << ',' << s.eigenvalues[i] << ',' << int(sel[i]) << '\n';
  }
}

}  // namespace maxdd
