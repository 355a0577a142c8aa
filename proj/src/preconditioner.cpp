#include "maxdd/preconditioner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace maxdd {

namespace {

double tau_from(double max_ratio, double min_inner) {
  const double t = std::max({0.0, max_ratio - 1.0, 1.0 - min_inner});
  return std::min(t, std::nextafter(1.0, 0.0));
}

}  // namespace

SchwarzPreconditioner::SchwarzPreconditioner(const ComplexSparseMatrix& A,
                                             std::vector<LocalSystem> locals,
                                             PartitionOfUnity pou, CoarseSpace coarse,
                                             SchwarzMode mode)
    : A_(&A),
      locals_(std::move(locals)),
      pou_(std::move(pou)),
      coarse_(std::move(coarse)),
      mode_(mode) {
  if (locals_.size() != pou_.dofs.size())
    throw ConfigError("SchwarzPreconditioner: one local system per subdomain required");
  for (std::size_t l = 0; l < locals_.size(); ++l)
    if (locals_[l].dofs != pou_.dofs[l])
      throw ConfigError("SchwarzPreconditioner: local DOF list mismatch for subdomain " +
                        std::to_string(l));
}

CVector SchwarzPreconditioner::apply_one_level(const CVector& r) const {
  CVector z = CVector::Zero(r.size());
  for (std::size_t l = 0; l < locals_.size(); ++l) {
    const auto& dofs = pou_.dofs[l];
    CVector u;
    try {
      u = locals_[l].lu->solve(restrict_to(dofs, r));
    } catch (const NumericalError& e) {
      throw NumericalError("local solve failed on subdomain " + std::to_string(l) + ": " +
                           e.what());
    }
    extend_add(dofs, pou_.chi[l].cast<cplx>().cwiseProduct(u), z);
  }
  return z;
}

CVector SchwarzPreconditioner::coarse_solve(const CVector& r) const {
  if (coarse_.dim() == 0) return CVector::Zero(r.size());
  const CVector rc = coarse_.C.adjoint() * r;
  return coarse_.C * coarse_.solve(rc);
}

CVector SchwarzPreconditioner::apply_hybrid(const CVector& r) const {
  CVector z = apply_one_level(r);
  if (coarse_.dim() == 0) return z;
  const CVector res = r - *A_ * z;
  z += coarse_solve(res);
  return z;
}

CVector SchwarzPreconditioner::apply(const CVector& r) const {
  return mode_ == SchwarzMode::Hybrid ? apply_hybrid(r) : apply_one_level(r);
}

int SchwarzPreconditioner::max_local_dofs() const {
  int m = 0;
  for (const auto& l : locals_) m = std::max(m, l.size());
  return m;
}

CoarseSpace build_grid_coarse(const EdgeDofMap& dofmap, const Decomposition& dec,
                              const ComplexSparseMatrix& A) {
  const BoxMesh& fine = dofmap.mesh();
  const int nc = dec.parts_per_dim;
  if (fine.n() % nc != 0)
    throw ConfigError("build_grid_coarse: fine mesh is not a refinement of the coarse mesh");
  const BoxMesh coarse = BoxMesh::build(fine.box(), nc);
  const EdgeDofMap cmap(coarse);
  std::vector<CTriplet> trip;
  for (int e = 0; e < fine.num_edges(); ++e) {
    const Vec3& a = fine.vertices()[fine.edges()[e][0]];
    const Vec3& b = fine.vertices()[fine.edges()[e][1]];
    // Coarse fields are linear on the fine edge: the midpoint rule is exact.
    const PointLocation loc = locate_point(coarse, 0.5 * (a + b));
    const TetGeometry g = tet_geometry(coarse.cell_vertices(loc.cell));
    const auto phi = whitney_values(g, loc.bary);
    for (int le = 0; le < 6; ++le) {
      const double v = cmap.sign(loc.cell, le) * phi[le].dot(b - a);
      if (v != 0.0) trip.emplace_back(e, cmap.dof(loc.cell, le), v);
    }
  }
  CoarseSpace cs;
  cs.C.resize(dofmap.n_dofs(), cmap.n_dofs());
  cs.C.setFromTriplets(trip.begin(), trip.end());
  cs.C.makeCompressed();
  cs.owner.assign(cmap.n_dofs(), -1);
  const Eigen::SparseMatrix<cplx, Eigen::ColMajor, int> AC = A * cs.C;
  cs.A0 = ComplexSparseMatrix(cs.C.adjoint() * AC);
  cs.A0.makeCompressed();
  cs.lu = std::make_shared<const SparseLU>(cs.A0);
  return cs;
}

FovDiagnostics field_of_values_diagnostics(const LinearOperator& precond,
                                           const ComplexSparseMatrix& A,
                                           const RealSparseMatrix& S, int n_samples,
                                           std::uint64_t seed) {
  if (n_samples < 1) throw ConfigError("field_of_values_diagnostics: n_samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const Eigen::Index n = A.rows();
  FovDiagnostics d;
  d.max_ratio = 0.0;
  d.min_inner = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
    const CVector Pv = precond(A * v);
    const CVector Sv = S * v;
    const double vv = v.dot(Sv).real();
    const double pp = Pv.dot(S * Pv).real();
    d.max_ratio = std::max(d.max_ratio, std::sqrt(pp / vv));
    d.min_inner = std::min(d.min_inner, std::abs(Sv.dot(Pv)) / vv);
  }
  d.tau = tau_from(d.max_ratio, d.min_inner);
  return d;
}

FovDiagnostics dense_field_of_values(const LinearOperator& precond, const ComplexSparseMatrix& A,
                                     const RealSparseMatrix& S, int n_angles) {
  const Eigen::Index n = A.rows();
  if (n > 3000) throw ConfigError("dense_field_of_values: limited to 3000 unknowns");
  CMatrix P(n, n);
  CVector e = CVector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    P.col(j) = precond(A * e);
    e[j] = 0.0;
  }
  // S = G G^T; in the S-inner product P is unitarily similar to G^T P G^{-T}.
  const Eigen::LLT<RMatrix> llt{RMatrix(S)};
  if (llt.info() != Eigen::Success) throw NumericalError("dense_field_of_values: S not HPD");
  const CMatrix G = llt.matrixL().toDenseMatrix().cast<cplx>();
  const CMatrix Gt = G.adjoint();
  CMatrix Pt = Gt * P;
  Pt = G.triangularView<Eigen::Lower>().solve(Pt.adjoint()).adjoint();
  FovDiagnostics d;
  Eigen::SelfAdjointEigenSolver<CMatrix> gram(Pt.adjoint() * Pt, Eigen::EigenvaluesOnly);
  d.max_ratio = std::sqrt(std::max(0.0, gram.eigenvalues()[n - 1]));
  double dist = 0.0;
  for (int a = 0; a < n_angles; ++a) {
    const cplx rot = std::polar(1.0, 2.0 * std::numbers::pi * a / n_angles);
    const CMatrix Hm = 0.5 * (rot * Pt + std::conj(rot) * Pt.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Hm, Eigen::EigenvaluesOnly);
    dist = std::max(dist, es.eigenvalues()[0]);
  }
  d.min_inner = dist;
  d.tau = tau_from(d.max_ratio, d.min_inner);
  return d;
}

}  // namespace maxdd
