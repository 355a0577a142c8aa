#include "maxdd/local_problems.hpp"

#include <algorithm>
#include <string>

namespace maxdd {

LocalSystem assemble_local(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                           const Decomposition& dec, int l, const ProblemParams& params) {
  if (l < 0 || l >= dec.size()) throw ConfigError("assemble_local: invalid subdomain index");
  const BoxMesh& mesh = dofmap.mesh();
  RegionMatrices r = assemble_region(dofmap, tags, dec.cells[l], params);

  LocalSystem ls;
  ls.id = l;
  ls.A = impedance_operator(r, params);
  try {
    ls.lu = std::make_shared<const SparseLU>(ls.A);
  } catch (const NumericalError& e) {
    throw NumericalError("subdomain " + std::to_string(l) + ": " + e.what());
  }
  const double k = params.kappa;
  ls.S = r.K + (k * k) * r.M0 + k * RealSparseMatrix(r.T_outer + r.T_inner);
  ls.S.makeCompressed();
  ls.T_gamma = std::move(r.T_inner);
  ls.gamma_faces = std::move(r.inner_boundary_faces);

  std::vector<int> local(dofmap.n_dofs(), -1);
  for (std::size_t i = 0; i < r.dofs.size(); ++i) local[r.dofs[i]] = static_cast<int>(i);
  for (int f : ls.gamma_faces) {
    const auto& fv = mesh.faces()[f];
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) ls.gamma.push_back(local[mesh.find_edge(fv[a], fv[b])]);
  }
  std::sort(ls.gamma.begin(), ls.gamma.end());
  ls.gamma.erase(std::unique(ls.gamma.begin(), ls.gamma.end()), ls.gamma.end());
  ls.dofs = std::move(r.dofs);
  return ls;
}

CVector trace_load(const LocalSystem& local, const CVector& lambda) {
  if (lambda.size() != local.m()) throw ConfigError("trace_load: lambda size mismatch");
  CVector full = CVector::Zero(local.size());
  for (int i = 0; i < local.m(); ++i) full[local.gamma[i]] = lambda[i];
  return local.T_gamma * full;
}

CVector harmonic_lift(const LocalSystem& local, const CVector& lambda) {
  return local.lu->solve(trace_load(local, lambda));
}

CMatrix build_harmonic_basis(const LocalSystem& local) {
  const int m = local.m();
  CMatrix V(local.size(), m);
  CVector b(local.size());
  for (int j = 0; j < m; ++j) {
    // T_gamma is symmetric: its column for trace edge j is row gamma[j].
    b.setZero();
    for (RealSparseMatrix::InnerIterator it(local.T_gamma, local.gamma[j]); it; ++it)
      b[it.col()] = it.value();
    V.col(j) = local.lu->solve(b);
  }
  return V;
}

}  // namespace maxdd
