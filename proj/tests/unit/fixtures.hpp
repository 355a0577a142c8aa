#pragma once

#include <memory>
#include <random>

#include "maxdd/harness.hpp"
#include "maxdd/linalg.hpp"

namespace fixtures {

using namespace maxdd;

/// Mesh, tags and DOF map kept at stable addresses.
struct Discretization {
  std::unique_ptr<BoxMesh> mesh;
  BoundaryTags tags;
  std::unique_ptr<EdgeDofMap> dofmap;
  ProblemParams params;

  Discretization(int n, double kappa, double epsilon)
      : mesh(std::make_unique<BoxMesh>(BoxMesh::build(Box::unit(), n))),
        tags(classify_boundary(*mesh)),
        dofmap(std::make_unique<EdgeDofMap>(*mesh)) {
    params.kappa = kappa;
    params.epsilon = epsilon;
  }
  int n_dofs() const { return dofmap->n_dofs(); }
};

inline CVector random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  return v;
}

inline CMatrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  CMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) m.col(j) = random_vector(r, rng);
  return m;
}

inline double s_norm(const RealSparseMatrix& S, const CVector& v) {
  return std::sqrt(std::max(0.0, v.dot(S * v).real()));
}

inline ComplexSparseMatrix to_complex(const RealSparseMatrix& S) { return S.cast<cplx>(); }

}  // namespace fixtures
