#pragma once

#include <memory>
#include <vector>

#include "maxdd/decomposition.hpp"
#include "maxdd/linalg.hpp"
#include "maxdd/nedelec.hpp"

namespace maxdd {

/// Local impedance problem on Omega_l.
struct LocalSystem {
  int id = 0;
  std::vector<int> dofs;  // sorted global DOFs, local numbering follows
  ComplexSparseMatrix A;  // impedance term over all of dOmega_l
  std::shared_ptr<const SparseLU> lu;
  RealSparseMatrix S;        // (.,.)_{imp,kappa,Omega_l}
  RealSparseMatrix T_gamma;  // tangential Gram over Gamma_l = dOmega_l \ dOmega
  std::vector<int> gamma;    // local indices of edges on Gamma_l
  std::vector<int> gamma_faces;  // global faces of Gamma_l

  int m() const { return static_cast<int>(gamma.size()); }
  int size() const { return static_cast<int>(dofs.size()); }
};

LocalSystem assemble_local(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                           const Decomposition& dec, int l, const ProblemParams& params);

/// Load vector b(lambda)_e = <lambda, (phi_e)_T>_{Gamma_l} for a trace given
/// by coefficients on the Gamma_l edges.
CVector trace_load(const LocalSystem& local, const CVector& lambda);

/// H_{eps,l}(lambda): solves A_l v = b(lambda).
CVector harmonic_lift(const LocalSystem& local, const CVector& lambda);

/// Lifts of all unit traces, one column per Gamma_l edge.
CMatrix build_harmonic_basis(const LocalSystem& local);

}  // namespace maxdd
