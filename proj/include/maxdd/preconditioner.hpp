#pragma once

#include <cstdint>
#include <vector>

#include "maxdd/coarse_spectral.hpp"
#include "maxdd/decomposition.hpp"
#include "maxdd/linalg.hpp"
#include "maxdd/local_problems.hpp"

namespace maxdd {

enum class SchwarzMode { OneLevel, Hybrid };

/// Weighted additive Schwarz preconditioner with optional hybrid coarse
/// correction.
class SchwarzPreconditioner {
 public:
  SchwarzPreconditioner(const ComplexSparseMatrix& A, std::vector<LocalSystem> locals,
                        PartitionOfUnity pou, CoarseSpace coarse, SchwarzMode mode);

  /// sum_l P_l diag(chi_l) A_l^{-1} P_l^T r, summed in ascending l.
  CVector apply_one_level(const CVector& r) const;
  /// z1 = one-level(r); z = z1 + C A0^{-1} C^H (r - A z1).
  CVector apply_hybrid(const CVector& r) const;
  /// C A0^{-1} C^H r (zero when the coarse space is empty).
  CVector coarse_solve(const CVector& r) const;
  CVector apply(const CVector& r) const;

  SchwarzMode mode() const { return mode_; }
  const CoarseSpace& coarse() const { return coarse_; }
  const std::vector<LocalSystem>& locals() const { return locals_; }
  const PartitionOfUnity& pou() const { return pou_; }
  int max_local_dofs() const;

 private:
  const ComplexSparseMatrix* A_;
  std::vector<LocalSystem> locals_;
  PartitionOfUnity pou_;
  CoarseSpace coarse_;
  SchwarzMode mode_;
};

/// Coarse space spanned by the lowest-order edge functions of the
/// subdomain-level mesh (parts_per_dim cells per axis).
CoarseSpace build_grid_coarse(const EdgeDofMap& dofmap, const Decomposition& dec,
                              const ComplexSparseMatrix& A);

struct FovDiagnostics {
  double max_ratio = 0.0;
  double min_inner = 0.0;
  double tau = 0.0;
};

/// Sampled bounds of P = B^{-1} A in the S-inner product:
/// max |Pv|_S/|v|_S and min |(v, Pv)_S|/|v|_S^2 over seeded random v.
FovDiagnostics field_of_values_diagnostics(const LinearOperator& precond,
                                           const ComplexSparseMatrix& A,
                                           const RealSparseMatrix& S, int n_samples,
                                           std::uint64_t seed);

/// Dense evaluation: spectral norm of P and distance of its field of values
/// from the origin (angle sweep). Limited to 3000 unknowns.
FovDiagnostics dense_field_of_values(const LinearOperator& precond, const ComplexSparseMatrix& A,
                                     const RealSparseMatrix& S, int n_angles = 72);

}  // namespace maxdd
