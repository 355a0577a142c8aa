#pragma once

#include <vector>

#include "maxdd/coarse_spectral.hpp"
#include "maxdd/decomposition.hpp"
#include "maxdd/local_problems.hpp"

namespace maxdd {

/// Vector spherical harmonic index: degree j >= 1, order |k| <= j,
/// nu = 2 (surface gradient) or nu = 3 (surface gradient x e_r).
struct VshEntry {
  int j;
  int k;
  int nu;
};

/// All entries with 1 <= j <= mu; 2((mu+1)^2 - 1) of them.
std::vector<VshEntry> vsh_entries(int mu);

/// Real orthonormal spherical harmonic Y_j^k at a unit vector; k < 0
/// selects the sin(|k| phi) member.
double real_sph_harm(int j, int k, const Vec3& p);

/// Y_{j,nu}^k at a point of the unit sphere, in Cartesian components.
/// Values at the poles use the analytic limit.
CVec3 eval_vsh(int j, int k, int nu, const Vec3& p);

/// Radial projection x -> (x - center)/|x - center| of a star-shaped box
/// boundary onto the unit sphere.
struct StarMap {
  Vec3 center = Vec3::Zero();
  Box box;

  /// Distance from the center to the box boundary along unit direction d.
  double radius(const Vec3& d) const;
  Vec3 to_sphere(const Vec3& x) const;
};

StarMap star_map(const BoxMesh& mesh, const CubeBox& cubes);

/// Covariant pullback of Y_{j,nu}^k to x, projected onto the plane with the
/// given unit normal.
CVec3 pullback_trace(const StarMap& map, const VshEntry& entry, const Vec3& x, const Vec3& normal);

/// Edge moments of the pulled-back harmonic on the Gamma_l edges of `local`.
CVector pullback_trace_dofs(const EdgeDofMap& dofmap, const LocalSystem& local,
                            const StarMap& map, const VshEntry& entry);

struct EconomicalColumns {
  CMatrix columns;     // weighted lifts kept after deduplication (local numbering)
  int candidates = 0;  // traces generated before deduplication
};

/// Lifted, weighted and deduplicated harmonic columns of one subdomain.
EconomicalColumns build_economical_basis(const EdgeDofMap& dofmap, const LocalSystem& local,
                                         const StarMap& map, int mu, const RVector& chi);

/// Greedy pivoted Cholesky of X^H S X; returns the retained column indices
/// (relative pivot threshold `tol`).
std::vector<int> independent_columns(const CMatrix& X, const RealSparseMatrix& S, double tol);

/// mu = round(kappa^{1 - beta/2}), at least 1.
int mu_rule(double kappa, double beta);

}  // namespace maxdd
