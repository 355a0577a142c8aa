#pragma once

#include <array>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "maxdd/mesh.hpp"
#include "maxdd/types.hpp"

namespace maxdd {

using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Gradients of the barycentric coordinates of a tetrahedron.
struct TetGeometry {
  std::array<Vec3, 4> grad;
  double volume = 0.0;
};

/// Throws NumericalError for a degenerate tetrahedron.
TetGeometry tet_geometry(const std::array<Vec3, 4>& v);

/// Whitney functions lambda_a grad(lambda_b) - lambda_b grad(lambda_a) for the
/// local edges in kLocalEdges order, oriented from lower to higher local vertex.
std::array<Vec3, 6> whitney_values(const TetGeometry& g, const std::array<double, 4>& bary);
std::array<Vec3, 6> whitney_curls(const TetGeometry& g);

struct ElementMatrices {
  Mat6 curl_curl;
  Mat6 mass;
  /// Tangential Gram over the face opposite local vertex i.
  std::array<Mat6, 4> face_tangential;
};

/// Closed-form element matrices of the lowest-order edge element.
ElementMatrices element_matrices(const std::array<Vec3, 4>& v);

/// Lowest-order edge DOFs: one per mesh edge, DOF index = edge index.
/// The DOF of edge (a,b), a < b, is the moment of the tangential component
/// along the edge vector x_b - x_a.
class EdgeDofMap {
 public:
  explicit EdgeDofMap(const BoxMesh& mesh) : mesh_(&mesh) {}

  const BoxMesh& mesh() const { return *mesh_; }
  int n_dofs() const { return mesh_->num_edges(); }
  int dof(int cell, int local_edge) const { return mesh_->cell_edges(cell)[local_edge]; }
  /// Orientation of the local edge relative to the global edge.
  double sign(int cell, int local_edge) const {
    const auto& cv = mesh_->cells()[cell];
    const auto& le = kLocalEdges[local_edge];
    return cv[le[0]] < cv[le[1]] ? 1.0 : -1.0;
  }

 private:
  const BoxMesh* mesh_;
};

/// Wave number, absorption and optional piecewise-constant permittivity.
struct ProblemParams {
  double kappa = 1.0;
  double epsilon = 0.0;
  /// Per-cell relative permittivity; empty means identically one.
  std::vector<cplx> rel_permittivity;

  void validate(int num_cells) const;
  cplx permittivity(int cell) const {
    return rel_permittivity.empty() ? cplx{1.0} : rel_permittivity[cell];
  }
  /// Impedance boundary scaling sqrt(Re eps_r).
  double impedance_scale(int cell) const;
};

/// Volume source J and impedance data g(x, outward normal).
struct FieldSource {
  std::function<CVec3(const Vec3&)> J;
  std::function<CVec3(const Vec3&, const Vec3&)> g;
  /// Polynomial degree of J when known, -1 otherwise.
  int polynomial_degree = -1;
};

/// Point source i * a * delta_{x0}.
struct DipoleSource {
  Vec3 position;
  CVec3 moment;
};

using SourceCase = std::variant<FieldSource, DipoleSource>;

/// Matrices assembled on a union of cells. Rows/columns use the local
/// numbering given by `dofs` (sorted global DOF indices).
struct RegionMatrices {
  std::vector<int> dofs;
  RealSparseMatrix K;   // curl-curl Gram
  RealSparseMatrix M0;  // L2 Gram
  ComplexSparseMatrix M_eps;  // permittivity-weighted L2 Gram
  RealSparseMatrix T_outer;   // tangential Gram on faces of dG on the box boundary
  RealSparseMatrix T_inner;   // tangential Gram on faces of dG interior to the box
  RealSparseMatrix T_outer_w;  // same, weighted by sqrt(Re eps_r)
  RealSparseMatrix T_inner_w;
  std::vector<int> inner_boundary_faces;  // global face indices of dG interior to the box
};

RegionMatrices assemble_region(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                               std::span<const int> cells, const ProblemParams& params);

/// K - kappa^2 M_eps - i eps M0 - i kappa (T_outer_w + T_inner_w).
ComplexSparseMatrix impedance_operator(const RegionMatrices& r, const ProblemParams& params);

struct AssembledSystem {
  ComplexSparseMatrix A;
  CVector rhs;
  CVector rhs_volume;    // (J, phi_e)
  CVector rhs_boundary;  // <g, (phi_e)_T>
  RealSparseMatrix S_imp;
  RealSparseMatrix M0;
  ComplexSparseMatrix M_w;
  RealSparseMatrix T_bnd;
  RealSparseMatrix T_w;
  RealSparseMatrix K;
};

AssembledSystem assemble_system(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                                const ProblemParams& params, const SourceCase& source);

/// Quadrature values of ||J||_0^2 and ||g||_{0,dOmega}^2 using the same rules as
/// the right-hand side assembly.
std::pair<double, double> source_norms_squared(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                                               const FieldSource& source);

enum class BoundaryMode { Full, InteriorOnly };

struct LocalGram {
  std::vector<int> dofs;
  RealSparseMatrix S;
};

/// Gram matrix of (.,.)_{imp,kappa,G} (Full) or (.,.)_{imp-,kappa,G}
/// (InteriorOnly: boundary term restricted to dG inside the box).
LocalGram assemble_local_gram(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                              std::span<const int> cells, double kappa, BoundaryMode mode);

/// Weights w(midpoint(e)); the quasi-interpolation of w*v for a lowest-order
/// field v is the diagonal scaling of its DOFs by these weights.
RVector quasi_interp_diagonal(const EdgeDofMap& dofmap, const std::function<double(const Vec3&)>& w);

/// sqrt(h * sum |M_e(v)|^2) over the listed DOFs.
double discrete_l2_norm(const EdgeDofMap& dofmap, const CVector& v, std::span<const int> dofs);
double discrete_l2_norm(const EdgeDofMap& dofmap, const CVector& v);

/// Edge moments of an analytic field (3-point Gauss per edge).
CVector interpolate_field(const EdgeDofMap& dofmap,
                          const std::function<CVec3(const Vec3&)>& field);

/// Value of the finite element field at a point given by cell and barycentrics.
CVec3 evaluate_field(const EdgeDofMap& dofmap, const CVector& v, int cell,
                     const std::array<double, 4>& bary);

}  // namespace maxdd
