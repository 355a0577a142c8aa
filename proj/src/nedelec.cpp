#include "maxdd/nedelec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maxdd/quadrature.hpp"

namespace maxdd {

namespace {

Mat6 face_tangential_matrix(const TetGeometry& g, const std::array<Vec3, 4>& v, int lf) {
  const auto& fv = kLocalFaces[lf];
  const Vec3 cr = (v[fv[1]] - v[fv[0]]).cross(v[fv[2]] - v[fv[0]]);
  const double area = 0.5 * cr.norm();
  const Vec3 normal = cr.normalized();
  Mat6 T = Mat6::Zero();
  for (const auto& node : triangle_rule()) {
    std::array<double, 4> bary{0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) bary[fv[i]] = node.bary[i];
    auto phi = whitney_values(g, bary);
    for (auto& p : phi) p -= p.dot(normal) * normal;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) T(a, b) += node.weight * area * phi[a].dot(phi[b]);
  }
  return T;
}

// Curl-curl and mass matrices; int lambda_i lambda_j = |K| (1 + delta_ij) / 20.
void volume_matrices(const TetGeometry& g, Mat6& K, Mat6& M) {
  std::array<Vec3, 6> curls;
  for (int k = 0; k < 6; ++k)
    curls[k] = 2.0 * g.grad[kLocalEdges[k][0]].cross(g.grad[kLocalEdges[k][1]]);
  auto I = [&](int i, int j) { return g.volume * (i == j ? 2.0 : 1.0) / 20.0; };
  for (int k = 0; k < 6; ++k) {
    const int a = kLocalEdges[k][0], b = kLocalEdges[k][1];
    for (int l = 0; l < 6; ++l) {
      const int c = kLocalEdges[l][0], d = kLocalEdges[l][1];
      K(k, l) = g.volume * curls[k].dot(curls[l]);
      M(k, l) = g.grad[b].dot(g.grad[d]) * I(a, c) - g.grad[b].dot(g.grad[c]) * I(a, d) -
                g.grad[a].dot(g.grad[d]) * I(b, c) + g.grad[a].dot(g.grad[c]) * I(b, d);
    }
  }
}

struct FaceInfo {
  int face;
  int cell;
  int local_face;
};

// Faces of the region boundary with the region cell they belong to.
std::vector<FaceInfo> region_boundary_faces(const BoxMesh& mesh, std::span<const int> cells,
                                            std::vector<char>& in_region) {
  in_region.assign(mesh.num_cells(), 0);
  for (int c : cells) in_region[c] = 1;
  std::vector<FaceInfo> out;
  for (int c : cells) {
    for (int lf = 0; lf < 4; ++lf) {
      const int f = mesh.cell_faces(c)[lf];
      const auto& fc = mesh.face_cells(f);
      const int other = fc[0] == c ? fc[1] : fc[0];
      if (other < 0 || !in_region[other]) out.push_back({f, c, lf});
    }
  }
  return out;
}

std::vector<int> region_dofs(const EdgeDofMap& dofmap, std::span<const int> cells) {
  std::vector<int> dofs;
  dofs.reserve(cells.size() * 6);
  for (int c : cells)
    for (int le = 0; le < 6; ++le) dofs.push_back(dofmap.dof(c, le));
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int> from_triplets(
    int n, const std::vector<Eigen::Triplet<Scalar, int>>& t) {
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

TetGeometry tet_geometry(const std::array<Vec3, 4>& v) {
  Eigen::Matrix3d B;
  B.col(0) = v[1] - v[0];
  B.col(1) = v[2] - v[0];
  B.col(2) = v[3] - v[0];
  const double det = B.determinant();
  const double scale = B.col(0).norm() * B.col(1).norm() * B.col(2).norm();
  if (!(std::abs(det) > 1e-12 * scale)) throw NumericalError("degenerate tetrahedron");
  const Eigen::Matrix3d Binv = B.inverse();
  TetGeometry g;
  g.volume = std::abs(det) / 6.0;
  for (int i = 0; i < 3; ++i) g.grad[i + 1] = Binv.row(i).transpose();
  g.grad[0] = -(g.grad[1] + g.grad[2] + g.grad[3]);
  return g;
}

std::array<Vec3, 6> whitney_values(const TetGeometry& g, const std::array<double, 4>& bary) {
  std::array<Vec3, 6> out;
  for (int k = 0; k < 6; ++k) {
    const int a = kLocalEdges[k][0], b = kLocalEdges[k][1];
    out[k] = bary[a] * g.grad[b] - bary[b] * g.grad[a];
  }
  return out;
}

std::array<Vec3, 6> whitney_curls(const TetGeometry& g) {
  std::array<Vec3, 6> out;
  for (int k = 0; k < 6; ++k) {
    const int a = kLocalEdges[k][0], b = kLocalEdges[k][1];
    out[k] = 2.0 * g.grad[a].cross(g.grad[b]);
  }
  return out;
}

ElementMatrices element_matrices(const std::array<Vec3, 4>& v) {
  const TetGeometry g = tet_geometry(v);
  ElementMatrices em;
  volume_matrices(g, em.curl_curl, em.mass);
  for (int lf = 0; lf < 4; ++lf) em.face_tangential[lf] = face_tangential_matrix(g, v, lf);
  return em;
}

void ProblemParams::validate(int num_cells) const {
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (epsilon < 0.0 || epsilon > kappa * kappa)
    throw ConfigError("epsilon must satisfy 0 <= epsilon <= kappa^2");
  if (!rel_permittivity.empty() && static_cast<int>(rel_permittivity.size()) != num_cells)
    throw ConfigError("rel_permittivity must have one entry per cell");
}

double ProblemParams::impedance_scale(int cell) const {
  if (rel_permittivity.empty()) return 1.0;
  const double re = rel_permittivity[cell].real();
  if (re < 0.0) throw ConfigError("negative Re(eps_r) gives an undefined impedance scale");
  return std::sqrt(re);
}

RegionMatrices assemble_region(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                               std::span<const int> cells, const ProblemParams& params) {
  const BoxMesh& mesh = dofmap.mesh();
  if (cells.empty()) throw ConfigError("assemble_region: empty cell subset");
  RegionMatrices r;
  r.dofs = region_dofs(dofmap, cells);
  std::vector<int> local(dofmap.n_dofs(), -1);
  for (std::size_t i = 0; i < r.dofs.size(); ++i) local[r.dofs[i]] = static_cast<int>(i);
  const int n = static_cast<int>(r.dofs.size());

  std::vector<RTriplet> tk, tm;
  std::vector<CTriplet> tme;
  tk.reserve(cells.size() * 36);
  tm.reserve(cells.size() * 36);
  tme.reserve(cells.size() * 36);
  Mat6 Ke, Me;
  for (int c : cells) {
    volume_matrices(tet_geometry(mesh.cell_vertices(c)), Ke, Me);
    const cplx eps_r = params.permittivity(c);
    for (int k = 0; k < 6; ++k) {
      const int row = local[dofmap.dof(c, k)];
      for (int l = 0; l < 6; ++l) {
        const int col = local[dofmap.dof(c, l)];
        const double s = dofmap.sign(c, k) * dofmap.sign(c, l);
        tk.emplace_back(row, col, s * Ke(k, l));
        tm.emplace_back(row, col, s * Me(k, l));
        tme.emplace_back(row, col, s * Me(k, l) * eps_r);
      }
    }
  }
  r.K = from_triplets(n, tk);
  r.M0 = from_triplets(n, tm);
  r.M_eps = from_triplets(n, tme);

  std::vector<char> in_region;
  const auto bfaces = region_boundary_faces(mesh, cells, in_region);
  std::vector<RTriplet> to, ti, tow, tiw;
  for (const auto& fi : bfaces) {
    const auto v = mesh.cell_vertices(fi.cell);
    const TetGeometry g = tet_geometry(v);
    const Mat6 T = face_tangential_matrix(g, v, fi.local_face);
    const bool outer = tags.is_boundary_face[fi.face] != 0;
    if (!outer) r.inner_boundary_faces.push_back(fi.face);
    const double w = params.impedance_scale(fi.cell);
    auto& t0 = outer ? to : ti;
    auto& tw = outer ? tow : tiw;
    for (int k = 0; k < 6; ++k) {
      const int row = local[dofmap.dof(fi.cell, k)];
      for (int l = 0; l < 6; ++l) {
        const double val = dofmap.sign(fi.cell, k) * dofmap.sign(fi.cell, l) * T(k, l);
        if (val == 0.0) continue;
        const int col = local[dofmap.dof(fi.cell, l)];
        t0.emplace_back(row, col, val);
        tw.emplace_back(row, col, w * val);
      }
    }
  }
  std::sort(r.inner_boundary_faces.begin(), r.inner_boundary_faces.end());
  r.T_outer = from_triplets(n, to);
  r.T_inner = from_triplets(n, ti);
  r.T_outer_w = from_triplets(n, tow);
  r.T_inner_w = from_triplets(n, tiw);
  return r;
}

ComplexSparseMatrix impedance_operator(const RegionMatrices& r, const ProblemParams& params) {
  const double k = params.kappa;
  ComplexSparseMatrix A = r.K.cast<cplx>();
  A -= (k * k) * r.M_eps;
  A -= (kI * params.epsilon) * r.M0.cast<cplx>();
  A -= (kI * k) * RealSparseMatrix(r.T_outer_w + r.T_inner_w).cast<cplx>();
  A.makeCompressed();
  return A;
}

AssembledSystem assemble_system(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                                const ProblemParams& params, const SourceCase& source) {
  const BoxMesh& mesh = dofmap.mesh();
  params.validate(mesh.num_cells());
  std::vector<int> all(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) all[c] = c;
  RegionMatrices r = assemble_region(dofmap, tags, all, params);

  AssembledSystem sys;
  const double k = params.kappa;
  sys.A = impedance_operator(r, params);
  sys.K = std::move(r.K);
  sys.M0 = std::move(r.M0);
  sys.M_w = std::move(r.M_eps);
  sys.T_bnd = std::move(r.T_outer);
  sys.T_w = std::move(r.T_outer_w);
  sys.S_imp = sys.K + (k * k) * sys.M0 + k * sys.T_bnd;
  sys.S_imp.makeCompressed();

  const int n = dofmap.n_dofs();
  sys.rhs_volume = CVector::Zero(n);
  sys.rhs_boundary = CVector::Zero(n);

  if (const auto* fs = std::get_if<FieldSource>(&source)) {
    if (fs->J && fs->polynomial_degree >= 0 && fs->polynomial_degree + 1 > kTetRuleDegree)
      throw ConfigError("volume source degree " + std::to_string(fs->polynomial_degree) +
                        " exceeds the exactness of the tetrahedral quadrature rule");
    if (fs->J) {
      for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto v = mesh.cell_vertices(c);
        const TetGeometry g = tet_geometry(v);
        for (const auto& node : tet_rule()) {
          const Vec3 x = node.bary[0] * v[0] + node.bary[1] * v[1] + node.bary[2] * v[2] +
                         node.bary[3] * v[3];
          const CVec3 J = fs->J(x);
          const auto phi = whitney_values(g, node.bary);
          for (int le = 0; le < 6; ++le)
            sys.rhs_volume[dofmap.dof(c, le)] +=
                node.weight * g.volume * dofmap.sign(c, le) * phi[le].cast<cplx>().dot(J);
        }
      }
    }
    if (fs->g) {
      for (std::size_t bi = 0; bi < tags.boundary_faces.size(); ++bi) {
        const int f = tags.boundary_faces[bi];
        const Vec3& normal = tags.face_normals[bi];
        const int c = mesh.face_cells(f)[0];
        int lf = 0;
        while (mesh.cell_faces(c)[lf] != f) ++lf;
        const auto v = mesh.cell_vertices(c);
        const TetGeometry g = tet_geometry(v);
        const auto& fv = kLocalFaces[lf];
        const double area = 0.5 * (v[fv[1]] - v[fv[0]]).cross(v[fv[2]] - v[fv[0]]).norm();
        for (const auto& node : triangle_rule()) {
          std::array<double, 4> bary{0.0, 0.0, 0.0, 0.0};
          Vec3 x = Vec3::Zero();
          for (int i = 0; i < 3; ++i) {
            bary[fv[i]] = node.bary[i];
            x += node.bary[i] * v[fv[i]];
          }
          const CVec3 gv = fs->g(x, normal);
          auto phi = whitney_values(g, bary);
          for (int le = 0; le < 6; ++le) {
            const Vec3 pt = phi[le] - phi[le].dot(normal) * normal;
            // CVec3::dot conjugates the left operand; keep g unconjugated.
            sys.rhs_boundary[dofmap.dof(c, le)] +=
                node.weight * area * dofmap.sign(c, le) * pt.cast<cplx>().dot(gv);
          }
        }
      }
    }
  } else {
    const auto& dp = std::get<DipoleSource>(source);
    const PointLocation loc = locate_point(mesh, dp.position);
    const TetGeometry g = tet_geometry(mesh.cell_vertices(loc.cell));
    const auto phi = whitney_values(g, loc.bary);
    for (int le = 0; le < 6; ++le)
      sys.rhs_volume[dofmap.dof(loc.cell, le)] +=
          kI * dofmap.sign(loc.cell, le) * phi[le].cast<cplx>().dot(dp.moment);
  }
  sys.rhs = sys.rhs_volume + sys.rhs_boundary;
  return sys;
}

std::pair<double, double> source_norms_squared(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                                               const FieldSource& source) {
  const BoxMesh& mesh = dofmap.mesh();
  double jj = 0.0, gg = 0.0;
  if (source.J) {
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const auto v = mesh.cell_vertices(c);
      const double vol = mesh.cell_volume(c);
      for (const auto& node : tet_rule()) {
        const Vec3 x = node.bary[0] * v[0] + node.bary[1] * v[1] + node.bary[2] * v[2] +
                       node.bary[3] * v[3];
        jj += node.weight * vol * source.J(x).squaredNorm();
      }
    }
  }
  if (source.g) {
    for (std::size_t bi = 0; bi < tags.boundary_faces.size(); ++bi) {
      const auto& fv = mesh.faces()[tags.boundary_faces[bi]];
      const Vec3& p0 = mesh.vertices()[fv[0]];
      const Vec3& p1 = mesh.vertices()[fv[1]];
      const Vec3& p2 = mesh.vertices()[fv[2]];
      const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
      for (const auto& node : triangle_rule()) {
        const Vec3 x = node.bary[0] * p0 + node.bary[1] * p1 + node.bary[2] * p2;
        gg += node.weight * area * source.g(x, tags.face_normals[bi]).squaredNorm();
      }
    }
  }
  return {jj, gg};
}

LocalGram assemble_local_gram(const EdgeDofMap& dofmap, const BoundaryTags& tags,
                              std::span<const int> cells, double kappa, BoundaryMode mode) {
  if (cells.empty()) throw ConfigError("assemble_local_gram: empty cell subset");
  ProblemParams p;
  p.kappa = kappa;
  RegionMatrices r = assemble_region(dofmap, tags, cells, p);
  LocalGram g;
  g.dofs = std::move(r.dofs);
  g.S = r.K + (kappa * kappa) * r.M0 + kappa * r.T_inner;
  if (mode == BoundaryMode::Full) g.S += kappa * r.T_outer;
  g.S.makeCompressed();
  return g;
}

RVector quasi_interp_diagonal(const EdgeDofMap& dofmap,
                              const std::function<double(const Vec3&)>& w) {
  const BoxMesh& mesh = dofmap.mesh();
  RVector d(dofmap.n_dofs());
  for (int e = 0; e < mesh.num_edges(); ++e) d[e] = w(mesh.edge_midpoint(e));
  return d;
}

double discrete_l2_norm(const EdgeDofMap& dofmap, const CVector& v, std::span<const int> dofs) {
  double s = 0.0;
  for (int e : dofs) s += std::norm(v[e]);
  // h^{d-2} with d = 3
  return std::sqrt(dofmap.mesh().h() * s);
}

double discrete_l2_norm(const EdgeDofMap& dofmap, const CVector& v) {
  return std::sqrt(dofmap.mesh().h() * v.squaredNorm());
}

CVector interpolate_field(const EdgeDofMap& dofmap,
                          const std::function<CVec3(const Vec3&)>& field) {
  const BoxMesh& mesh = dofmap.mesh();
  static const auto nodes = gauss_line(3);
  CVector out(dofmap.n_dofs());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Vec3& a = mesh.vertices()[mesh.edges()[e][0]];
    const Vec3& b = mesh.vertices()[mesh.edges()[e][1]];
    const Vec3 t = b - a;
    cplx s{0.0};
    for (const auto& node : nodes) {
      const Vec3 x = node.bary[0] * a + node.bary[1] * b;
      s += node.weight * t.cast<cplx>().dot(field(x));
    }
    out[e] = s;
  }
  return out;
}

CVec3 evaluate_field(const EdgeDofMap& dofmap, const CVector& v, int cell,
                     const std::array<double, 4>& bary) {
  const TetGeometry g = tet_geometry(dofmap.mesh().cell_vertices(cell));
  const auto phi = whitney_values(g, bary);
  CVec3 out = CVec3::Zero();
  for (int le = 0; le < 6; ++le)
    out += (dofmap.sign(cell, le) * v[dofmap.dof(cell, le)]) * phi[le].cast<cplx>();
  return out;
}

}  // namespace maxdd
