#include "maxdd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace maxdd {

namespace {

// Axis permutations of the monotone lattice path (0,0,0) -> (1,1,1).
constexpr std::array<std::array<int, 3>, 6> kPaths{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

template <std::size_t N>
int lookup(const std::vector<std::array<int, N>>& table,
           const std::array<int, N>& key) {
  auto it = std::lower_bound(table.begin(), table.end(), key);
  if (it == table.end() || *it != key) return -1;
  return static_cast<int>(it - table.begin());
}

}  // namespace

BoxMesh BoxMesh::build(const Box& box, int n) {
  if (n < 1) throw ConfigError("build_box_mesh: n must be >= 1, got " + std::to_string(n));
  for (int d = 0; d < 3; ++d) {
    if (!(box.hi[d] > box.lo[d]))
      throw ConfigError("build_box_mesh: degenerate box along axis " + std::to_string(d));
  }

  BoxMesh m;
  m.box_ = box;
  m.n_ = n;
  const Vec3 dx = box.extent() / n;

  m.vertices_.reserve(static_cast<std::size_t>(n + 1) * (n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        m.vertices_.emplace_back(box.lo[0] + i * dx[0], box.lo[1] + j * dx[1],
                                 box.lo[2] + k * dx[2]);

  m.cells_.reserve(static_cast<std::size_t>(6) * n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (const auto& path : kPaths) {
          std::array<int, 3> g{i, j, k};
          std::array<int, 4> cell{};
          cell[0] = m.vertex_index(g[0], g[1], g[2]);
          for (int s = 0; s < 3; ++s) {
            ++g[path[s]];
            cell[s + 1] = m.vertex_index(g[0], g[1], g[2]);
          }
          // Each lattice step increases the lexicographic index.
          m.cells_.push_back(cell);
        }

  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> faces;
  edges.reserve(m.cells_.size() * 6);
  faces.reserve(m.cells_.size() * 4);
  for (const auto& c : m.cells_) {
    for (const auto& le : kLocalEdges) {
      std::array<int, 2> e{c[le[0]], c[le[1]]};
      std::sort(e.begin(), e.end());
      edges.push_back(e);
    }
    for (const auto& lf : kLocalFaces) {
      std::array<int, 3> f{c[lf[0]], c[lf[1]], c[lf[2]]};
      std::sort(f.begin(), f.end());
      faces.push_back(f);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  m.edges_ = std::move(edges);
  m.faces_ = std::move(faces);

  m.cell_edges_.resize(m.cells_.size());
  m.cell_faces_.resize(m.cells_.size());
  m.face_cells_.assign(m.faces_.size(), {-1, -1});
  for (std::size_t c = 0; c < m.cells_.size(); ++c) {
    const auto& cv = m.cells_[c];
    for (int le = 0; le < 6; ++le) {
      std::array<int, 2> e{cv[kLocalEdges[le][0]], cv[kLocalEdges[le][1]]};
      std::sort(e.begin(), e.end());
      m.cell_edges_[c][le] = lookup(m.edges_, e);
    }
    for (int lf = 0; lf < 4; ++lf) {
      std::array<int, 3> f{cv[kLocalFaces[lf][0]], cv[kLocalFaces[lf][1]],
                           cv[kLocalFaces[lf][2]]};
      std::sort(f.begin(), f.end());
      const int fi = lookup(m.faces_, f);
      m.cell_faces_[c][lf] = fi;
      auto& fc = m.face_cells_[fi];
      if (fc[0] < 0)
        fc[0] = static_cast<int>(c);
      else
        fc[1] = static_cast<int>(c);
    }
  }

  double h = 0.0;
  for (const auto& e : m.edges_)
    h = std::max(h, (m.vertices_[e[1]] - m.vertices_[e[0]]).norm());
  m.h_ = h;
  return m;
}

std::array<int, 3> BoxMesh::vertex_grid(int v) const {
  const int np = n_ + 1;
  return {v / (np * np), (v / np) % np, v % np};
}

std::array<int, 3> BoxMesh::cube_grid(int cube) const {
  return {cube / (n_ * n_), (cube / n_) % n_, cube % n_};
}

std::array<Vec3, 4> BoxMesh::cell_vertices(int c) const {
  const auto& cv = cells_[c];
  return {vertices_[cv[0]], vertices_[cv[1]], vertices_[cv[2]], vertices_[cv[3]]};
}

Vec3 BoxMesh::edge_midpoint(int e) const {
  return 0.5 * (vertices_[edges_[e][0]] + vertices_[edges_[e][1]]);
}

Vec3 BoxMesh::cell_centroid(int c) const {
  const auto v = cell_vertices(c);
  return 0.25 * (v[0] + v[1] + v[2] + v[3]);
}

double BoxMesh::cell_volume(int c) const {
  const auto v = cell_vertices(c);
  return std::abs((v[1] - v[0]).dot((v[2] - v[0]).cross(v[3] - v[0]))) / 6.0;
}

int BoxMesh::find_edge(int a, int b) const {
  std::array<int, 2> key{std::min(a, b), std::max(a, b)};
  return lookup(edges_, key);
}

BoundaryTags classify_boundary(const BoxMesh& mesh) {
  BoundaryTags tags;
  const int n = mesh.n();
  tags.is_boundary_face.assign(mesh.num_faces(), 0);
  tags.is_boundary_edge.assign(mesh.num_edges(), 0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& fv = mesh.faces()[f];
    const auto g0 = mesh.vertex_grid(fv[0]);
    const auto g1 = mesh.vertex_grid(fv[1]);
    const auto g2 = mesh.vertex_grid(fv[2]);
    for (int d = 0; d < 3; ++d) {
      const int side = g0[d];
      if ((side == 0 || side == n) && g1[d] == side && g2[d] == side) {
        Vec3 normal = Vec3::Zero();
        normal[d] = side == 0 ? -1.0 : 1.0;
        tags.boundary_faces.push_back(f);
        tags.face_normals.push_back(normal);
        tags.is_boundary_face[f] = 1;
        break;
      }
    }
  }
  for (int f : tags.boundary_faces) {
    const auto& fv = mesh.faces()[f];
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        tags.is_boundary_edge[mesh.find_edge(fv[a], fv[b])] = 1;
  }
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (tags.is_boundary_edge[e]) tags.boundary_edges.push_back(e);
  return tags;
}

std::array<double, 4> barycentric(const BoxMesh& mesh, int cell, const Vec3& x) {
  const auto v = mesh.cell_vertices(cell);
  Eigen::Matrix3d B;
  B.col(0) = v[1] - v[0];
  B.col(1) = v[2] - v[0];
  B.col(2) = v[3] - v[0];
  const Vec3 l = B.partialPivLu().solve(x - v[0]);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

PointLocation locate_point(const BoxMesh& mesh, const Vec3& x) {
  const Box& box = mesh.box();
  const Vec3 ext = box.extent();
  const double tol = 1e-12;
  for (int d = 0; d < 3; ++d) {
    if (x[d] < box.lo[d] - tol * ext[d] || x[d] > box.hi[d] + tol * ext[d])
      throw OutOfDomainError("locate_point: point outside the box");
  }
  const int n = mesh.n();
  std::array<std::array<int, 2>, 3> range{};
  for (int d = 0; d < 3; ++d) {
    const double t = (x[d] - box.lo[d]) / ext[d] * n;
    const int lo = static_cast<int>(std::floor(t - 1e-9));
    const int hi = static_cast<int>(std::floor(t + 1e-9));
    range[d] = {std::clamp(lo, 0, n - 1), std::clamp(hi, 0, n - 1)};
  }
  PointLocation best;
  for (int i = range[0][0]; i <= range[0][1]; ++i)
    for (int j = range[1][0]; j <= range[1][1]; ++j)
      for (int k = range[2][0]; k <= range[2][1]; ++k) {
        const int cube = mesh.cube_index(i, j, k);
        for (int c = 6 * cube; c < 6 * cube + 6; ++c) {
          if (best.cell >= 0 && c >= best.cell) break;
          const auto bc = barycentric(mesh, c, x);
          if (*std::min_element(bc.begin(), bc.end()) >= -1e-12) {
            best.cell = c;
            best.bary = bc;
          }
        }
      }
  if (best.cell < 0) throw OutOfDomainError("locate_point: no containing cell found");
  double s = 0.0;
  for (double& b : best.bary) {
    b = std::clamp(b, 0.0, 1.0);
    s += b;
  }
  for (double& b : best.bary) b /= s;
  return best;
}

}  // namespace maxdd
