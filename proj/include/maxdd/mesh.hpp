#pragma once

#include <array>
#include <vector>

#include "maxdd/types.hpp"

namespace maxdd {

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();

  Vec3 extent() const { return hi - lo; }
  static Box unit() { return {}; }
};

/// Local edge (a,b) pairs of a tetrahedron, a < b in local numbering.
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Local vertices of the face opposite local vertex i.
inline constexpr std::array<std::array<int, 3>, 4> kLocalFaces{
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

/// Structured Freudenthal (Kuhn) tetrahedral mesh of an axis-aligned box.
///
/// Each of the n^3 cubes is split into 6 tetrahedra sharing the main cube
/// diagonal; the diagonal direction is the same in every cube so the
/// triangulation is conforming and meshes with n and k*n cells per
/// dimension are nested. Vertices are numbered lexicographically by
/// (x, y, z) grid index, cells by cube (same order) then by the axis
/// permutation of the monotone lattice path. Edge and face tables are
/// sorted lists of sorted vertex tuples.
class BoxMesh {
 public:
  static BoxMesh build(const Box& box, int n);

  const Box& box() const { return box_; }
  int n() const { return n_; }
  double h() const { return h_; }
  /// Cube edge length per axis.
  Vec3 spacing() const { return box_.extent() / n_; }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 4>>& cells() const { return cells_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  /// Global edge index of each local edge (kLocalEdges order).
  const std::array<int, 6>& cell_edges(int c) const { return cell_edges_[c]; }
  /// Global face index of the face opposite each local vertex.
  const std::array<int, 4>& cell_faces(int c) const { return cell_faces_[c]; }
  /// Cells adjacent to a face; second entry is -1 on the boundary.
  const std::array<int, 2>& face_cells(int f) const { return face_cells_[f]; }

  int vertex_index(int i, int j, int k) const {
    return (i * (n_ + 1) + j) * (n_ + 1) + k;
  }
  std::array<int, 3> vertex_grid(int v) const;
  int cube_index(int i, int j, int k) const { return (i * n_ + j) * n_ + k; }
  std::array<int, 3> cube_grid(int cube) const;
  /// The six cells of a cube are contiguous: [6*cube, 6*cube+6).
  static int cube_of_cell(int c) { return c / 6; }

  std::array<Vec3, 4> cell_vertices(int c) const;
  Vec3 edge_midpoint(int e) const;
  Vec3 cell_centroid(int c) const;
  double cell_volume(int c) const;
  /// Index of an edge given by two vertex indices, -1 if absent.
  int find_edge(int a, int b) const;

 private:
  Box box_;
  int n_ = 0;
  double h_ = 0.0;
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 6>> cell_edges_;
  std::vector<std::array<int, 4>> cell_faces_;
  std::vector<std::array<int, 2>> face_cells_;
};

struct BoundaryTags {
  std::vector<int> boundary_faces;  // sorted
  std::vector<int> boundary_edges;  // sorted
  std::vector<Vec3> face_normals;   // parallel to boundary_faces, outward
  std::vector<char> is_boundary_face;  // indexed by face
  std::vector<char> is_boundary_edge;  // indexed by edge
};

BoundaryTags classify_boundary(const BoxMesh& mesh);

struct PointLocation {
  int cell = -1;
  std::array<double, 4> bary{};
};

/// Cell containing x with its barycentric coordinates. Points on shared
/// faces/edges/vertices resolve to the lowest containing cell index.
/// Throws OutOfDomainError when x lies outside the closed box.
PointLocation locate_point(const BoxMesh& mesh, const Vec3& x);

/// Barycentric coordinates of x with respect to a cell (no clamping).
std::array<double, 4> barycentric(const BoxMesh& mesh, int cell, const Vec3& x);

}  // namespace maxdd
