#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "fixtures.hpp"

using namespace maxdd;

namespace {

struct Counts {
  std::size_t v, e, f, t;
};

// Unique subsimplices of all cells.
Counts brute_force_counts(const BoxMesh& m) {
  std::set<int> verts;
  std::set<std::array<int, 2>> edges;
  std::set<std::array<int, 3>> faces;
  for (auto c : m.cells()) {
    std::sort(c.begin(), c.end());
    for (int a = 0; a < 4; ++a) {
      verts.insert(c[a]);
      for (int b = a + 1; b < 4; ++b) {
        edges.insert({c[a], c[b]});
        for (int d = b + 1; d < 4; ++d) faces.insert({c[a], c[b], c[d]});
      }
    }
  }
  return {verts.size(), edges.size(), faces.size(), m.cells().size()};
}

}  // namespace

TEST_CASE("entity counts match a brute-force enumeration") {
  for (int n : {1, 2, 3}) {
    const BoxMesh m = BoxMesh::build(Box::unit(), n);
    const Counts c = brute_force_counts(m);
    CHECK(m.num_vertices() == static_cast<int>(c.v));
    CHECK(m.num_edges() == static_cast<int>(c.e));
    CHECK(m.num_faces() == static_cast<int>(c.f));
    CHECK(m.num_cells() == static_cast<int>(c.t));
    CHECK(m.num_vertices() - m.num_edges() + m.num_faces() - m.num_cells() == 1);
  }
  const BoxMesh m1 = BoxMesh::build(Box::unit(), 1);
  CHECK(m1.num_vertices() == 8);
  CHECK(m1.num_edges() == 19);
  CHECK(m1.num_faces() == 18);
  CHECK(m1.num_cells() == 6);
  const BoxMesh m2 = BoxMesh::build(Box::unit(), 2);
  CHECK(m2.num_vertices() == 27);
  CHECK(m2.num_edges() == 98);
  CHECK(m2.num_faces() == 120);
  CHECK(m2.num_cells() == 48);
}

TEST_CASE("volumes, mesh size and orientation") {
  Box box;
  box.lo = Vec3(-1.0, 0.5, 2.0);
  box.hi = Vec3(1.0, 1.5, 2.5);
  const BoxMesh m = BoxMesh::build(box, 4);
  double vol = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    CHECK(m.cell_volume(c) > 0.0);
    vol += m.cell_volume(c);
  }
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.h() <= std::sqrt(3.0) * 2.0 / 4 + 1e-14);
  for (const auto& e : m.edges()) CHECK(e[0] < e[1]);
}

TEST_CASE("invalid meshes are rejected") {
  CHECK_THROWS_AS(BoxMesh::build(Box::unit(), 0), ConfigError);
  Box flat;
  flat.hi = Vec3(1.0, 0.0, 1.0);
  CHECK_THROWS_AS(BoxMesh::build(flat, 2), ConfigError);
}

TEST_CASE("identical inputs give identical tables") {
  const BoxMesh a = BoxMesh::build(Box::unit(), 3);
  const BoxMesh b = BoxMesh::build(Box::unit(), 3);
  CHECK(a.cells() == b.cells());
  CHECK(a.edges() == b.edges());
  CHECK(a.faces() == b.faces());
  for (int v = 0; v < a.num_vertices(); ++v) CHECK(a.vertices()[v] == b.vertices()[v]);
}

TEST_CASE("boundary classification") {
  for (int n : {1, 2, 3}) {
    const BoxMesh m = BoxMesh::build(Box::unit(), n);
    const BoundaryTags t = classify_boundary(m);
    CHECK(static_cast<int>(t.boundary_faces.size()) == 12 * n * n);
    // Oracle: faces with exactly one adjacent cell.
    std::map<std::array<int, 3>, int> count;
    for (auto c : m.cells()) {
      std::sort(c.begin(), c.end());
      for (const auto& lf : kLocalFaces) ++count[{c[lf[0]], c[lf[1]], c[lf[2]]}];
    }
    int once = 0;
    for (const auto& [f, k] : count) once += k == 1;
    CHECK(once == static_cast<int>(t.boundary_faces.size()));
    for (std::size_t i = 0; i < t.boundary_faces.size(); ++i) {
      const int f = t.boundary_faces[i];
      CHECK(m.face_cells(f)[1] < 0);
      CHECK(t.face_normals[i].norm() == doctest::Approx(1.0).epsilon(1e-14));
      // Outward: normal points away from the cell centroid.
      Vec3 fc = Vec3::Zero();
      for (int v : m.faces()[f]) fc += m.vertices()[v] / 3.0;
      CHECK(t.face_normals[i].dot(fc - m.cell_centroid(m.face_cells(f)[0])) > 0.0);
    }
  }
  const BoxMesh m = BoxMesh::build(Box::unit(), 2);
  const BoundaryTags t = classify_boundary(m);
  int interior = 0;
  for (int f = 0; f < m.num_faces(); ++f)
    if (!t.is_boundary_face[f]) {
      ++interior;
      CHECK(m.face_cells(f)[1] >= 0);
    }
  CHECK(interior == 120 - 48);
}

TEST_CASE("point location") {
  const BoxMesh m = BoxMesh::build(Box::unit(), 4);
  SUBCASE("centroid") {
    for (int c : {0, 17, 200, m.num_cells() - 1}) {
      const PointLocation loc = locate_point(m, m.cell_centroid(c));
      CHECK(loc.cell == c);
      for (double b : loc.bary) CHECK(b > 0.0);
    }
  }
  SUBCASE("exhaustive scan oracle") {
    const Vec3 x(0.5, 0.5, 0.8);
    int first = -1;
    for (int c = 0; c < m.num_cells(); ++c) {
      const auto b = barycentric(m, c, x);
      if (*std::min_element(b.begin(), b.end()) >= -1e-12) {
        first = c;
        break;
      }
    }
    const PointLocation loc = locate_point(m, x);
    CHECK(loc.cell == first);
    Vec3 back = Vec3::Zero();
    const auto v = m.cell_vertices(loc.cell);
    for (int i = 0; i < 4; ++i) back += loc.bary[i] * v[i];
    CHECK((back - x).norm() < 1e-14);
  }
  SUBCASE("shared vertex resolves to the lowest cell") {
    const int vid = (2 * 5 + 2) * 5 + 2;  // (0.5, 0.5, 0.5)
    int lowest = m.num_cells();
    for (int c = 0; c < m.num_cells(); ++c)
      for (int v : m.cells()[c])
        if (v == vid) lowest = std::min(lowest, c);
    CHECK(locate_point(m, m.vertices()[vid]).cell == lowest);
  }
  SUBCASE("outside") { CHECK_THROWS_AS(locate_point(m, Vec3(0.5, 1.2, 0.5)), OutOfDomainError); }
}

TEST_CASE("meshes are nested under integer refinement") {
  const BoxMesh coarse = BoxMesh::build(Box::unit(), 2);
  for (int r : {2, 3}) {
    const BoxMesh fine = BoxMesh::build(Box::unit(), 2 * r);
    for (int c = 0; c < fine.num_cells(); ++c) {
      const PointLocation loc = locate_point(coarse, fine.cell_centroid(c));
      for (const Vec3& v : fine.cell_vertices(c)) {
        const auto b = barycentric(coarse, loc.cell, v);
        CHECK(*std::min_element(b.begin(), b.end()) >= -1e-12);
      }
    }
  }
}
