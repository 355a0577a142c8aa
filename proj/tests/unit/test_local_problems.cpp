#include <doctest.h>

#include <map>
#include <set>

#include "fixtures.hpp"

using namespace maxdd;
using fixtures::Discretization;

namespace {

struct LocalFixture {
  Discretization d;
  Decomposition dec;
  LocalFixture(int n, int parts, int layers, double kappa, double eps)
      : d(n, kappa, eps), dec(build_decomposition(*d.mesh, parts, layers)) {}
};

}  // namespace

TEST_CASE("single subdomain reproduces the global system") {
  LocalFixture f(3, 1, 1, 3.0, 3.0);
  const LocalSystem loc = assemble_local(*f.d.dofmap, f.d.tags, f.dec, 0, f.d.params);
  const AssembledSystem sys = assemble_system(*f.d.dofmap, f.d.tags, f.d.params, FieldSource{});
  CHECK(ComplexSparseMatrix(loc.A - sys.A).norm() < 1e-12 * sys.A.norm());
  CHECK(loc.m() == 0);
  CHECK(build_harmonic_basis(loc).cols() == 0);
}

TEST_CASE("local operators") {
  const double kappa = 2.0 * std::numbers::pi, eps = kappa;
  LocalFixture f(4, 2, 1, kappa, eps);
  std::mt19937_64 rng(4);
  for (int l : {0, 5}) {
    const LocalSystem loc = assemble_local(*f.d.dofmap, f.d.tags, f.dec, l, f.d.params);
    CHECK(loc.dofs == prolongation(f.dec, *f.d.dofmap, l));
    const RegionMatrices r = assemble_region(*f.d.dofmap, f.d.tags, f.dec.cells[l], f.d.params);
    const RealSparseMatrix T = r.T_outer + r.T_inner;
    const RealSparseMatrix S = r.K + kappa * kappa * r.M0 + kappa * T;
    CHECK(RealSparseMatrix(loc.S - S).norm() < 1e-12 * S.norm());
    for (int s = 0; s < 50; ++s) {
      const CVector v = fixtures::random_vector(loc.size(), rng);
      const cplx vav = v.dot(loc.A * v);
      const double vsv = v.dot(loc.S * v).real();
      CHECK(std::abs(vav) >= eps / (6 * kappa * kappa) * vsv);
      const double im = -eps * v.dot(r.M0 * v).real() - kappa * v.dot(T * v).real();
      CHECK(std::abs(vav.imag() - im) <= 1e-12 * std::abs(im));
    }
  }
}

TEST_CASE("interface edge count matches an enumeration") {
  LocalFixture f(4, 2, 1, 2.0, 2.0);
  const BoxMesh& m = *f.d.mesh;
  for (int l = 0; l < f.dec.size(); ++l) {
    const LocalSystem loc = assemble_local(*f.d.dofmap, f.d.tags, f.dec, l, f.d.params);
    // Faces of the subdomain with one adjacent subdomain cell that are not on dOmega.
    std::map<int, int> count;
    for (int c : f.dec.cells[l])
      for (int fc : m.cell_faces(c)) ++count[fc];
    std::set<int> edges;
    for (const auto& [fc, k] : count) {
      if (k != 1 || f.d.tags.is_boundary_face[fc]) continue;
      const auto& v = m.faces()[fc];
      edges.insert(m.find_edge(v[0], v[1]));
      edges.insert(m.find_edge(v[0], v[2]));
      edges.insert(m.find_edge(v[1], v[2]));
    }
    CHECK(loc.m() == static_cast<int>(edges.size()));
    std::set<int> got;
    for (int g : loc.gamma) got.insert(loc.dofs[g]);
    CHECK(got == edges);
  }
}

TEST_CASE("harmonic lifting") {
  const double kappa = 5.0;
  LocalFixture f(4, 2, 1, kappa, kappa);
  const LocalSystem loc = assemble_local(*f.d.dofmap, f.d.tags, f.dec, 3, f.d.params);
  REQUIRE(loc.m() > 0);
  CHECK(harmonic_lift(loc, CVector::Zero(loc.m())).norm() == 0.0);
  std::mt19937_64 rng(8);
  for (int s = 0; s < 10; ++s) {
    const CVector lam = fixtures::random_vector(loc.m(), rng);
    const CVector v = harmonic_lift(loc, lam);
    const CVector b = trace_load(loc, lam);
    CHECK((loc.A * v - b).norm() <= 1e-9 * b.norm());
    // Loads vanish on edges away from Gamma_l.
    std::vector<char> on_gamma(loc.size(), 0);
    for (int g : loc.gamma) on_gamma[g] = 1;
    for (int i = 0; i < loc.size(); ++i)
      if (b[i] != cplx(0.0)) CHECK(on_gamma[i]);
  }
  const CVector l1 = fixtures::random_vector(loc.m(), rng), l2 = fixtures::random_vector(loc.m(), rng);
  const cplx a(0.3, -1.7);
  const CVector lhs = harmonic_lift(loc, CVector(a * l1 + l2));
  const CVector rhs = a * harmonic_lift(loc, l1) + harmonic_lift(loc, l2);
  CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  CHECK_THROWS_AS(trace_load(loc, CVector::Zero(loc.m() + 1)), ConfigError);

  const CMatrix V = build_harmonic_basis(loc);
  CHECK(V.cols() == loc.m());
  CHECK(V.rows() == loc.size());
  const CMatrix G = V.adjoint() * loc.S * V;
  CHECK_NOTHROW(cholesky_lower(0.5 * (G + CMatrix(G.adjoint()))));
  // Column j lifts the j-th unit trace.
  CVector e = CVector::Zero(loc.m());
  e[2] = 1.0;
  CHECK((V.col(2) - harmonic_lift(loc, e)).norm() <= 1e-12 * V.col(2).norm());
  CHECK(build_harmonic_basis(loc) == V);
}
