#include <doctest.h>

#include "fixtures.hpp"

using namespace maxdd;
using fixtures::Discretization;

namespace {

struct PencilFixture {
  Discretization d;
  Decomposition dec;
  PartitionOfUnity pou;
  std::vector<LocalSystem> locals;
  std::vector<CMatrix> V;
  PencilFixture(int n, int parts, int layers, double kappa)
      : d(n, kappa, kappa), dec(build_decomposition(*d.mesh, parts, layers)), pou(build_pou(dec, *d.dofmap)) {
    for (int l = 0; l < dec.size(); ++l) {
      locals.push_back(assemble_local(*d.dofmap, d.tags, dec, l, d.params));
      V.push_back(build_harmonic_basis(locals.back()));
    }
  }
};

PencilFixture& fixture() {
  static PencilFixture f(4, 2, 1, 2.0 * std::numbers::pi);
  return f;
}

GenEigResult eig_from(std::vector<double> values) {
  GenEigResult r;
  r.values = Eigen::Map<RVector>(values.data(), static_cast<Eigen::Index>(values.size()));
  r.vectors = CMatrix::Identity(r.values.size(), r.values.size());
  return r;
}

}  // namespace

TEST_CASE("mode selection threshold") {
  const SpectralSelection s = select_modes(eig_from({0.01, 0.04, 0.25, 1.0}), 0.3);
  CHECK(s.selected == std::vector<int>{2, 3});
  CHECK(select_modes(eig_from({0.2, 0.5, 0.98}), 0.995).selected.empty());
  // Ties at the threshold are all kept.
  CHECK(select_modes(eig_from({0.04, 0.09, 0.09}), 0.3).selected.size() == 2);
  // Clamp of tiny negative values, error for larger ones.
  CHECK(select_modes(eig_from({-5e-11, 0.5}), 0.5).eigenvalues[0] == 0.0);
  CHECK_THROWS_AS(select_modes(eig_from({-1e-6, 0.5}), 0.5), NumericalError);
  CHECK_THROWS_AS(select_modes(eig_from({0.5}), 1.0), ConfigError);
  CHECK_THROWS_AS(select_modes(eig_from({0.5}), 0.0), ConfigError);
}

TEST_CASE("rho rule") {
  CHECK(choose_rho(4 * std::numbers::pi, 0.0, 0.8, 0.5, 1.0) ==
        doctest::Approx(std::pow(4 * std::numbers::pi, -1.45)).epsilon(1e-12));
  CHECK(choose_rho(4 * std::numbers::pi, 0.0, 0.8, 0.5, 1.0) == doctest::Approx(0.02553).epsilon(1e-3));
  CHECK(choose_rho(5.0, 0.1, 0.5, 0.5, 1e12) == 0.999);
  CHECK(choose_rho(1.0, 0.2, 0.6, 0.5, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(choose_rho(5.0, 0.7, 0.5, 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(choose_rho(5.0, 0.1, 0.5, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(choose_rho(5.0, 0.1, 0.5, 0.5, -1.0), ConfigError);
  CHECK_THROWS_AS(choose_rho(-1.0, 0.1, 0.5, 0.5, 1.0), ConfigError);
}

TEST_CASE("pencil with trivial weights") {
  PencilFixture& f = fixture();
  const LocalSystem& loc = f.locals[0];
  const GeneoPencil one = build_geneo_pencil(loc, f.V[0], RVector::Ones(loc.size()));
  CHECK((one.L - one.R).norm() <= 1e-12 * one.R.norm());
  const SpectralSelection s1 = select_modes(one, 0.5);
  CHECK((s1.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-9);
  const GeneoPencil zero = build_geneo_pencil(loc, f.V[0], RVector::Zero(loc.size()));
  CHECK(zero.L.norm() == 0.0);
  const SpectralSelection s0 = select_modes(zero, 0.1);
  CHECK(s0.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s0.selected.empty());
  CHECK_THROWS_AS(build_geneo_pencil(loc, f.V[0], RVector::Ones(loc.size() + 1)), ConfigError);
}

TEST_CASE("pencil spectrum and eigenvectors") {
  PencilFixture& f = fixture();
  std::mt19937_64 rng(21);
  for (int l = 0; l < f.dec.size(); ++l) {
    const LocalSystem& loc = f.locals[l];
    const GeneoPencil p = build_geneo_pencil(loc, f.V[l], f.pou.chi[l]);
    CHECK((p.L - CMatrix(p.L.adjoint())).norm() <= 1e-12 * p.L.norm());
    CHECK((p.R - CMatrix(p.R.adjoint())).norm() <= 1e-12 * p.R.norm());
    const SpectralSelection s = select_modes(p, 0.3);
    const Eigen::Index m = s.eigenvalues.size();
    CHECK(s.eigenvalues.minCoeff() >= 0.0);
    // S_l-orthonormality of the harmonic modes V xi.
    const CMatrix X = f.V[l] * s.eigenvectors;
    CHECK((X.adjoint() * loc.S * X - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-10);
    // Rayleigh-quotient oracle: no random direction exceeds the top eigenvalue.
    double best = 0.0;
    for (int s2 = 0; s2 < 1000; ++s2) {
      const CVector c = fixtures::random_vector(m, rng);
      best = std::max(best, c.dot(p.L * c).real() / c.dot(p.R * c).real());
    }
    CHECK(best <= s.eigenvalues[m - 1] * (1 + 1e-10));
  }
}

TEST_CASE("projection bound") {
  PencilFixture& f = fixture();
  std::mt19937_64 rng(17);
  for (double rho : {0.1, 0.3}) {
    for (int l = 0; l < f.dec.size(); ++l) {
      const LocalSystem& loc = f.locals[l];
      const SpectralSelection s = select_modes(build_geneo_pencil(loc, f.V[l], f.pou.chi[l]), rho);
      const Eigen::Index m = s.eigenvalues.size();
      const CMatrix Xi = s.eigenvectors;
      CMatrix P = CMatrix::Zero(m, m);
      // R-orthogonal projection onto the selected eigenvectors.
      const GeneoPencil p = build_geneo_pencil(loc, f.V[l], f.pou.chi[l]);
      for (int i : s.selected) P += Xi.col(i) * (Xi.col(i).adjoint() * p.R);
      const auto W = f.pou.chi[l].cast<cplx>().asDiagonal();
      for (int t = 0; t < 100; ++t) {
        const CVector c = fixtures::random_vector(m, rng);
        const CVector rest = c - P * c;
        const double lhs = fixtures::s_norm(loc.S, CVector(W * (f.V[l] * rest)));
        const double rhs = rho * fixtures::s_norm(loc.S, CVector(f.V[l] * c));
        CHECK(lhs <= rhs + 1e-10);
      }
    }
  }
}

TEST_CASE("monotone selection in rho") {
  PencilFixture& f = fixture();
  const GenEigResult eig = hermitian_gen_eig(
      build_geneo_pencil(f.locals[0], f.V[0], f.pou.chi[0]).L, build_geneo_pencil(f.locals[0], f.V[0], f.pou.chi[0]).R);
  std::size_t prev = 0;
  for (double rho : {0.9, 0.7, 0.5, 0.3, 0.1, 0.05}) {
    const std::size_t k = select_modes(eig, rho).selected.size();
    CHECK(k >= prev);
    prev = k;
  }
}

TEST_CASE("coarse space assembly") {
  PencilFixture& f = fixture();
  const AssembledSystem sys = assemble_system(*f.d.dofmap, f.d.tags, f.d.params, FieldSource{});
  SUBCASE("empty") {
    CoarseBuilder b(f.d.n_dofs());
    const CoarseSpace cs = b.finish(sys.A);
    CHECK(cs.dim() == 0);
  }
  SUBCASE("spectral columns") {
    CoarseBuilder b(f.d.n_dofs());
    for (int l = 0; l < f.dec.size(); ++l) {
      const SpectralSelection s = select_modes(build_geneo_pencil(f.locals[l], f.V[l], f.pou.chi[l]), 0.3);
      add_spectral_columns(b, f.locals[l], f.V[l], f.pou.chi[l], s);
    }
    b.add_column(0, f.locals[0].dofs, CVector::Zero(f.locals[0].size()));
    const CoarseSpace cs = b.finish(sys.A);
    CHECK(cs.rejected == 1);
    CHECK(cs.dim() > 0);
    CHECK(cs.owner.size() == static_cast<std::size_t>(cs.dim()));
    for (int j = 0; j < cs.dim(); ++j) {
      const auto& dofs = f.locals[cs.owner[j]].dofs;
      for (Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>::InnerIterator it(cs.C, j); it; ++it)
        CHECK(std::binary_search(dofs.begin(), dofs.end(), static_cast<int>(it.row())));
    }
    const CMatrix A0 = CMatrix(cs.C.adjoint()) * (CMatrix(sys.A) * CMatrix(cs.C));
    CHECK((CMatrix(cs.A0) - A0).norm() <= 1e-12 * A0.norm());
    std::mt19937_64 rng(4);
    const CVector b0 = fixtures::random_vector(cs.dim(), rng);
    CHECK((A0 * cs.solve(b0) - b0).norm() <= 1e-10 * b0.norm());
  }
  SUBCASE("interleaved owners") {
    CoarseBuilder b(f.d.n_dofs());
    std::mt19937_64 rng(6);
    for (int l : {0, 1, 0, 7, 1}) b.add_column(l, f.locals[l].dofs, fixtures::random_vector(f.locals[l].size(), rng));
    const CoarseSpace cs = b.finish(sys.A);
    CHECK(cs.owner == std::vector<int>{0, 1, 0, 7, 1});
    const CMatrix A0 = CMatrix(cs.C.adjoint()) * (CMatrix(sys.A) * CMatrix(cs.C));
    CHECK((CMatrix(cs.A0) - A0).norm() <= 1e-12 * A0.norm());
  }
  SUBCASE("repeated column") {
    CoarseBuilder b(f.d.n_dofs());
    std::mt19937_64 rng(8);
    const CVector col = fixtures::random_vector(f.locals[2].size(), rng);
    b.add_column(2, f.locals[2].dofs, col);
    b.add_column(2, f.locals[2].dofs, col);
    try {
      (void)b.finish(sys.A);
      FAIL("expected a singular coarse operator");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("singular") != std::string::npos);
    }
  }
}
