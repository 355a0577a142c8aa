#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"

using namespace maxdd;

TEST_CASE("box decomposition geometry") {
  const BoxMesh m = BoxMesh::build(Box::unit(), 4);
  SUBCASE("n=4, parts=2, one layer") {
    const Decomposition dec = build_decomposition(m, 2, 1);
    CHECK(dec.size() == 8);
    for (int l = 0; l < 8; ++l) CHECK(dec.cells[l].size() == 27u * 6u);
    CHECK(dec.H == doctest::Approx(std::sqrt(3.0) * 0.75));
  }
  SUBCASE("single subdomain") {
    const Decomposition dec = build_decomposition(m, 1, 1);
    CHECK(dec.size() == 1);
    CHECK(dec.cells[0].size() == static_cast<std::size_t>(m.num_cells()));
    CHECK(dec.neighbors[0] == std::vector<int>{0});
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(build_decomposition(m, 3, 1), ConfigError);
    CHECK_THROWS_AS(build_decomposition(m, 2, 0), ConfigError);
  }
}

TEST_CASE("covering, halo and neighbor sets") {
  const BoxMesh m = BoxMesh::build(Box::unit(), 8);
  const Decomposition dec = build_decomposition(m, 4, 1);
  std::vector<int> cover(m.num_cells(), 0);
  for (const auto& cells : dec.cells)
    for (int c : cells) ++cover[c];
  CHECK(*std::min_element(cover.begin(), cover.end()) >= 1);
  std::size_t max_nb = 0;
  for (int l = 0; l < dec.size(); ++l) {
    // Oracle: subdomains sharing at least one cell.
    std::vector<int> nb;
    const std::set<int> mine(dec.cells[l].begin(), dec.cells[l].end());
    for (int k = 0; k < dec.size(); ++k)
      if (std::any_of(dec.cells[k].begin(), dec.cells[k].end(), [&](int c) { return mine.count(c) > 0; }))
        nb.push_back(k);
    CHECK(dec.neighbors[l] == nb);
    CHECK(nb.size() <= 27u);
    max_nb = std::max(max_nb, nb.size());
    CHECK(std::includes(dec.halo[l].begin(), dec.halo[l].end(), dec.cells[l].begin(), dec.cells[l].end()));
    CHECK(dec.halo[l].size() > dec.cells[l].size());
  }
  CHECK(max_nb == 27u);
  // Overlap width: an extended box is one layer wider than its base per open side.
  const CubeBox& b = dec.boxes[5];
  const CubeBox& o = dec.base[5];
  for (int d = 0; d < 3; ++d) {
    CHECK(o.lo[d] - b.lo[d] == (o.lo[d] > 0 ? 1 : 0));
    CHECK(b.hi[d] - o.hi[d] == (o.hi[d] < 8 ? 1 : 0));
  }
}

TEST_CASE("generous overlap layer count") {
  CHECK(generous_overlap_layers(12, 2) == 1);
  CHECK(generous_overlap_layers(24, 2) == 2);
  CHECK(generous_overlap_layers(27, 3) == 2);
  CHECK(generous_overlap_layers(6, 3) == 1);
}

TEST_CASE("prolongation and restriction") {
  const BoxMesh m = BoxMesh::build(Box::unit(), 4);
  const EdgeDofMap dm(m);
  const Decomposition dec = build_decomposition(m, 2, 1);
  std::mt19937_64 rng(1);
  for (int l = 0; l < dec.size(); ++l) {
    const auto dofs = prolongation(dec, dm, l);
    CHECK(std::is_sorted(dofs.begin(), dofs.end()));
    // Oracle: edges of the subdomain cells.
    std::set<int> edges;
    for (int c : dec.cells[l])
      for (int e : m.cell_edges(c)) edges.insert(e);
    CHECK(dofs == std::vector<int>(edges.begin(), edges.end()));
    const CVector loc = fixtures::random_vector(static_cast<Eigen::Index>(dofs.size()), rng);
    CVector g = CVector::Zero(dm.n_dofs());
    extend_add(dofs, loc, g);
    CHECK(restrict_to(dofs, g) == loc);
    const CVector v = fixtures::random_vector(dm.n_dofs(), rng);
    CVector er = CVector::Zero(dm.n_dofs());
    extend_add(dofs, restrict_to(dofs, v), er);
    for (int e = 0; e < dm.n_dofs(); ++e) CHECK(er[e] == (edges.count(e) ? v[e] : cplx(0.0)));
  }
  CHECK_THROWS_AS(prolongation(dec, dm, 8), ConfigError);
}

TEST_CASE("partition of unity exactness") {
  struct Case {
    int n, parts, layers;
  };
  for (const Case c : {Case{4, 2, 1}, Case{24, 2, 2}, Case{6, 3, 1}, Case{27, 3, 2}}) {
    CAPTURE(c.n);
    CAPTURE(c.parts);
    CAPTURE(c.layers);
    const BoxMesh m = BoxMesh::build(Box::unit(), c.n);
    const EdgeDofMap dm(m);
    const Decomposition dec = build_decomposition(m, c.parts, c.layers);
    const PartitionOfUnity pou = build_pou(dec, dm);
    RVector sum = RVector::Zero(dm.n_dofs());
    for (int l = 0; l < dec.size(); ++l) {
      CHECK(pou.dofs[l] == prolongation(dec, dm, l));
      CHECK(pou.chi[l].minCoeff() >= 0.0);
      CHECK(pou.chi[l].maxCoeff() <= 1.0);
      for (std::size_t i = 0; i < pou.dofs[l].size(); ++i) sum[pou.dofs[l][i]] += pou.chi[l][i];
    }
    CHECK((sum.array() - 1.0).abs().maxCoeff() <= 1e-14);
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      const CVector v = fixtures::random_vector(dm.n_dofs(), rng);
      CVector out = CVector::Zero(dm.n_dofs());
      for (int l = 0; l < dec.size(); ++l)
        extend_add(pou.dofs[l], pou.chi[l].cast<cplx>().cwiseProduct(restrict_to(pou.dofs[l], v)), out);
      worst = std::max(worst, (out - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-14);
  }
}

TEST_CASE("partition of unity values") {
  const BoxMesh m = BoxMesh::build(Box::unit(), 4);
  const EdgeDofMap dm(m);
  const Decomposition dec = build_decomposition(m, 2, 1);
  const PartitionOfUnity pou = build_pou(dec, dm);
  auto chi_at = [&](int l, int e) {
    const auto& d = pou.dofs[l];
    const auto it = std::lower_bound(d.begin(), d.end(), e);
    return it != d.end() && *it == e ? pou.chi[l][it - d.begin()] : 0.0;
  };
  auto vid = [](int i, int j, int k) { return (i * 5 + j) * 5 + k; };
  // Corner edge only in subdomain 0.
  const int corner = m.find_edge(vid(0, 0, 0), vid(1, 0, 0));
  CHECK(chi_at(0, corner) == 1.0);
  // Midpoint (0.5, 0.125, 0.125) lies on the symmetry plane x = 0.5 of the
  // two subdomains along x.
  const int mid = m.find_edge(vid(2, 0, 0), vid(2, 1, 1));
  REQUIRE(mid >= 0);
  int l0 = -1, l1 = -1;
  for (int l = 0; l < dec.size(); ++l)
    if (dec.base[l].lo[1] == 0 && dec.base[l].lo[2] == 0) (dec.base[l].lo[0] == 0 ? l0 : l1) = l;
  CHECK(chi_at(l0, mid) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(chi_at(l1, mid) == doctest::Approx(0.5).epsilon(1e-15));
}
