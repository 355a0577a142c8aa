#include "maxdd/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace maxdd {

namespace {

std::vector<int> cells_in(const BoxMesh& mesh, const CubeBox& b) {
  std::vector<int> out;
  for (int i = b.lo[0]; i < b.hi[0]; ++i)
    for (int j = b.lo[1]; j < b.hi[1]; ++j)
      for (int k = b.lo[2]; k < b.hi[2]; ++k) {
        const int cube = mesh.cube_index(i, j, k);
        for (int c = 6 * cube; c < 6 * cube + 6; ++c) out.push_back(c);
      }
  std::sort(out.begin(), out.end());
  return out;
}

CubeBox grow(const CubeBox& b, int layers, int n) {
  CubeBox g;
  for (int d = 0; d < 3; ++d) {
    g.lo[d] = std::max(0, b.lo[d] - layers);
    g.hi[d] = std::min(n, b.hi[d] + layers);
  }
  return g;
}

}  // namespace

int generous_overlap_layers(int n, int parts_per_dim) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(n) / (6.0 * parts_per_dim))));
}

Decomposition build_decomposition(const BoxMesh& mesh, int parts_per_dim, int overlap_layers) {
  const int n = mesh.n();
  if (parts_per_dim < 1) throw ConfigError("parts_per_dim must be >= 1");
  if (n % parts_per_dim != 0)
    throw ConfigError("parts_per_dim " + std::to_string(parts_per_dim) +
                      " does not divide the mesh size n = " + std::to_string(n));
  if (overlap_layers < 1) throw ConfigError("overlap_layers must be >= 1");

  Decomposition dec;
  dec.parts_per_dim = parts_per_dim;
  dec.overlap_layers = overlap_layers;
  const int w = n / parts_per_dim;
  const Vec3 spacing = mesh.box().extent() / n;
  for (int a = 0; a < parts_per_dim; ++a)
    for (int b = 0; b < parts_per_dim; ++b)
      for (int c = 0; c < parts_per_dim; ++c) {
        CubeBox base{{a * w, b * w, c * w}, {(a + 1) * w, (b + 1) * w, (c + 1) * w}};
        dec.base.push_back(base);
        dec.boxes.push_back(grow(base, overlap_layers, n));
        dec.halo_boxes.push_back(grow(base, overlap_layers + 1, n));
      }
  for (int l = 0; l < dec.size(); ++l) {
    dec.cells.push_back(cells_in(mesh, dec.boxes[l]));
    dec.halo.push_back(cells_in(mesh, dec.halo_boxes[l]));
    Vec3 ext;
    for (int d = 0; d < 3; ++d) ext[d] = (dec.boxes[l].hi[d] - dec.boxes[l].lo[d]) * spacing[d];
    dec.H = std::max(dec.H, ext.norm());
  }
  dec.neighbors.resize(dec.size());
  for (int l = 0; l < dec.size(); ++l)
    for (int j = 0; j < dec.size(); ++j)
      if (dec.boxes[l].overlaps(dec.boxes[j])) dec.neighbors[l].push_back(j);
  return dec;
}

std::vector<int> prolongation(const Decomposition& dec, const EdgeDofMap& dofmap, int l) {
  if (l < 0 || l >= dec.size()) throw ConfigError("prolongation: invalid subdomain index");
  std::vector<int> dofs;
  dofs.reserve(dec.cells[l].size() * 6);
  for (int c : dec.cells[l])
    for (int le = 0; le < 6; ++le) dofs.push_back(dofmap.dof(c, le));
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

PartitionOfUnity build_pou(const Decomposition& dec, const EdgeDofMap& dofmap) {
  const BoxMesh& mesh = dofmap.mesh();
  const int n = mesh.n();
  const Box& box = mesh.box();
  const Vec3 ext = box.extent();
  const int L = dec.overlap_layers;

  // w_l(x): distance in cell units from x to the faces of Omega_l that lie
  // inside the domain, capped at L.
  auto weight = [&](int l, const Vec3& x) {
    const CubeBox& b = dec.boxes[l];
    double dist = L;
    for (int d = 0; d < 3; ++d) {
      const double t = (x[d] - box.lo[d]) / ext[d] * n;
      if (t < b.lo[d] - 1e-12 || t > b.hi[d] + 1e-12) return 0.0;
      if (b.lo[d] > 0) dist = std::min(dist, t - b.lo[d]);
      if (b.hi[d] < n) dist = std::min(dist, b.hi[d] - t);
    }
    return std::max(0.0, dist);
  };

  PartitionOfUnity pou;
  pou.dofs.resize(dec.size());
  pou.chi.resize(dec.size());
  std::vector<double> total(dofmap.n_dofs(), 0.0);
  std::vector<std::vector<double>> raw(dec.size());
  for (int l = 0; l < dec.size(); ++l) {
    pou.dofs[l] = prolongation(dec, dofmap, l);
    raw[l].resize(pou.dofs[l].size());
    for (std::size_t i = 0; i < pou.dofs[l].size(); ++i) {
      const int e = pou.dofs[l][i];
      raw[l][i] = weight(l, mesh.edge_midpoint(e));
      total[e] += raw[l][i];
    }
  }
  for (int e = 0; e < dofmap.n_dofs(); ++e)
    if (!(total[e] > 0.0))
      throw NumericalError("build_pou: edge " + std::to_string(e) + " is not covered");

  // Normalize; the last contributor to each edge takes the remainder so the
  // sum is exactly one in floating point.
  std::vector<int> last(dofmap.n_dofs(), -1);
  std::vector<double> acc(dofmap.n_dofs(), 0.0);
  for (int l = 0; l < dec.size(); ++l)
    for (std::size_t i = 0; i < pou.dofs[l].size(); ++i)
      if (raw[l][i] > 0.0) last[pou.dofs[l][i]] = l;
  for (int l = 0; l < dec.size(); ++l) {
    pou.chi[l].resize(pou.dofs[l].size());
    for (std::size_t i = 0; i < pou.dofs[l].size(); ++i) {
      const int e = pou.dofs[l][i];
      double v = 0.0;
      if (raw[l][i] > 0.0) v = last[e] == l ? 1.0 - acc[e] : raw[l][i] / total[e];
      acc[e] += v;
      pou.chi[l][i] = v;
    }
  }
  return pou;
}

CVector restrict_to(const std::vector<int>& dofs, const CVector& v) {
  CVector out(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) out[i] = v[dofs[i]];
  return out;
}

void extend_add(const std::vector<int>& dofs, const CVector& local, CVector& out) {
  for (std::size_t i = 0; i < dofs.size(); ++i) out[dofs[i]] += local[i];
}

}  // namespace maxdd
