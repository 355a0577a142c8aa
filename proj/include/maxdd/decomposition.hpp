#pragma once

#include <array>
#include <vector>

#include "maxdd/mesh.hpp"
#include "maxdd/nedelec.hpp"
#include "maxdd/types.hpp"

namespace maxdd {

/// Range of cubes [lo, hi) per axis.
struct CubeBox {
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};

  bool contains_cube(const std::array<int, 3>& c) const {
    for (int d = 0; d < 3; ++d)
      if (c[d] < lo[d] || c[d] >= hi[d]) return false;
    return true;
  }
  bool overlaps(const CubeBox& o) const {
    for (int d = 0; d < 3; ++d)
      if (hi[d] <= o.lo[d] || o.hi[d] <= lo[d]) return false;
    return true;
  }
};

/// Overlapping box decomposition: parts^3 non-overlapping cubes of cells,
/// each extended by `overlap_layers` element layers and clipped at the
/// domain boundary.
struct Decomposition {
  int parts_per_dim = 1;
  int overlap_layers = 1;
  std::vector<CubeBox> base;      // non-overlapping boxes
  std::vector<CubeBox> boxes;     // extended boxes (Omega_l)
  std::vector<CubeBox> halo_boxes;  // one further layer
  std::vector<std::vector<int>> cells;  // sorted cell indices of Omega_l
  std::vector<std::vector<int>> halo;   // sorted cell indices of the halo region
  std::vector<std::vector<int>> neighbors;  // Lambda(l), contains l
  double H = 0.0;  // max subdomain diameter

  int size() const { return static_cast<int>(boxes.size()); }
};

/// Layers for "generous" overlap, delta ~ H/6.
int generous_overlap_layers(int n, int parts_per_dim);

Decomposition build_decomposition(const BoxMesh& mesh, int parts_per_dim, int overlap_layers);

/// Partition of unity sampled at edge midpoints, stored per subdomain on
/// the subdomain DOF list P_l (sorted global edge indices of Omega_l).
struct PartitionOfUnity {
  std::vector<std::vector<int>> dofs;
  std::vector<RVector> chi;
};

PartitionOfUnity build_pou(const Decomposition& dec, const EdgeDofMap& dofmap);

/// Sorted global DOFs (edges) of the closure of Omega_l.
std::vector<int> prolongation(const Decomposition& dec, const EdgeDofMap& dofmap, int l);

/// R_l v: gather global entries.
CVector restrict_to(const std::vector<int>& dofs, const CVector& v);
/// out += E_l v: scatter-add local entries.
void extend_add(const std::vector<int>& dofs, const CVector& local, CVector& out);

}  // namespace maxdd
