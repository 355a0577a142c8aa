#pragma once

#include <array>
#include <vector>

namespace maxdd {

/// Quadrature node in barycentric coordinates; weights sum to one and are
/// scaled by the measure of the simplex at the call site.
template <int N>
struct SimplexNode {
  std::array<double, N> bary;
  double weight;
};

using TetNode = SimplexNode<4>;
using TriNode = SimplexNode<3>;
using LineNode = SimplexNode<2>;

/// Polynomial degree integrated exactly by tet_rule().
inline constexpr int kTetRuleDegree = 5;
/// Polynomial degree integrated exactly by triangle_rule().
inline constexpr int kTriangleRuleDegree = 2;

/// Collapsed (conical product) Gauss rule on the tetrahedron with positive
/// weights, 4 x 4 x 3 nodes.
const std::vector<TetNode>& tet_rule();

/// Symmetric 3-point rule on the triangle.
const std::vector<TriNode>& triangle_rule();

/// n-point Gauss-Legendre rule on a segment.
std::vector<LineNode> gauss_line(int n);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace maxdd
