#include "maxdd/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace maxdd {

namespace {

// Legendre polynomial P_n(z) and its derivative.
std::pair<double, double> legendre(int n, double z) {
  double p0 = 1.0, p1 = z;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (z * p1 - p0) / (z * z - 1.0)};
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double dp = legendre(n, z).second;
    x[i] = -z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

std::vector<LineNode> gauss_line(int n) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  std::vector<LineNode> nodes;
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (x[i] + 1.0);
    nodes.push_back({{1.0 - t, t}, 0.5 * w[i]});
  }
  return nodes;
}

const std::vector<TetNode>& tet_rule() {
  static const std::vector<TetNode> rule = [] {
    // Duffy map: x = u, y = v(1-u), z = w(1-u)(1-v), Jacobian (1-u)^2 (1-v).
    // Degree-5 integrands become degree 7 in u, 6 in v and 5 in w.
    std::vector<double> xu, wu, xv, wv, xw, ww;
    gauss_legendre(4, xu, wu);
    gauss_legendre(4, xv, wv);
    gauss_legendre(3, xw, ww);
    std::vector<TetNode> nodes;
    for (std::size_t a = 0; a < xu.size(); ++a)
      for (std::size_t b = 0; b < xv.size(); ++b)
        for (std::size_t c = 0; c < xw.size(); ++c) {
          const double u = 0.5 * (xu[a] + 1.0);
          const double v = 0.5 * (xv[b] + 1.0);
          const double t = 0.5 * (xw[c] + 1.0);
          const double x = u;
          const double y = v * (1.0 - u);
          const double z = t * (1.0 - u) * (1.0 - v);
          // Reference volume 1/6; weights normalized to sum to one.
          const double weight = 0.125 * wu[a] * wv[b] * ww[c] * (1.0 - u) * (1.0 - u) *
                                (1.0 - v) * 6.0;
          nodes.push_back({{1.0 - x - y - z, x, y, z}, weight});
        }
    return nodes;
  }();
  return rule;
}

const std::vector<TriNode>& triangle_rule() {
  static const std::vector<TriNode> rule{
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
  };
  return rule;
}

}  // namespace maxdd
