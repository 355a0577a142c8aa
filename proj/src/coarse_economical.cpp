#include "maxdd/coarse_economical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "maxdd/quadrature.hpp"

namespace maxdd {

namespace {

// k-th derivative of the Legendre polynomial P_j, so that the associated
// function is P_j^k(x) = (1 - x^2)^{k/2} Q_j^k(x) (no Condon-Shortley phase).
double legendre_q(int j, int k, double x) {
  if (k > j) return 0.0;
  double qkk = 1.0;
  for (int i = 1; i <= k; ++i) qkk *= 2.0 * i - 1.0;
  if (j == k) return qkk;
  double q0 = qkk;
  double q1 = x * (2.0 * k + 1.0) * qkk;
  for (int l = k + 2; l <= j; ++l) {
    const double q2 = ((2.0 * l - 1.0) * x * q1 - (l + k - 1.0) * q0) / (l - k);
    q0 = q1;
    q1 = q2;
  }
  return q1;
}

double sph_norm(int j, int m) {
  double ratio = 1.0;  // (j-m)! / (j+m)!
  for (int i = j - m + 1; i <= j + m; ++i) ratio /= i;
  const double n = std::sqrt((2.0 * j + 1.0) / (4.0 * std::numbers::pi) * ratio);
  return m == 0 ? n : std::sqrt(2.0) * n;
}

void check_index(int j, int k) {
  if (j < 0 || std::abs(k) > j) throw ConfigError("spherical harmonic index out of range");
}

Vec3 covariant(const StarMap& map, const VshEntry& e, const Vec3& x) {
  const Vec3 r = x - map.center;
  const double len = r.norm();
  if (!(len > 0.0)) throw ConfigError("pullback: point coincides with the star center");
  // D(Phi)^T lambda_hat = (I - d d^T) lambda_hat / |x - y| = lambda_hat / |x - y|
  // for tangential lambda_hat.
  return eval_vsh(e.j, e.k, e.nu, r / len).real() / len;
}

}  // namespace

std::vector<VshEntry> vsh_entries(int mu) {
  if (mu < 1) throw ConfigError("vsh_entries: mu must be >= 1");
  std::vector<VshEntry> out;
  for (int j = 1; j <= mu; ++j)
    for (int k = -j; k <= j; ++k)
      for (int nu : {2, 3}) out.push_back({j, k, nu});
  return out;
}

double real_sph_harm(int j, int k, const Vec3& p) {
  check_index(j, k);
  const int m = std::abs(k);
  const double z = std::clamp(p[2], -1.0, 1.0);
  const double u = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = std::atan2(p[1], p[0]);
  const double trig = k > 0 ? std::cos(m * phi) : (k < 0 ? std::sin(m * phi) : 1.0);
  return sph_norm(j, m) * std::pow(u, m) * legendre_q(j, m, z) * trig;
}

CVec3 eval_vsh(int j, int k, int nu, const Vec3& p) {
  check_index(j, k);
  if (nu != 2 && nu != 3) throw ConfigError("eval_vsh: nu must be 2 or 3");
  if (std::abs(p.norm() - 1.0) > 1e-12) throw ConfigError("eval_vsh: point not on the unit sphere");
  if (j == 0) return CVec3::Zero();
  const int m = std::abs(k);
  const double z = std::clamp(p[2], -1.0, 1.0);
  const double u = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = std::atan2(p[1], p[0]);
  const double cp = std::cos(phi), sp = std::sin(phi);
  double trig = 1.0, dtrig = 0.0;
  if (k > 0) {
    trig = std::cos(m * phi);
    dtrig = -m * std::sin(m * phi);
  } else if (k < 0) {
    trig = std::sin(m * phi);
    dtrig = m * std::cos(m * phi);
  }
  const double N = sph_norm(j, m);
  const double q = legendre_q(j, m, z);
  const double q1 = legendre_q(j, m + 1, z);
  // d/dtheta [u^m Q] = m z u^{m-1} Q - u^{m+1} Q', and (1/sin) d/dphi keeps
  // u^{m-1}; both are finite at the poles for m >= 1.
  double dtheta = -std::pow(u, m + 1) * q1;
  double dphi = 0.0;
  if (m >= 1) {
    dtheta += m * z * std::pow(u, m - 1) * q;
    dphi = std::pow(u, m - 1) * q * dtrig;
  }
  dtheta *= N * trig;
  dphi *= N;
  const Vec3 e_theta(z * cp, z * sp, -u);
  const Vec3 e_phi(-sp, cp, 0.0);
  Vec3 g = dtheta * e_theta + dphi * e_phi;
  if (nu == 3) g = g.cross(p);
  return g.cast<cplx>();
}

double StarMap::radius(const Vec3& d) const {
  double t = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (d[i] > 0.0) t = std::min(t, (box.hi[i] - center[i]) / d[i]);
    if (d[i] < 0.0) t = std::min(t, (box.lo[i] - center[i]) / d[i]);
  }
  return t;
}

Vec3 StarMap::to_sphere(const Vec3& x) const { return (x - center).normalized(); }

StarMap star_map(const BoxMesh& mesh, const CubeBox& cubes) {
  const Vec3 spacing = mesh.box().extent() / mesh.n();
  StarMap map;
  for (int d = 0; d < 3; ++d) {
    map.box.lo[d] = mesh.box().lo[d] + cubes.lo[d] * spacing[d];
    map.box.hi[d] = mesh.box().lo[d] + cubes.hi[d] * spacing[d];
  }
  map.center = 0.5 * (map.box.lo + map.box.hi);
  return map;
}

CVec3 pullback_trace(const StarMap& map, const VshEntry& entry, const Vec3& x,
                     const Vec3& normal) {
  const Vec3 v = covariant(map, entry, x);
  return (v - v.dot(normal) * normal).cast<cplx>();
}

CVector pullback_trace_dofs(const EdgeDofMap& dofmap, const LocalSystem& local,
                            const StarMap& map, const VshEntry& entry) {
  const BoxMesh& mesh = dofmap.mesh();
  static const auto nodes = gauss_line(3);
  CVector out(local.m());
  for (int i = 0; i < local.m(); ++i) {
    const int e = local.dofs[local.gamma[i]];
    const Vec3& a = mesh.vertices()[mesh.edges()[e][0]];
    const Vec3& b = mesh.vertices()[mesh.edges()[e][1]];
    double s = 0.0;
    for (const auto& node : nodes)
      s += node.weight * covariant(map, entry, node.bary[0] * a + node.bary[1] * b).dot(b - a);
    out[i] = s;
  }
  return out;
}

std::vector<int> independent_columns(const CMatrix& X, const RealSparseMatrix& S, double tol) {
  const Eigen::Index k = X.cols();
  std::vector<int> keep;
  if (k == 0) return keep;
  const CMatrix G = X.adjoint() * (S * X);
  RVector d = G.diagonal().real();
  const double dmax = d.maxCoeff();
  if (!(dmax > 0.0)) return keep;
  CMatrix Lf = CMatrix::Zero(k, k);
  std::vector<char> used(k, 0);
  for (Eigen::Index t = 0; t < k; ++t) {
    Eigen::Index p = -1;
    for (Eigen::Index i = 0; i < k; ++i)
      if (!used[i] && (p < 0 || d[i] > d[p])) p = i;
    if (p < 0 || d[p] <= tol * dmax) break;
    used[p] = 1;
    keep.push_back(static_cast<int>(p));
    const double piv = std::sqrt(d[p]);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (used[i] && i != p) continue;
      cplx v = G(i, p);
      for (Eigen::Index s = 0; s < t; ++s) v -= Lf(i, s) * std::conj(Lf(p, s));
      Lf(i, t) = v / piv;
      if (i != p) d[i] -= std::norm(Lf(i, t));
    }
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

EconomicalColumns build_economical_basis(const EdgeDofMap& dofmap, const LocalSystem& local,
                                         const StarMap& map, int mu, const RVector& chi) {
  const auto entries = vsh_entries(mu);
  EconomicalColumns out;
  out.candidates = static_cast<int>(entries.size());
  if (local.m() == 0) {
    out.columns.resize(local.size(), 0);
    return out;
  }
  CMatrix X(local.size(), entries.size());
  Eigen::Index c = 0;
  for (const auto& e : entries) {
    const CVector lambda = pullback_trace_dofs(dofmap, local, map, e);
    if (lambda.cwiseAbs().maxCoeff() <= 1e-14) continue;
    X.col(c++) = chi.cast<cplx>().cwiseProduct(harmonic_lift(local, lambda));
  }
  X.conservativeResize(Eigen::NoChange, c);
  const auto keep = independent_columns(X, local.S, 1e-10);
  out.columns.resize(local.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) out.columns.col(i) = X.col(keep[i]);
  return out;
}

int mu_rule(double kappa, double beta) {
  return std::max(1, static_cast<int>(std::lround(std::pow(kappa, 1.0 - 0.5 * beta))));
}

}  // namespace maxdd
