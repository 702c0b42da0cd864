#include "aslip/hlip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aslip {

Eigen::Matrix2d ssp_flow(double lambda, double t) {
  Eigen::Matrix2d M;
  const double c = std::cosh(lambda * t);
  const double s = std::sinh(lambda * t);
  M << c, s / lambda, lambda * s, c;
  return M;
}

S2SModel s2s_matrices(double T_S, double T_D, double z0, double g) {
  if (T_S <= 0.0 || T_D < 0.0 || z0 <= 0.0)
    throw std::invalid_argument("s2s_matrices: T_S, z0 must be > 0, T_D >= 0");
  S2SModel m;
  m.T_S = T_S;
  m.T_D = T_D;
  m.z0 = z0;
  m.g = g;
  m.lambda = std::sqrt(g / z0);
  // Composition pre-impact -> pre-impact: support switch (p -= u), DSP drift
  // for T_D at constant velocity, then the SSP cosh/sinh flow for T_S.
  Eigen::Matrix2d drift;
  drift << 1.0, T_D, 0.0, 1.0;
  const Eigen::Matrix2d M = ssp_flow(m.lambda, T_S);
  m.A = M * drift;
  m.B = M * Eigen::Vector2d(-1.0, 0.0);
  return m;
}

Gait orbit_for_velocity(const S2SModel& m, double v_star) {
  Gait g;
  g.v_star = v_star;
  g.u_star = v_star * (m.T_S + m.T_D);
  const Eigen::Matrix2d IA = Eigen::Matrix2d::Identity() - m.A;
  const double det = IA.determinant();
  if (std::fabs(det) < 1e-12)
    throw std::invalid_argument("orbit_for_velocity: I - A singular");
  g.x_star = IA.inverse() * (m.B * g.u_star);
  g.K_db = deadbeat_gain(m);
  return g;
}

Eigen::RowVector2d deadbeat_gain(const S2SModel& m) {
  // Both eigenvalues of A+BK at zero: trace(A+BK) = 0 and det(A+BK) = 0.
  // det(A+BK) is linear in K (B is rank one), so this is a 2x2 linear solve:
  //   b1 k1 + b2 k2 = -tr(A)
  //   (a22 b1 - a12 b2) k1 + (a11 b2 - a21 b1) k2 = -det(A)
  const double a11 = m.A(0, 0), a12 = m.A(0, 1), a21 = m.A(1, 0),
               a22 = m.A(1, 1);
  const double b1 = m.B(0), b2 = m.B(1);
  Eigen::Matrix2d S;
  S << b1, b2, a22 * b1 - a12 * b2, a11 * b2 - a21 * b1;
  if (std::fabs(S.determinant()) < 1e-12)
    throw std::runtime_error("deadbeat_gain: singular synthesis system");
  const Eigen::Vector2d rhs(-m.A.trace(), -m.A.determinant());
  const Eigen::Vector2d k = S.inverse() * rhs;
  return Eigen::RowVector2d(k(0), k(1));
}

double stepping(const Eigen::Vector2d& x_now, double t_remaining,
                const Gait& gait, const S2SModel& m) {
  const double t = std::max(t_remaining, 0.0);
  const Eigen::Vector2d x_pred = ssp_flow(m.lambda, t) * x_now;
  return gait.u_star + gait.K_db * (x_pred - gait.x_star);
}

std::vector<Eigen::Vector2d> Box2d::corners() const {
  return {{lo(0), lo(1)}, {hi(0), lo(1)}, {hi(0), hi(1)}, {lo(0), hi(1)}};
}

bool Box2d::contains(const Eigen::Vector2d& p, double tol) const {
  return p(0) >= lo(0) - tol && p(0) <= hi(0) + tol && p(1) >= lo(1) - tol &&
         p(1) <= hi(1) + tol;
}

Box2d Box2d::bound(const std::vector<Eigen::Vector2d>& samples,
                   double inflate) {
  if (samples.empty()) throw std::invalid_argument("Box2d::bound: no samples");
  Box2d b;
  b.lo = samples.front();
  b.hi = samples.front();
  for (const auto& s : samples) {
    b.lo = b.lo.cwiseMin(s);
    b.hi = b.hi.cwiseMax(s);
  }
  const Eigen::Vector2d span = b.hi - b.lo;
  b.lo -= 0.5 * inflate * span;
  b.hi += 0.5 * inflate * span;
  return b;
}

namespace {
double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a,
             const Eigen::Vector2d& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}
}  // namespace

ConvexPolygon ConvexPolygon::hull(std::vector<Eigen::Vector2d> pts) {
  ConvexPolygon poly;
  std::sort(pts.begin(), pts.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
            });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                          return a(0) == b(0) && a(1) == b(1);
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) {
    poly.verts_ = pts;
    return poly;
  }
  std::vector<Eigen::Vector2d> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  poly.verts_ = std::move(h);
  return poly;
}

bool ConvexPolygon::contains(const Eigen::Vector2d& p, double tol) const {
  if (verts_.empty()) return false;
  if (verts_.size() == 1) return (p - verts_[0]).norm() <= tol;
  if (verts_.size() == 2) {
    const Eigen::Vector2d d = verts_[1] - verts_[0];
    const double len2 = d.squaredNorm();
    double t = len2 > 0 ? (p - verts_[0]).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (verts_[0] + t * d)).norm() <= tol;
  }
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    const auto& a = verts_[i];
    const auto& b = verts_[(i + 1) % verts_.size()];
    if (cross(a, b, p) < -tol) return false;
  }
  return true;
}

double ConvexPolygon::extent(int axis) const {
  double e = 0.0;
  for (const auto& v : verts_) e = std::max(e, std::fabs(v(axis)));
  return e;
}

ConvexPolygon error_invariant_set(const S2SModel& m,
                                  const Eigen::RowVector2d& K_db,
                                  const Box2d& W) {
  const Eigen::Matrix2d Acl = m.A + m.B * K_db;
  std::vector<Eigen::Vector2d> pts;
  for (const auto& w1 : W.corners())
    for (const auto& w2 : W.corners()) pts.push_back(w1 + Acl * w2);
  return ConvexPolygon::hull(std::move(pts));
}

}  // namespace aslip
