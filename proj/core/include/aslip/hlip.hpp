#pragma once

#include <Eigen/Dense>
#include <vector>

namespace aslip {

/// Step-to-step model of the H-LIP: pre-impact state x = [p, pdot] evolves as
/// x_{k+1} = A x_k + B u_k with the step size u as input.
struct S2SModel {
  double T_S = 0.4;   // s
  double T_D = 0.1;   // s
  double z0 = 1.0;    // m
  double g = 9.81;    // m/s^2
  double lambda = 0;  // sqrt(g/z0)
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
};

/// Period-1 orbit plus the deadbeat stepping gain.
struct Gait {
  double v_star = 0.0;   // desired pre-impact velocity, m/s
  double u_star = 0.0;   // nominal step size, m
  Eigen::Vector2d x_star = Eigen::Vector2d::Zero();
  Eigen::RowVector2d K_db = Eigen::RowVector2d::Zero();
};

/// Convex polygon with half-plane membership; used for the error invariant
/// set E = W (+) (A+BK)W.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  /// Convex hull of arbitrary points (degenerate inputs give a segment or
  /// point).
  static ConvexPolygon hull(std::vector<Eigen::Vector2d> points);

  bool contains(const Eigen::Vector2d& p, double tol = 1e-9) const;
  const std::vector<Eigen::Vector2d>& vertices() const { return verts_; }

  /// Extent along an axis (0 = p, 1 = pdot), i.e. max |v[axis]| over vertices.
  double extent(int axis) const;

 private:
  std::vector<Eigen::Vector2d> verts_;  // CCW
};

/// Axis-aligned disturbance box, centered representation [lo, hi] per axis.
struct Box2d {
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Zero();

  std::vector<Eigen::Vector2d> corners() const;
  bool contains(const Eigen::Vector2d& p, double tol = 1e-12) const;
  /// Tight box around samples, inflated by the given fraction.
  static Box2d bound(const std::vector<Eigen::Vector2d>& samples,
                     double inflate = 0.05);
};

/// Closed-form A, B from T_S, T_D, z0.
S2SModel s2s_matrices(double T_S, double T_D, double z0, double g = 9.81);

/// Period-1 orbit for a desired pre-impact velocity: u* = v*(T_S + T_D),
/// x* = (I - A)^{-1} B u*. Throws on singular I - A.
Gait orbit_for_velocity(const S2SModel& m, double v_star);

/// Deadbeat gain: (A + B K)^2 = 0. Throws if the linear system for K is
/// singular.
Eigen::RowVector2d deadbeat_gain(const S2SModel& m);

/// Desired step size from the current SSP state: flow the H-LIP SSP dynamics
/// for the remaining time, then apply u = u* + K (x_pred - x*).
double stepping(const Eigen::Vector2d& x_now, double t_remaining,
                const Gait& gait, const S2SModel& m);

/// SSP flow map over duration t: [p;pdot] -> M(t)[p;pdot].
Eigen::Matrix2d ssp_flow(double lambda, double t);

/// E = W (+) (A+BK)W as the convex hull of the 16 vertex sums.
ConvexPolygon error_invariant_set(const S2SModel& m,
                                  const Eigen::RowVector2d& K_db,
                                  const Box2d& W);

}  // namespace aslip
