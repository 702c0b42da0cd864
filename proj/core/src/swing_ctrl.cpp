#include "aslip/swing_ctrl.hpp"

#include <algorithm>
#include <cmath>

namespace aslip {

namespace {
constexpr double kOmega = 30.0;  // rad/s, swing height loop
constexpr double kZeta = 1.0;
}  // namespace

double swing_time_z(const SwingPlan& plan, double t) {
  if (t <= plan.T_S)
    return plan.z_max_sw * std::cos(t / plan.T_S * M_PI - 0.5 * M_PI);
  // Late strike: continue descending at the slope reached at T_S.
  const double slope = -plan.z_max_sw * M_PI / plan.T_S;
  return slope * (t - plan.T_S);
}

double swing_time_z_dot(const SwingPlan& plan, double t) {
  if (t <= plan.T_S)
    return -plan.z_max_sw * M_PI / plan.T_S *
           std::sin(t / plan.T_S * M_PI - 0.5 * M_PI);
  return -plan.z_max_sw * M_PI / plan.T_S;
}

double swing_time_z_ddot(const SwingPlan& plan, double t) {
  if (t <= plan.T_S) {
    const double w = M_PI / plan.T_S;
    return -plan.z_max_sw * w * w * std::cos(t / plan.T_S * M_PI - 0.5 * M_PI);
  }
  return 0.0;
}

double estimated_height(const SwingPlan& plan, const TerrainProfile& terrain,
                        double x) {
  return plan.estimate == TerrainEstimate::Smoothed
             ? terrain.smoothed_height_at(x)
             : terrain.clean_height_at(x);
}

double swing_z_ref(const SwingPlan& plan, const TerrainProfile& terrain,
                   double x_sw, double t) {
  return swing_time_z(plan, t) + estimated_height(plan, terrain, x_sw);
}

namespace {
double blend(const SwingPlan& plan, double t) {
  if (t >= plan.T_S) return 1.0;
  return 0.5 * (1.0 - std::cos(M_PI * t / plan.T_S));
}
double blend_dot(const SwingPlan& plan, double t) {
  if (t >= plan.T_S) return 0.0;
  return 0.5 * M_PI / plan.T_S * std::sin(M_PI * t / plan.T_S);
}
}  // namespace

double swing_x_ref(const SwingPlan& plan, double t, double u_des) {
  const double c = blend(plan, t);
  return plan.stance_foot_x + c * u_des - (1.0 - c) * plan.u_prev;
}

double swing_x_ref_dot(const SwingPlan& plan, double t, double u_des) {
  return blend_dot(plan, t) * (u_des + plan.u_prev);
}

SwingCommand swing_commands(const ModelParams& mp, const SwingPlan& plan,
                            const TerrainProfile& terrain,
                            const MassState& mass, const LegState& swing,
                            double mass_zddot, double t, double u_des,
                            double thetadot_prev) {
  SwingCommand cmd;

  const double x_ref = swing_x_ref(plan, t, u_des);
  double sin_target = (mass.x - x_ref) / swing.L;
  if (std::fabs(sin_target) > 0.95) {
    sin_target = std::clamp(sin_target, -0.95, 0.95);
    cmd.clamped = true;
  }
  cmd.theta_sw = std::asin(sin_target);

  const double theta = cmd.theta_sw;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double thetadot = thetadot_prev;

  // Vertical reference and consistent rates (terrain slope by central
  // difference on the estimated profile; curvature handled by feedback).
  const double hgrid = 0.01;
  const double est_slope = (estimated_height(plan, terrain, x_ref + hgrid) -
                            estimated_height(plan, terrain, x_ref - hgrid)) /
                           (2.0 * hgrid);
  const double xref_dot = swing_x_ref_dot(plan, t, u_des);
  const double z_ref = swing_z_ref(plan, terrain, x_ref, t);
  const double z_ref_dot = swing_time_z_dot(plan, t) + est_slope * xref_dot;
  const double z_ref_ddot = swing_time_z_ddot(plan, t);

  const double z_sw = mass.z - swing.L * cos_t;
  const double z_sw_dot =
      mass.zdot - swing.Ldot * cos_t + swing.L * sin_t * thetadot;

  const double z_cmd = z_ref_ddot + 2.0 * kZeta * kOmega * (z_ref_dot - z_sw_dot) +
                       kOmega * kOmega * (z_ref - z_sw);

  // z_sw'' = zddot - L'' cos + 2 L' sin thetadot + L cos thetadot^2 (+ theta'')
  cmd.tau_sw = (mass_zddot + 2.0 * swing.Ldot * sin_t * thetadot +
                swing.L * cos_t * thetadot * thetadot - z_cmd) /
               cos_t;
  cmd.tau_sw = std::clamp(cmd.tau_sw, -mp.tau_max, mp.tau_max);

  // Keep the commanded length inside the leg's kinematic range.
  const double L_pred = swing.L + swing.Ldot * 0.01;
  if (L_pred < mp.L_min && cmd.tau_sw < 0.0) {
    cmd.tau_sw = std::max(cmd.tau_sw, 0.0);
    cmd.clamped = true;
  } else if (L_pred > mp.L_max && cmd.tau_sw > 0.0) {
    cmd.tau_sw = std::min(cmd.tau_sw, 0.0);
    cmd.clamped = true;
  }
  return cmd;
}

}  // namespace aslip
