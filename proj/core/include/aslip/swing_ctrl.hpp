#pragma once

#include "aslip/dynamics.hpp"
#include "aslip/terrain.hpp"

namespace aslip {

/// Which height the swing controller believes in when building its vertical
/// reference; the touchdown guard always uses the true (noisy) terrain.
enum class TerrainEstimate { Smoothed, NoiseFree };

/// Per-step swing plan, rebuilt at every lift-off.
struct SwingPlan {
  double z_max_sw = 0.12;  // apex height, m
  double T_S = 0.4;
  double u_prev = 0.0;       // previous step size, m
  double stance_foot_x = 0.0;
  TerrainEstimate estimate = TerrainEstimate::Smoothed;
};

/// Time-based vertical component; past T_S it continues with the constant
/// downward slope it had at T_S (late-strike extension).
double swing_time_z(const SwingPlan& plan, double t);
double swing_time_z_dot(const SwingPlan& plan, double t);
double swing_time_z_ddot(const SwingPlan& plan, double t);

/// Vertical swing-foot reference: time component plus estimated terrain.
double swing_z_ref(const SwingPlan& plan, const TerrainProfile& terrain,
                   double x_sw, double t);

/// Estimated terrain height at x per the plan's estimate mode.
double estimated_height(const SwingPlan& plan, const TerrainProfile& terrain,
                        double x);

/// Horizontal reference x_s + c(t) u_k - (1 - c(t)) u_prev with
/// c(t) = (1 - cos(pi t / T_S)) / 2 (clamped to 1 past T_S).
double swing_x_ref(const SwingPlan& plan, double t, double u_des);
double swing_x_ref_dot(const SwingPlan& plan, double t, double u_des);

struct SwingCommand {
  double theta_sw = 0.0;  // set directly (massless leg)
  double tau_sw = 0.0;    // L'' command
  bool clamped = false;   // foot target unreachable, L target clamped
};

/// Converts the foot references into a leg command: theta from geometry so
/// the foot x matches the reference, tau from feedback linearization of the
/// foot height (omega = 30 rad/s, critically damped). theta_prev/thetadot
/// carry the kinematic angle rate across ticks.
SwingCommand swing_commands(const ModelParams& mp, const SwingPlan& plan,
                            const TerrainProfile& terrain,
                            const MassState& mass, const LegState& swing,
                            double mass_zddot, double t, double u_des,
                            double thetadot_prev);

}  // namespace aslip
