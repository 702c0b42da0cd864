#pragma once

#include <array>

#include "aslip/terrain.hpp"

namespace aslip {

/// Physical constants of the aSLIP; defaults match a Cassie-scale model.
struct ModelParams {
  double mass = 33.0;      // kg
  double K = 8000.0;       // N/m
  double D = 100.0;        // N s/m
  double g = 9.81;         // m/s^2
  double tau_max = 200.0;  // |L''| actuator bound, m/s^2
  double L_min = 0.5;      // m, swing target clamp
  double L_max = 1.2;      // m
};

struct MassState {
  double x = 0.0, z = 0.0;
  double xdot = 0.0, zdot = 0.0;
};

/// Per-leg state. Stance legs have the foot pinned; the spring deformation
/// is derived from geometry (s = L - r), which keeps the pin constraint
/// exact. Swing legs carry theta explicitly (set kinematically) and have
/// s = 0 by assumption.
struct LegState {
  double foot_x = 0.0, foot_z = 0.0;
  double L = 1.0;     // uncompressed length, m
  double Ldot = 0.0;  // m/s
  double theta = 0.0; // swing only; stance theta comes from geometry
};

/// Geometry/force snapshot of a stance leg.
struct StanceKin {
  double r, rdot;          // compressed length and rate
  double theta, thetadot;  // angle from vertical (foot + r(sin,cos) = mass)
  double s, sdot;          // spring deformation L - r
  double force;            // K s + D sdot
  double sin_t, cos_t;
};

/// Throws std::domain_error on r <= 0.
StanceKin stance_kinematics(const ModelParams& mp, const MassState& mass,
                            const LegState& leg);

double leg_force(const ModelParams& mp, double s, double sdot);

enum class PhaseTag { SSP, DSP };

/// Discriminated walking phase. In SSP legs[0] is stance and legs[1] swing;
/// in DSP legs[0] is s1 (the leg scheduled to lift off) and legs[1] is s2.
struct WalkPhase {
  PhaseTag tag = PhaseTag::DSP;
  std::array<LegState, 2> legs;
  double F0_s1 = 0.0;   // DSP: s1 force at DSP entry, N
  double t_phase = 0.0; // phase clock, s
};

/// Full continuous state of one walking phase.
struct HybridState {
  MassState mass;
  WalkPhase phase;
  double t = 0.0;  // global time
};

/// Time-derivative of the integrated coordinates
/// (x, z, xdot, zdot, L and Ldot per leg).
struct StateDeriv {
  double xdot, zdot, xddot, zddot;
  std::array<double, 2> Ldot, Lddot;
};

/// Vector field of the current phase. taus are the leg-length accelerations:
/// SSP expects {tau_stance, tau_swing}, DSP {tau_s1, tau_s2}.
StateDeriv continuous_dynamics(const ModelParams& mp, const HybridState& st,
                               const std::array<double, 2>& taus);

/// Mass acceleration under the current leg forces.
void mass_accel(const ModelParams& mp, const HybridState& st, double& xddot,
                double& zddot);

/// Radial acceleration of a stance leg: e . P'' + r thetadot^2.
double stance_rddot(const ModelParams& mp, const HybridState& st,
                    const StanceKin& k);

/// Swing foot position in SSP (mass - L_sw (sin, cos) theta_sw).
void swing_foot_position(const MassState& mass, const LegState& swing,
                         double& fx, double& fz);

/// SSP touchdown guard: swing foot height above terrain; the event fires on
/// a down-crossing gated by t_phase > 0.5 T_S.
double guard_touchdown(const HybridState& st, const TerrainProfile& terrain);

/// DSP lift-off guard: force on s1; fires on a down-crossing of zero.
double guard_liftoff(const ModelParams& mp, const HybridState& st);

/// SSP -> DSP impact map. Mass state continuous; the striking leg is pinned
/// where it landed, with s from geometry and sdot from kinematic consistency.
/// Returns false (flagged failed step) if the new leg initializes with
/// negative force.
bool transition_td(const ModelParams& mp, const TerrainProfile& terrain,
                   HybridState& st);

/// DSP -> SSP lift-off map: s1 becomes the swing leg with zero spring state;
/// mass state continuous, phase clock resets.
void transition_lo(const ModelParams& mp, HybridState& st);

/// Kinetic + gravitational + spring potential energy.
double total_energy(const ModelParams& mp, const HybridState& st);

}  // namespace aslip
