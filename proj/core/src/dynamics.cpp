#include "aslip/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace aslip {

double leg_force(const ModelParams& mp, double s, double sdot) {
  return mp.K * s + mp.D * sdot;
}

StanceKin stance_kinematics(const ModelParams& mp, const MassState& mass,
                            const LegState& leg) {
  const double dx = mass.x - leg.foot_x;
  const double dz = mass.z - leg.foot_z;
  const double r = std::hypot(dx, dz);
  if (r <= 1e-9) throw std::domain_error("stance leg in singular configuration");
  StanceKin k;
  k.r = r;
  k.sin_t = dx / r;
  k.cos_t = dz / r;
  k.theta = std::atan2(dx, dz);
  k.rdot = (dx * mass.xdot + dz * mass.zdot) / r;
  k.thetadot = (mass.xdot * k.cos_t - mass.zdot * k.sin_t) / r;
  k.s = leg.L - r;
  k.sdot = leg.Ldot - k.rdot;
  k.force = leg_force(mp, k.s, k.sdot);
  return k;
}

void mass_accel(const ModelParams& mp, const HybridState& st, double& xddot,
                double& zddot) {
  double fx = 0.0, fz = 0.0;
  const int n_stance = st.phase.tag == PhaseTag::SSP ? 1 : 2;
  for (int i = 0; i < n_stance; ++i) {
    const StanceKin k = stance_kinematics(mp, st.mass, st.phase.legs[i]);
    fx += k.force * k.sin_t;
    fz += k.force * k.cos_t;
  }
  xddot = fx / mp.mass;
  zddot = fz / mp.mass - mp.g;
}

double stance_rddot(const ModelParams& mp, const HybridState& st,
                    const StanceKin& k) {
  double xdd, zdd;
  mass_accel(mp, st, xdd, zdd);
  return k.sin_t * xdd + k.cos_t * zdd + k.r * k.thetadot * k.thetadot;
}

StateDeriv continuous_dynamics(const ModelParams& mp, const HybridState& st,
                               const std::array<double, 2>& taus) {
  StateDeriv d;
  d.xdot = st.mass.xdot;
  d.zdot = st.mass.zdot;
  mass_accel(mp, st, d.xddot, d.zddot);
  for (int i = 0; i < 2; ++i) {
    d.Ldot[i] = st.phase.legs[i].Ldot;
    d.Lddot[i] = taus[i];
  }
  return d;
}

void swing_foot_position(const MassState& mass, const LegState& swing,
                         double& fx, double& fz) {
  fx = mass.x - swing.L * std::sin(swing.theta);
  fz = mass.z - swing.L * std::cos(swing.theta);
}

double guard_touchdown(const HybridState& st, const TerrainProfile& terrain) {
  double fx, fz;
  swing_foot_position(st.mass, st.phase.legs[1], fx, fz);
  return fz - terrain.height_at(fx);
}

double guard_liftoff(const ModelParams& mp, const HybridState& st) {
  return stance_kinematics(mp, st.mass, st.phase.legs[0]).force;
}

bool transition_td(const ModelParams& mp, const TerrainProfile& terrain,
                   HybridState& st) {
  LegState old_stance = st.phase.legs[0];
  LegState striking = st.phase.legs[1];

  double fx, fz;
  swing_foot_position(st.mass, striking, fx, fz);
  striking.foot_x = fx;
  striking.foot_z = terrain.height_at(fx);  // pin on the ground

  const StanceKin k_old = stance_kinematics(mp, st.mass, old_stance);

  st.phase.tag = PhaseTag::DSP;
  st.phase.legs[0] = old_stance;  // s1: will lift off
  st.phase.legs[1] = striking;    // s2
  st.phase.F0_s1 = k_old.force;
  st.phase.t_phase = 0.0;

  const StanceKin k_new = stance_kinematics(mp, st.mass, striking);
  return k_new.force >= 0.0;
}

void transition_lo(const ModelParams& mp, HybridState& st) {
  LegState lifting = st.phase.legs[0];
  const StanceKin k = stance_kinematics(mp, st.mass, lifting);
  // Spring compression goes to zero on the swing leg; L and Ldot continuous.
  lifting.theta = k.theta;
  st.phase.tag = PhaseTag::SSP;
  st.phase.legs[0] = st.phase.legs[1];  // new stance
  st.phase.legs[1] = lifting;           // swing
  st.phase.F0_s1 = 0.0;
  st.phase.t_phase = 0.0;
}

double total_energy(const ModelParams& mp, const HybridState& st) {
  const double ke = 0.5 * mp.mass *
                    (st.mass.xdot * st.mass.xdot + st.mass.zdot * st.mass.zdot);
  const double pe = mp.mass * mp.g * st.mass.z;
  double spring = 0.0;
  const int n_stance = st.phase.tag == PhaseTag::SSP ? 1 : 2;
  for (int i = 0; i < n_stance; ++i) {
    const StanceKin k = stance_kinematics(mp, st.mass, st.phase.legs[i]);
    spring += 0.5 * mp.K * k.s * k.s;
  }
  return ke + pe + spring;
}

}  // namespace aslip
