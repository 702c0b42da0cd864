#include "aslip/sim_runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aslip {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Integrated coordinates: mass (x, z, xdot, zdot) + per-leg (L, Ldot).
struct StateVec {
  std::array<double, 8> y;
};

StateVec pack(const HybridState& st) {
  StateVec v;
  v.y = {st.mass.x,          st.mass.z,          st.mass.xdot,
         st.mass.zdot,       st.phase.legs[0].L, st.phase.legs[0].Ldot,
         st.phase.legs[1].L, st.phase.legs[1].Ldot};
  return v;
}

void unpack(const StateVec& v, HybridState& st) {
  st.mass.x = v.y[0];
  st.mass.z = v.y[1];
  st.mass.xdot = v.y[2];
  st.mass.zdot = v.y[3];
  st.phase.legs[0].L = v.y[4];
  st.phase.legs[0].Ldot = v.y[5];
  st.phase.legs[1].L = v.y[6];
  st.phase.legs[1].Ldot = v.y[7];
}

StateVec deriv(const ModelParams& mp, HybridState& st, const StateVec& v,
               const std::array<double, 2>& taus) {
  unpack(v, st);
  const StateDeriv d = continuous_dynamics(mp, st, taus);
  StateVec out;
  out.y = {d.xdot,    d.zdot,    d.xddot,    d.zddot,
           d.Ldot[0], d.Lddot[0], d.Ldot[1], d.Lddot[1]};
  return out;
}

// One RK4 step of size h; st carries phase structure (feet pins), v the
// integrated coordinates.
StateVec rk4_step(const ModelParams& mp, HybridState& st, const StateVec& v0,
                  const std::array<double, 2>& taus, double h) {
  const StateVec k1 = deriv(mp, st, v0, taus);
  StateVec tmp;
  for (int i = 0; i < 8; ++i) tmp.y[i] = v0.y[i] + 0.5 * h * k1.y[i];
  const StateVec k2 = deriv(mp, st, tmp, taus);
  for (int i = 0; i < 8; ++i) tmp.y[i] = v0.y[i] + 0.5 * h * k2.y[i];
  const StateVec k3 = deriv(mp, st, tmp, taus);
  for (int i = 0; i < 8; ++i) tmp.y[i] = v0.y[i] + h * k3.y[i];
  const StateVec k4 = deriv(mp, st, tmp, taus);
  StateVec out;
  for (int i = 0; i < 8; ++i)
    out.y[i] =
        v0.y[i] + h / 6.0 * (k1.y[i] + 2.0 * k2.y[i] + 2.0 * k3.y[i] + k4.y[i]);
  return out;
}

struct Controller {
  std::array<double, 2> taus{0.0, 0.0};
  double tau_sw = kNan;
  double delta = 0.0;
  double u_des = kNan;
  bool saturated = false;
  bool infeasible = false;
  OutputState out;
  ClfRow clf;
  FzDrift drift;
  double h_ssp = kNan, h_s1 = kNan, h_s2 = kNan;
  double tube_lo = kNan, tube_hi = kNan;
};

}  // namespace

TerrainProfile ScenarioConfig::make_terrain() const {
  return TerrainProfile(terrain_segments, noise_magnitude, seed,
                        smoothing_window, terrain_x_start, noise_grid);
}

TrajectoryLog run(const ScenarioConfig& cfg) {
  TrajectoryLog log;
  const ModelParams& mp = cfg.model;
  const TerrainProfile terrain = cfg.make_terrain();

  log.model = s2s_matrices(cfg.T_S, cfg.T_D, cfg.z0, mp.g);
  log.gait = orbit_for_velocity(log.model, cfg.v_star);

  const BacksteppingCert cert =
      make_certificate(cfg.ctrl.Kp, cfg.ctrl.Kd, cfg.ctrl.Q, cfg.ctrl.k,
                       cfg.ctrl.gamma, CertPolicy::Relaxed);

  // --- initial static configuration: both feet on the ground, mass at z0
  // over the midpoint, zero velocity, in DSP.
  HybridState st;
  const double half_w = 0.5 * std::max(std::fabs(log.gait.u_star), 0.15);
  const double rear_x = -half_w, front_x = half_w;
  LegState rear, front;
  rear.foot_x = rear_x;
  rear.foot_z = terrain.height_at(rear_x);
  front.foot_x = front_x;
  front.foot_z = terrain.height_at(front_x);

  st.mass.x = 0.0;
  st.mass.z = cfg.z0 + terrain.smoothed_height_at(0.0);
  st.mass.xdot = 0.0;
  st.mass.zdot = 0.0;

  // Static leg forces from force balance, then L = r + F/K.
  auto init_leg = [&](LegState& leg, double force) {
    const double dx = st.mass.x - leg.foot_x;
    const double dz = st.mass.z - leg.foot_z;
    const double r = std::hypot(dx, dz);
    leg.L = r + force / mp.K;
    leg.Ldot = 0.0;
  };
  {
    const double dxr = st.mass.x - rear.foot_x, dzr = st.mass.z - rear.foot_z;
    const double dxf = st.mass.x - front.foot_x, dzf = st.mass.z - front.foot_z;
    const double rr = std::hypot(dxr, dzr), rf = std::hypot(dxf, dzf);
    const double s1r = dxr / rr, c1r = dzr / rr;
    const double s2f = dxf / rf, c2f = dzf / rf;
    const double det = s1r * c2f - s2f * c1r;
    const double W = mp.mass * mp.g;
    // [s1 s2; c1 c2][F1;F2] = [0; W]
    const double F_rear = -s2f * W / det;
    const double F_front = s1r * W / det;
    init_leg(rear, F_rear);
    init_leg(front, F_front);
  }

  st.phase.tag = PhaseTag::DSP;
  // From rest, unload the leading leg: the trailing leg then pushes the mass
  // toward the desired walking direction.
  const bool front_first = cfg.v_star >= 0.0;
  st.phase.legs[0] = front_first ? front : rear;  // s1 lifts off first
  st.phase.legs[1] = front_first ? rear : front;
  st.phase.legs[0].theta = 0.0;
  st.phase.t_phase = 0.0;
  st.phase.F0_s1 =
      stance_kinematics(mp, st.mass, st.phase.legs[0]).force;
  st.t = 0.0;

  ReferenceFilter filter(cfg.ctrl.filter_omega);
  filter.reset(cfg.z0 + terrain.smoothed_height_at(0.0), 0.0);

  SwingPlan plan;
  plan.z_max_sw = cfg.ctrl.z_max_sw;
  plan.T_S = cfg.T_S;
  plan.u_prev = log.gait.u_star;  // startup bootstrap
  plan.estimate = cfg.estimate;
  double swing_thetadot = 0.0;
  bool have_swing_theta = false;

  int step_count = 0;
  const int nsub = std::max(
      1, static_cast<int>(std::llround(cfg.dt_control / cfg.dt_physics)));
  const double h_phys = cfg.dt_control / nsub;

  auto fail = [&](RunStatus status, const std::string& msg) {
    log.status = status;
    log.message = msg;
  };

  auto compute_control = [&](Controller& c) {
    c = Controller();
    c.out = desired_height(terrain, cfg.z0, st.mass, filter, cfg.dt_control);
    c.drift = fz_drift(mp, st);
    double F_z = 0.0;
    for (int i = 0; i < c.drift.n_legs; ++i)
      F_z += c.drift.legs[i].force * c.drift.legs[i].cos_t;
    c.clf = clf_inequality(mp, c.out, F_z, cert, c.drift);

    if (st.phase.tag == PhaseTag::SSP) {
      // H-LIP stepping from the current horizontal state.
      const Eigen::Vector2d x_now(st.mass.x - st.phase.legs[0].foot_x,
                                  st.mass.xdot);
      // Time to touchdown: nominally T_S - t, but once the foot descends,
      // its own height gives a better estimate (tracking error would
      // otherwise bias the last step command).
      double raw = std::max(0.0, cfg.T_S - st.phase.t_phase);  // nominal
      const double zdot_ref = swing_time_z_dot(plan, st.phase.t_phase);
      if (st.phase.t_phase > 0.5 * cfg.T_S && zdot_ref < -1e-3) {
        double fx, fz;
        swing_foot_position(st.mass, st.phase.legs[1], fx, fz);
        // Gap to the real ground under the foot (a proximity measurement,
        // not map knowledge; the swing reference still uses the estimate).
        const double gap =
            fz -
            terrain.height_at(std::clamp(fx, terrain.x_min(), terrain.x_max()));
        const double t_gap = std::max(0.0, gap / -zdot_ref);
        raw = st.phase.t_phase >= cfg.T_S ? std::min(t_gap, 0.5 * cfg.T_S)
                                          : std::min(raw, t_gap);
      }
      const double t_rem = raw;
      double u = stepping(x_now, t_rem, log.gait, log.model);
      if (std::fabs(u) > cfg.ctrl.u_max) {
        u = std::clamp(u, -cfg.ctrl.u_max, cfg.ctrl.u_max);
        c.saturated = true;
      }
      c.u_des = u;

      // Swing leg command (angle set kinematically, length via tau).
      double xdd, zdd;
      mass_accel(mp, st, xdd, zdd);
      const double theta_old = st.phase.legs[1].theta;
      const SwingCommand sc =
          swing_commands(mp, plan, terrain, st.mass, st.phase.legs[1], zdd,
                         st.phase.t_phase, u, swing_thetadot);
      st.phase.legs[1].theta = sc.theta_sw;
      swing_thetadot = have_swing_theta
                           ? (sc.theta_sw - theta_old) / cfg.dt_control
                           : 0.0;
      have_swing_theta = true;
      c.tau_sw = sc.tau_sw;
      if (sc.clamped) c.saturated = true;

      c.h_ssp = c.drift.legs[0].force * c.drift.legs[0].cos_t;
      if (cfg.mode == ControllerMode::BbfQp) {
        const QpProblem qp = build_ssp_qp(c.clf, c.drift, cfg.ctrl.alpha,
                                          cfg.ctrl.delta_weight);
        const QpSolution sol = qp_solve(qp);
        if (!sol.feasible) {
          c.infeasible = true;
          return;
        }
        c.taus[0] = sol.x[0];
        c.delta = sol.x[1];
      } else {
        const double tau_z =
            backstepping_closed_form(mp, c.out, F_z, cert, c.drift);
        c.taus[0] = tau_z / c.drift.legs[0].cos_t;
      }
      c.taus[1] = sc.tau_sw;
    } else {
      DspForceTube tube;
      tube.F0 = st.phase.F0_s1;
      tube.T_D = cfg.T_D;
      tube.c = cfg.ctrl.c;
      tube.dF = cfg.ctrl.dF;
      tube.alpha = cfg.ctrl.alpha;
      c.tube_lo = tube.lower(st.phase.t_phase);
      c.tube_hi = tube.upper(st.phase.t_phase);
      if (cfg.mode == ControllerMode::BbfQp) {
        const QpProblem qp = build_dsp_qp(c.clf, c.drift, tube,
                                          st.phase.t_phase,
                                          cfg.ctrl.delta_weight);
        const QpSolution sol = qp_solve(qp);
        if (!sol.feasible) {
          c.infeasible = true;
          return;
        }
        c.taus[0] = sol.x[0];
        c.taus[1] = sol.x[1];
        c.delta = sol.x[2];
        c.h_s1 = tube.h(st.phase.t_phase, c.drift.legs[0].force);
        c.h_s2 = c.drift.legs[1].force;
      } else {
        const double tau_z =
            backstepping_closed_form(mp, c.out, F_z, cert, c.drift);
        const double c1 = c.drift.legs[0].cos_t, c2 = c.drift.legs[1].cos_t;
        const double n2 = c1 * c1 + c2 * c2;
        c.taus[0] = c1 * tau_z / n2;
        c.taus[1] = c2 * tau_z / n2;
      }
    }
    for (int i = 0; i < 2; ++i) {
      if (std::fabs(c.taus[i]) > mp.tau_max) {
        c.taus[i] = std::clamp(c.taus[i], -mp.tau_max, mp.tau_max);
        c.saturated = true;
      }
    }
  };

  auto log_tick = [&](const Controller& c) {
    TickRecord r;
    r.t = st.t;
    r.phase = st.phase.tag == PhaseTag::SSP ? 0 : 1;
    r.step = step_count;
    r.x = st.mass.x;
    r.z = st.mass.z;
    r.xdot = st.mass.xdot;
    r.zdot = st.mass.zdot;
    r.zd = c.out.zd;
    r.zd_dot = c.out.zd_dot;
    r.eta1 = c.out.eta1;
    r.eta2 = c.out.eta2;
    double F_z = 0.0;
    for (int i = 0; i < c.drift.n_legs; ++i)
      F_z += c.drift.legs[i].force * c.drift.legs[i].cos_t;
    r.F_z = F_z;
    r.F_bar = c.clf.F_bar;
    r.F_delta = c.clf.F_delta;
    r.V = c.clf.V;
    r.F_s1 = c.drift.legs[0].force;
    r.F_s2 = c.drift.n_legs > 1 ? c.drift.legs[1].force : kNan;
    r.h_ssp = c.h_ssp;
    r.h_s1 = c.h_s1;
    r.h_s2 = c.h_s2;
    r.tau1 = c.taus[0];
    r.tau2 = st.phase.tag == PhaseTag::DSP ? c.taus[1] : kNan;
    r.tau_sw = c.tau_sw;
    r.delta = c.delta;
    r.u_des = c.u_des;
    if (st.phase.tag == PhaseTag::SSP) {
      swing_foot_position(st.mass, st.phase.legs[1], r.swing_x, r.swing_z);
    } else {
      r.swing_x = kNan;
      r.swing_z = kNan;
    }
    r.tube_lo = c.tube_lo;
    r.tube_hi = c.tube_hi;
    r.saturated = c.saturated ? 1 : 0;
    if (c.saturated) ++log.saturation_events;
    log.ticks.push_back(r);
  };

  auto check_health = [&]() -> bool {
    const double ground = terrain.height_at(st.mass.x);
    if (st.mass.z < ground + 0.2) {
      fail(RunStatus::Fall, "mass fell below terrain clearance");
      return false;
    }
    const int n_stance = st.phase.tag == PhaseTag::SSP ? 1 : 2;
    for (int i = 0; i < n_stance; ++i) {
      const StanceKin k = stance_kinematics(mp, st.mass, st.phase.legs[i]);
      if (k.r < 0.3 || k.r > 1.45 || std::fabs(k.theta) >= M_PI / 2.0) {
        fail(RunStatus::KinematicViolation, "stance leg out of bounds");
        return false;
      }
    }
    if (st.phase.tag == PhaseTag::SSP && st.phase.t_phase > 3.0 * cfg.T_S) {
      fail(RunStatus::Fall, "no touchdown within 3 T_S");
      return false;
    }
    return true;
  };

  // Event handling: guard down-crossing refined by bisection to 1e-8 s.
  auto guard_value = [&]() -> double {
    if (st.phase.tag == PhaseTag::SSP) {
      if (st.phase.t_phase <= 0.5 * cfg.T_S) return 1.0;  // gated
      return guard_touchdown(st, terrain);
    }
    return guard_liftoff(mp, st);
  };

  Controller ctl;
  compute_control(ctl);

  const double duration = cfg.duration;
  double next_log_t = 0.0;

  try {
  while (st.t < duration - 1e-12) {
    if (ctl.infeasible) {
      fail(RunStatus::QpInfeasible, "BBF-QP reported infeasible row");
      break;
    }
    if (st.t >= next_log_t - 1e-12) {
      log_tick(ctl);
      next_log_t += cfg.dt_control;
    }

    const double tick_end = std::min(st.t + cfg.dt_control, duration);
    bool event_happened = false;

    while (st.t < tick_end - 1e-12 && !event_happened) {
      const double h = std::min(h_phys, tick_end - st.t);
      const StateVec v0 = pack(st);
      const HybridState st0 = st;

      const double g_before = guard_value();
      // The tick-boundary swing-angle update can move the foot through the
      // ground in one jump; take the event right away in that case.
      if (g_before <= 0.0) {
        event_happened = true;
      } else {
      StateVec v1 = rk4_step(mp, st, v0, ctl.taus, h);
      unpack(v1, st);
      st.t += h;
      st.phase.t_phase += h;
      const double g_after = guard_value();

      const bool crossing = g_before > 0.0 && g_after <= 0.0;
      const bool forced_lo = st.phase.tag == PhaseTag::DSP &&
                             st.phase.t_phase >= 2.0 * cfg.T_D;
      if (crossing) {
        // Bisect the step size until the guard is pinned to the crossing.
        double lo = 0.0, hi = h;
        for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
          const double mid = 0.5 * (lo + hi);
          HybridState stm = st0;
          const StateVec vm = rk4_step(mp, stm, v0, ctl.taus, mid);
          unpack(vm, stm);
          stm.t = st0.t + mid;
          stm.phase.t_phase = st0.phase.t_phase + mid;
          st = stm;
          (guard_value() > 0.0 ? lo : hi) = mid;
        }
        {
          HybridState stm = st0;
          const StateVec vm = rk4_step(mp, stm, v0, ctl.taus, hi);
          unpack(vm, stm);
          stm.t = st0.t + hi;
          stm.phase.t_phase = st0.phase.t_phase + hi;
          st = stm;
        }
        event_happened = true;
      } else if (forced_lo) {
        // DSP overran; force the transition and record it.
        ++log.forced_liftoffs;
        event_happened = true;
      }
      }

      if (event_happened) {
        if (st.phase.tag == PhaseTag::SSP) {
          // Touchdown: record the pre-impact state, then apply the map.
          StepRecord sr;
          sr.k = step_count;
          sr.t_td = st.t;
          sr.p_pre = st.mass.x - st.phase.legs[0].foot_x;
          sr.v_pre = st.mass.xdot;
          sr.u_cmd = ctl.u_des;
          sr.step_duration = st.phase.t_phase;
          sr.stance_foot_x = st.phase.legs[0].foot_x;
          const double old_foot = st.phase.legs[0].foot_x;
          if (!transition_td(mp, terrain, st)) ++log.failed_steps;
          sr.u_realized = st.phase.legs[1].foot_x - old_foot;
          log.steps.push_back(sr);
          ++step_count;
        } else {
          // Lift-off: s1 becomes swing; rebuild the swing plan.
          plan.u_prev = st.phase.legs[1].foot_x - st.phase.legs[0].foot_x;
          plan.stance_foot_x = st.phase.legs[1].foot_x;
          transition_lo(mp, st);
          swing_thetadot = 0.0;
          have_swing_theta = false;
        }
      }

      if (!check_health()) break;
    }

    if (log.status != RunStatus::Success) break;
    compute_control(ctl);
  }
  } catch (const std::exception& e) {
    fail(RunStatus::KinematicViolation, e.what());
  }

  return log;
}

std::vector<StepS2S> step_extractor(const TrajectoryLog& log) {
  std::vector<StepS2S> out;
  if (log.steps.size() < 2) return out;
  for (std::size_t i = 0; i + 1 < log.steps.size(); ++i) {
    const StepRecord& a = log.steps[i];
    const StepRecord& b = log.steps[i + 1];
    StepS2S s;
    s.k = a.k;
    s.x = Eigen::Vector2d(a.p_pre, a.v_pre);
    s.u = a.u_realized;
    const Eigen::Vector2d x_next(b.p_pre, b.v_pre);
    s.w = x_next - log.model.A * s.x - log.model.B * s.u;
    s.e = s.x - log.gait.x_star;
    out.push_back(s);
  }
  return out;
}

}  // namespace aslip
