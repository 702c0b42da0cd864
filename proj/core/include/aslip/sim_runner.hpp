#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aslip/dynamics.hpp"
#include "aslip/hlip.hpp"
#include "aslip/swing_ctrl.hpp"
#include "aslip/terrain.hpp"
#include "aslip/vertical_ctrl.hpp"

namespace aslip {

struct ControlParams {
  double alpha = 500.0;
  double gamma = 10.0;
  double k = 10.0;
  double c = 0.5;
  double dF = 20.0;  // N
  double Kp = -100.0, Kd = -20.0;
  Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
  double z_max_sw = 0.12;  // m
  double delta_weight = 1.0;
  double filter_omega = 20.0;  // rad/s
  double u_max = 1.1;          // step size clamp, m
};

enum class ControllerMode { BbfQp, ClosedFormBackstepping };

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<TerrainSegment> terrain_segments{
      {TerrainSegment::Kind::Flat, 0.0, 0.0, 40.0}};
  double terrain_x_start = -10.0;
  double noise_magnitude = 0.0;  // delta-z, m
  double noise_grid = TerrainProfile::kDefaultNoiseGrid;
  std::uint64_t seed = 0;
  double smoothing_window = 0.4;  // m
  TerrainEstimate estimate = TerrainEstimate::Smoothed;

  double v_star = 0.5;  // m/s
  double z0 = 1.0, T_S = 0.4, T_D = 0.1;

  ModelParams model;
  ControlParams ctrl;
  ControllerMode mode = ControllerMode::BbfQp;

  double dt_physics = 2.5e-4;
  double dt_control = 1e-3;
  double duration = 20.0;

  TerrainProfile make_terrain() const;
};

enum class RunStatus : int {
  Success = 0,
  Fall = 2,
  KinematicViolation = 3,
  QpInfeasible = 4,
};

/// One controller-tick sample. Values that do not apply to the current
/// phase are NaN.
struct TickRecord {
  double t = 0.0;
  int phase = 0;  // 0 = SSP, 1 = DSP
  int step = 0;   // completed-step count
  double x, z, xdot, zdot;
  double zd, zd_dot;
  double eta1, eta2;
  double F_z, F_bar, F_delta, V;
  double F_s1, F_s2;          // stance forces (SSP: F_s1 only)
  double h_ssp, h_s1, h_s2;   // barrier values
  double tau1, tau2, tau_sw;  // commanded leg-length accelerations
  double delta;               // CLF relaxation
  double u_des;
  double swing_x, swing_z;
  double tube_lo, tube_hi;
  int saturated = 0;
};

/// One completed step (touchdown event).
struct StepRecord {
  int k = 0;
  double t_td = 0.0;
  double p_pre = 0.0, v_pre = 0.0;  // pre-impact horizontal state
  double u_realized = 0.0;          // new foot - old stance foot
  double u_cmd = 0.0;               // last commanded step size
  double step_duration = 0.0;       // SSP duration of the step
  double stance_foot_x = 0.0;       // support foot during the step
};

struct TrajectoryLog {
  std::vector<TickRecord> ticks;
  std::vector<StepRecord> steps;
  RunStatus status = RunStatus::Success;
  std::string message;

  S2SModel model;
  Gait gait;

  int failed_steps = 0;
  int forced_liftoffs = 0;
  int saturation_events = 0;
};

TrajectoryLog run(const ScenarioConfig& cfg);

/// Step-to-step sequence with the model-mismatch disturbance
/// w_k = x_{k+1} - A x_k - B u_k and error e_k = x_k - x_star.
struct StepS2S {
  int k;
  Eigen::Vector2d x;
  double u;
  Eigen::Vector2d w;
  Eigen::Vector2d e;
};

std::vector<StepS2S> step_extractor(const TrajectoryLog& log);

}  // namespace aslip
