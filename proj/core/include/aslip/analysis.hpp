#pragma once

#include <map>
#include <string>
#include <vector>

#include "aslip/config.hpp"
#include "aslip/sim_runner.hpp"

namespace aslip {

/// Scalar summaries of one run, used by the suite report and the
/// acceptance checks.
struct RunMetrics {
  int steps = 0;
  double mean_v_final = 0.0;      // mean pre-impact velocity, last 5 steps
  double max_abs_eta1_post = 0.0; // |z - z^d| after the settle time
  double min_F_ssp = 0.0;         // stance spring force in SSP
  double min_F_s2 = 0.0;          // new-stance spring force in DSP
  double min_h_ssp = 0.0, min_h_s1 = 0.0, min_h_s2 = 0.0;
  double tube_margin = 0.0;       // min distance of F_s1 to the DSP tube
  int tube_violations = 0;        // DSP ticks with F_s1 outside the tube
  double delta_fraction = 0.0;    // QP ticks with relaxation > 1e-9
  double osc_amplitude = 0.0;     // xdot peak-to-peak over the last quarter
};

RunMetrics compute_metrics(const TrajectoryLog& log, double duration,
                           double settle_time = 3.0);

struct ScenarioResult {
  std::string name;
  std::string cls;
  RunStatus status = RunStatus::Success;
  std::string message;
  RunMetrics metrics;
  std::vector<StepS2S> s2s;
  double v_star = 0.0;
  double membership = 1.0;  // post-transient e_k inside the class E
};

/// Per terrain class: disturbance box W from the pooled logged w
/// (post-transient steps, inflated 5%) and E = W (+) (A+BK)W.
struct InvariantReport {
  std::map<std::string, Box2d> W;
  std::map<std::string, ConvexPolygon> E;
  int checked = 0;
  int inside = 0;
};

/// First transient steps excluded from W fitting and E membership.
inline constexpr int kTransientSteps = 4;

InvariantReport check_invariant_set(std::vector<ScenarioResult>& results,
                                    const S2SModel& model,
                                    const Eigen::RowVector2d& K_db,
                                    int k_min = kTransientSteps);

struct SuiteReport {
  std::vector<ScenarioResult> results;
  S2SModel model;
  Gait gait;  // of the first scenario
  InvariantReport invariants;
};

/// Runs every scenario (scenario-parallel, deterministic result order) and
/// writes ticks_/steps_/phase_ CSVs plus gait.csv, suite_summary.csv and
/// invariant_<class>.csv into out_dir. Empty out_dir skips the files.
SuiteReport run_suite(const SuiteConfig& suite, const std::string& out_dir,
                      int jobs = 0);

void write_ticks_csv(const std::string& path,
                     const std::vector<TickRecord>& ticks);
void write_steps_csv(const std::string& path,
                     const std::vector<StepRecord>& steps,
                     const std::vector<StepS2S>& s2s);
void write_gait_csv(const std::string& path, const S2SModel& m,
                    const Gait& gait);
void write_suite_summary(const std::string& path, const SuiteReport& report);
void write_invariant_csv(const std::string& path, const Box2d& W,
                         const ConvexPolygon& E);
void write_phase_csv(const std::string& path, const TrajectoryLog& log);

/// Rebuilds step-to-step data from a steps_ CSV written by write_steps_csv.
std::vector<StepS2S> read_steps_csv(const std::string& path);

/// Reads gait.csv back into a model and gait.
void read_gait_csv(const std::string& path, S2SModel& m, Gait& gait);

/// Offline pass over a directory produced by run_suite: re-derives the
/// per-class invariant sets from the logged steps and reports membership.
/// Returns a human-readable report.
std::string analyze_directory(const std::string& dir);

}  // namespace aslip
