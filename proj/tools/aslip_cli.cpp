// Command-line front end: single runs, suites, offline log analysis and
// gait synthesis for the aSLIP walker.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aslip/analysis.hpp"
#include "aslip/config.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("ASLIP_OUT_DIR");
  return env && *env ? env : "out";
}

struct CommonOpts {
  std::string out_dir;
  long seed = -1;
  double dt_physics = 0.0;
  double duration = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--out-dir", out_dir, "Output directory for CSV logs")
        ->default_val(default_out_dir());
    app->add_option("--seed", seed, "Terrain noise seed override");
    app->add_option("--dt-physics", dt_physics,
                    "Integrator step override, s");
    app->add_option("--duration", duration, "Simulated time override, s");
  }

  void apply(aslip::ScenarioConfig& cfg) const {
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (dt_physics > 0.0) cfg.dt_physics = dt_physics;
    if (duration > 0.0) cfg.duration = duration;
  }
};

void print_run_summary(const aslip::ScenarioConfig& cfg,
                       const aslip::TrajectoryLog& log,
                       const aslip::RunMetrics& m) {
  std::printf("%s: status=%d steps=%d", cfg.name.c_str(),
              static_cast<int>(log.status), m.steps);
  if (!log.message.empty()) std::printf(" (%s)", log.message.c_str());
  std::printf("\n");
  std::printf("  v_final=%.4f (v*=%.4f)  max|eta1|=%.3e  osc=%.3e\n",
              m.mean_v_final, cfg.v_star, m.max_abs_eta1_post,
              m.osc_amplitude);
  std::printf("  min F_s(SSP)=%.4f  min F_s2(DSP)=%.4f  tube margin=%.4f  "
              "tube violations=%d\n",
              m.min_F_ssp, m.min_F_s2, m.tube_margin, m.tube_violations);
  std::printf("  delta>1e-9 fraction=%.5f  forced liftoffs=%d  "
              "failed steps=%d\n",
              m.delta_fraction, log.forced_liftoffs, log.failed_steps);
}

int cmd_run(const std::string& config_path, const CommonOpts& opts) {
  aslip::ScenarioConfig cfg = aslip::load_scenario(config_path);
  opts.apply(cfg);

  aslip::TrajectoryLog log = aslip::run(cfg);
  const aslip::RunMetrics m = aslip::compute_metrics(log, cfg.duration);

  std::filesystem::create_directories(opts.out_dir);
  const std::filesystem::path dir(opts.out_dir);
  aslip::write_ticks_csv((dir / ("ticks_" + cfg.name + ".csv")).string(),
                         log.ticks);
  aslip::write_steps_csv((dir / ("steps_" + cfg.name + ".csv")).string(),
                         log.steps, aslip::step_extractor(log));
  aslip::write_gait_csv((dir / "gait.csv").string(), log.model, log.gait);

  print_run_summary(cfg, log, m);
  return static_cast<int>(log.status);
}

int cmd_suite(const std::string& config_path, const CommonOpts& opts,
              int jobs) {
  aslip::SuiteConfig suite = config_path.empty()
                                 ? aslip::default_suite()
                                 : aslip::load_suite(config_path);
  for (auto& cfg : suite.scenarios) opts.apply(cfg);

  const aslip::SuiteReport report =
      aslip::run_suite(suite, opts.out_dir, jobs);

  int worst = 0;
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    const aslip::ScenarioResult& r = report.results[i];
    aslip::TrajectoryLog dummy;
    std::printf("[%2zu] %-12s class=%-6s status=%d steps=%3d v=%.3f/%.3f "
                "membership=%.3f\n",
                i, r.name.c_str(), r.cls.c_str(),
                static_cast<int>(r.status), r.metrics.steps,
                r.metrics.mean_v_final, r.v_star, r.membership);
    worst = std::max(worst, static_cast<int>(r.status));
  }
  std::printf("invariant sets: %d/%d settled errors inside E\n",
              report.invariants.inside, report.invariants.checked);
  std::printf("logs written to %s\n", opts.out_dir.c_str());
  return worst;
}

int cmd_analyze(const std::string& log_dir) {
  std::cout << aslip::analyze_directory(log_dir);
  return 0;
}

int cmd_gait(double v_star, double z0, double T_S, double T_D, bool csv) {
  const aslip::S2SModel m = aslip::s2s_matrices(T_S, T_D, z0);
  const aslip::Gait g = aslip::orbit_for_velocity(m, v_star);
  if (csv) {
    std::printf("T_S,T_D,z0,v_star,u_star,p_star,pdot_star,k1,k2\n");
    std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                T_S, T_D, z0, v_star, g.u_star, g.x_star.x(), g.x_star.y(),
                g.K_db(0), g.K_db(1));
    return 0;
  }
  std::printf("lambda = %.12g\n", m.lambda);
  std::printf("A = [%.12g %.12g; %.12g %.12g]\n", m.A(0, 0), m.A(0, 1),
              m.A(1, 0), m.A(1, 1));
  std::printf("B = [%.12g; %.12g]\n", m.B(0), m.B(1));
  std::printf("u* = %.12g, x* = [%.12g; %.12g]\n", g.u_star, g.x_star.x(),
              g.x_star.y());
  std::printf("K_deadbeat = [%.12g %.12g]\n", g.K_db(0), g.K_db(1));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aSLIP bipedal walking simulator"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string config_path, log_dir;
  int jobs = 0;
  double v_star = 0.5, z0 = 1.0, T_S = 0.4, T_D = 0.1;
  bool gait_csv = false;

  CLI::App* run = app.add_subcommand("run", "Simulate one scenario");
  run->add_option("config", config_path, "Scenario config file")->required();
  opts.attach(run);

  CLI::App* suite = app.add_subcommand("suite", "Run a scenario suite");
  suite->add_option("config", config_path,
                    "Suite config file (omit for the built-in suite)");
  suite->add_option("--jobs", jobs, "Parallel scenario workers (0 = auto)");
  opts.attach(suite);

  CLI::App* analyze =
      app.add_subcommand("analyze", "Re-derive invariant sets from logs");
  analyze->add_option("log-dir", log_dir, "Directory written by run/suite")
      ->required();

  CLI::App* gait =
      app.add_subcommand("gait", "Print step-to-step gait parameters");
  gait->add_option("v_star", v_star, "Desired pre-impact velocity, m/s")
      ->required();
  gait->add_option("--z0", z0, "Nominal height, m");
  gait->add_option("--T-S", T_S, "Single-support duration, s");
  gait->add_option("--T-D", T_D, "Double-support duration, s");
  gait->add_flag("--csv", gait_csv, "Emit one CSV row instead of text");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, opts);
    if (suite->parsed()) return cmd_suite(config_path, opts, jobs);
    if (analyze->parsed()) return cmd_analyze(log_dir);
    if (gait->parsed()) return cmd_gait(v_star, z0, T_S, T_D, gait_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
