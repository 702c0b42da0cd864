#include "aslip/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace aslip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

}  // namespace

RunMetrics compute_metrics(const TrajectoryLog& log, double duration,
                           double settle_time) {
  RunMetrics m;
  m.steps = static_cast<int>(log.steps.size());

  const int n_avg = 5;
  if (m.steps >= n_avg) {
    double acc = 0.0;
    for (int i = m.steps - n_avg; i < m.steps; ++i)
      acc += log.steps[i].v_pre;
    m.mean_v_final = acc / n_avg;
  } else if (m.steps > 0) {
    m.mean_v_final = log.steps.back().v_pre;
  }

  m.min_F_ssp = m.min_F_s2 = kInf;
  m.min_h_ssp = m.min_h_s1 = m.min_h_s2 = kInf;
  m.tube_margin = kInf;
  double v_lo = kInf, v_hi = -kInf;
  long qp_ticks = 0, delta_ticks = 0;

  for (const TickRecord& r : log.ticks) {
    if (r.t > settle_time)
      m.max_abs_eta1_post = std::max(m.max_abs_eta1_post, std::fabs(r.eta1));
    if (r.phase == 0) {
      if (std::isfinite(r.F_s1)) m.min_F_ssp = std::min(m.min_F_ssp, r.F_s1);
      if (std::isfinite(r.h_ssp)) m.min_h_ssp = std::min(m.min_h_ssp, r.h_ssp);
    } else {
      if (std::isfinite(r.F_s2)) m.min_F_s2 = std::min(m.min_F_s2, r.F_s2);
      if (std::isfinite(r.h_s1)) m.min_h_s1 = std::min(m.min_h_s1, r.h_s1);
      if (std::isfinite(r.h_s2)) m.min_h_s2 = std::min(m.min_h_s2, r.h_s2);
      if (std::isfinite(r.tube_lo) && std::isfinite(r.F_s1)) {
        const double margin =
            std::min(r.F_s1 - r.tube_lo, r.tube_hi - r.F_s1);
        m.tube_margin = std::min(m.tube_margin, margin);
        if (margin < -1e-6) ++m.tube_violations;
      }
    }
    if (std::isfinite(r.delta)) {
      ++qp_ticks;
      if (r.delta > 1e-9) ++delta_ticks;
    }
    if (r.t > 0.75 * duration) {
      v_lo = std::min(v_lo, r.xdot);
      v_hi = std::max(v_hi, r.xdot);
    }
  }
  if (qp_ticks > 0)
    m.delta_fraction = static_cast<double>(delta_ticks) / qp_ticks;
  if (v_hi >= v_lo) m.osc_amplitude = v_hi - v_lo;
  for (double* p : {&m.min_F_ssp, &m.min_F_s2, &m.min_h_ssp, &m.min_h_s1,
                    &m.min_h_s2, &m.tube_margin})
    if (!std::isfinite(*p)) *p = 0.0;
  return m;
}

InvariantReport check_invariant_set(std::vector<ScenarioResult>& results,
                                    const S2SModel& model,
                                    const Eigen::RowVector2d& K_db,
                                    int k_min) {
  InvariantReport rep;
  std::map<std::string, std::vector<Eigen::Vector2d>> w_by_class;
  for (const ScenarioResult& r : results)
    for (const StepS2S& s : r.s2s)
      if (s.k >= k_min) w_by_class[r.cls].push_back(s.w);

  for (auto& [cls, samples] : w_by_class) {
    if (samples.empty()) continue;
    rep.W[cls] = Box2d::bound(samples, 0.05);
    rep.E[cls] = error_invariant_set(model, K_db, rep.W[cls]);
  }

  for (ScenarioResult& r : results) {
    auto it = rep.E.find(r.cls);
    if (it == rep.E.end()) {
      r.membership = 1.0;
      continue;
    }
    int checked = 0, inside = 0;
    // Skip a couple more steps than the W fit so the settled errors are a
    // composition of in-W disturbances only.
    for (const StepS2S& s : r.s2s) {
      if (s.k < k_min + 2) continue;
      ++checked;
      if (it->second.contains(s.e, 1e-9)) ++inside;
    }
    r.membership = checked == 0 ? 1.0 : static_cast<double>(inside) / checked;
    rep.checked += checked;
    rep.inside += inside;
  }
  return rep;
}

void write_ticks_csv(const std::string& path,
                     const std::vector<TickRecord>& ticks) {
  auto f = open_out(path);
  f << "t,phase,step,x,z,xdot,zdot,zd,zd_dot,eta1,eta2,F_z,F_bar,F_delta,V,"
       "F_s1,F_s2,h_ssp,h_s1,h_s2,tau1,tau2,tau_sw,delta,u_des,swing_x,"
       "swing_z,tube_lo,tube_hi,saturated\n";
  for (const TickRecord& r : ticks) {
    f << fmt(r.t) << ',' << r.phase << ',' << r.step << ',' << fmt(r.x) << ','
      << fmt(r.z) << ',' << fmt(r.xdot) << ',' << fmt(r.zdot) << ','
      << fmt(r.zd) << ',' << fmt(r.zd_dot) << ',' << fmt(r.eta1) << ','
      << fmt(r.eta2) << ',' << fmt(r.F_z) << ',' << fmt(r.F_bar) << ','
      << fmt(r.F_delta) << ',' << fmt(r.V) << ',' << fmt(r.F_s1) << ','
      << fmt(r.F_s2) << ',' << fmt(r.h_ssp) << ',' << fmt(r.h_s1) << ','
      << fmt(r.h_s2) << ',' << fmt(r.tau1) << ',' << fmt(r.tau2) << ','
      << fmt(r.tau_sw) << ',' << fmt(r.delta) << ',' << fmt(r.u_des) << ','
      << fmt(r.swing_x) << ',' << fmt(r.swing_z) << ',' << fmt(r.tube_lo)
      << ',' << fmt(r.tube_hi) << ',' << r.saturated << '\n';
  }
}

void write_steps_csv(const std::string& path,
                     const std::vector<StepRecord>& steps,
                     const std::vector<StepS2S>& s2s) {
  auto f = open_out(path);
  f << "k,t_td,p_pre,v_pre,u_realized,u_cmd,step_duration,stance_foot_x,"
       "w_p,w_v,e_p,e_v\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const StepRecord& s = steps[i];
    double wp = nan, wv = nan, ep = nan, ev = nan;
    if (i < s2s.size() && s2s[i].k == s.k) {
      wp = s2s[i].w.x();
      wv = s2s[i].w.y();
      ep = s2s[i].e.x();
      ev = s2s[i].e.y();
    }
    f << s.k << ',' << fmt(s.t_td) << ',' << fmt(s.p_pre) << ','
      << fmt(s.v_pre) << ',' << fmt(s.u_realized) << ',' << fmt(s.u_cmd)
      << ',' << fmt(s.step_duration) << ',' << fmt(s.stance_foot_x) << ','
      << fmt(wp) << ',' << fmt(wv) << ',' << fmt(ep) << ',' << fmt(ev)
      << '\n';
  }
}

void write_gait_csv(const std::string& path, const S2SModel& m,
                    const Gait& gait) {
  auto f = open_out(path);
  f << "T_S,T_D,z0,v_star,u_star,p_star,pdot_star,k1,k2\n";
  f << fmt(m.T_S) << ',' << fmt(m.T_D) << ',' << fmt(m.z0) << ','
    << fmt(gait.v_star) << ',' << fmt(gait.u_star) << ','
    << fmt(gait.x_star.x()) << ',' << fmt(gait.x_star.y()) << ','
    << fmt(gait.K_db(0)) << ',' << fmt(gait.K_db(1)) << '\n';
}

void write_suite_summary(const std::string& path, const SuiteReport& report) {
  auto f = open_out(path);
  f << "name,class,status,steps,mean_v_final,v_star,max_abs_eta1,min_F_ssp,"
       "min_F_s2,tube_margin,tube_violations,delta_fraction,osc_amplitude,"
       "membership\n";
  for (const ScenarioResult& r : report.results) {
    const RunMetrics& m = r.metrics;
    f << r.name << ',' << r.cls << ',' << static_cast<int>(r.status) << ','
      << m.steps << ',' << fmt(m.mean_v_final) << ',' << fmt(r.v_star) << ','
      << fmt(m.max_abs_eta1_post) << ',' << fmt(m.min_F_ssp) << ','
      << fmt(m.min_F_s2) << ',' << fmt(m.tube_margin) << ','
      << m.tube_violations << ',' << fmt(m.delta_fraction) << ','
      << fmt(m.osc_amplitude) << ',' << fmt(r.membership) << '\n';
  }
}

void write_invariant_csv(const std::string& path, const Box2d& W,
                         const ConvexPolygon& E) {
  auto f = open_out(path);
  f << "set,p,pdot\n";
  for (const Eigen::Vector2d& c : W.corners())
    f << "W," << fmt(c.x()) << ',' << fmt(c.y()) << '\n';
  for (const Eigen::Vector2d& v : E.vertices())
    f << "E," << fmt(v.x()) << ',' << fmt(v.y()) << '\n';
}

void write_phase_csv(const std::string& path, const TrajectoryLog& log) {
  auto f = open_out(path);
  f << "t,p,pdot\n";
  for (const TickRecord& r : log.ticks) {
    if (r.step >= static_cast<int>(log.steps.size())) break;
    f << fmt(r.t) << ',' << fmt(r.x - log.steps[r.step].stance_foot_x) << ','
      << fmt(r.xdot) << '\n';
  }
}

std::vector<StepS2S> read_steps_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(f, line);  // header
  std::vector<StepS2S> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto row = parse_csv_row(line);
    if (row.size() < 12) throw std::runtime_error("short row in " + path);
    StepS2S s;
    s.k = static_cast<int>(row[0]);
    s.x = Eigen::Vector2d(row[2], row[3]);
    s.u = row[4];
    s.w = Eigen::Vector2d(row[8], row[9]);
    s.e = Eigen::Vector2d(row[10], row[11]);
    if (std::isfinite(s.w.x())) out.push_back(s);
  }
  return out;
}

void read_gait_csv(const std::string& path, S2SModel& m, Gait& gait) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(f, line);
  if (!std::getline(f, line)) throw std::runtime_error("empty " + path);
  const auto row = parse_csv_row(line);
  if (row.size() < 9) throw std::runtime_error("short row in " + path);
  m = s2s_matrices(row[0], row[1], row[2]);
  gait.v_star = row[3];
  gait.u_star = row[4];
  gait.x_star = Eigen::Vector2d(row[5], row[6]);
  gait.K_db = Eigen::RowVector2d(row[7], row[8]);
}

SuiteReport run_suite(const SuiteConfig& suite, const std::string& out_dir,
                      int jobs) {
  SuiteReport report;
  const std::size_t n = suite.scenarios.size();
  if (n == 0) return report;

  std::vector<TrajectoryLog> logs(n);
  std::atomic<std::size_t> next{0};
  if (jobs <= 0)
    jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
      logs[i] = run(suite.scenarios[i]);
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  report.model = logs[0].model;
  report.gait = logs[0].gait;

  report.results.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ScenarioResult& r = report.results[i];
    r.name = suite.scenarios[i].name;
    r.cls = i < suite.classes.size() ? suite.classes[i] : "all";
    r.status = logs[i].status;
    r.message = logs[i].message;
    r.metrics = compute_metrics(logs[i], suite.scenarios[i].duration);
    r.s2s = step_extractor(logs[i]);
    r.v_star = suite.scenarios[i].v_star;
  }

  report.invariants =
      check_invariant_set(report.results, report.model, report.gait.K_db);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& name = report.results[i].name;
      write_ticks_csv((dir / ("ticks_" + name + ".csv")).string(),
                      logs[i].ticks);
      write_steps_csv((dir / ("steps_" + name + ".csv")).string(),
                      logs[i].steps, report.results[i].s2s);
      write_phase_csv((dir / ("phase_" + name + ".csv")).string(), logs[i]);
    }
    write_gait_csv((dir / "gait.csv").string(), report.model, report.gait);
    write_suite_summary((dir / "suite_summary.csv").string(), report);
    for (const auto& [cls, W] : report.invariants.W)
      write_invariant_csv((dir / ("invariant_" + cls + ".csv")).string(), W,
                          report.invariants.E.at(cls));
  }
  return report;
}

std::string analyze_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  S2SModel model;
  Gait gait;
  read_gait_csv((fs::path(dir) / "gait.csv").string(), model, gait);

  // Class per scenario from the summary; default everything to one class.
  std::map<std::string, std::string> cls_of;
  {
    std::ifstream f((fs::path(dir) / "suite_summary.csv").string());
    std::string line;
    if (f && std::getline(f, line)) {
      while (std::getline(f, line)) {
        const auto c1 = line.find(',');
        if (c1 == std::string::npos) continue;
        const auto c2 = line.find(',', c1 + 1);
        cls_of[line.substr(0, c1)] = line.substr(c1 + 1, c2 - c1 - 1);
      }
    }
  }

  std::vector<ScenarioResult> results;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string fn = entry.path().filename().string();
    if (fn.rfind("steps_", 0) != 0 || entry.path().extension() != ".csv")
      continue;
    ScenarioResult r;
    r.name = fn.substr(6, fn.size() - 10);
    auto it = cls_of.find(r.name);
    r.cls = it == cls_of.end() ? "all" : it->second;
    r.s2s = read_steps_csv(entry.path().string());
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(),
            [](const ScenarioResult& a, const ScenarioResult& b) {
              return a.name < b.name;
            });
  if (results.empty()) throw std::runtime_error("no steps_*.csv in " + dir);

  InvariantReport rep = check_invariant_set(results, model, gait.K_db);

  std::ostringstream os;
  os << "gait: v*=" << gait.v_star << " u*=" << gait.u_star
     << " x*=(" << gait.x_star.x() << ", " << gait.x_star.y() << ")\n";
  for (const auto& [cls, W] : rep.W) {
    os << "class " << cls << ": W p=[" << W.lo.x() << ", " << W.hi.x()
       << "] pdot=[" << W.lo.y() << ", " << W.hi.y() << "], E has "
       << rep.E.at(cls).vertices().size() << " vertices\n";
  }
  for (const ScenarioResult& r : results)
    os << "scenario " << r.name << " (" << r.cls << "): " << r.s2s.size()
       << " steps, membership " << r.membership << "\n";
  os << "overall: " << rep.inside << "/" << rep.checked
     << " settled errors inside E\n";
  return os.str();
}

}  // namespace aslip
