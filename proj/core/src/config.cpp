#include "aslip/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aslip {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream iss(s);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_angle(const std::string& tok) {
  if (tok.size() > 3 && tok.substr(tok.size() - 3) == "deg")
    return std::stod(tok.substr(0, tok.size() - 3)) * M_PI / 180.0;
  return std::stod(tok);
}

double get_num(const std::map<std::string, std::string>& kv,
               const std::string& key, double fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

}  // namespace

std::vector<TerrainSegment> parse_terrain(const std::string& text) {
  std::vector<TerrainSegment> segs;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, '|')) {
    piece = trim(piece);
    if (piece.empty()) continue;
    const auto toks = split_ws(piece);
    TerrainSegment seg;
    const std::string& kind = toks[0];
    if (kind == "flat") {
      if (toks.size() != 3) throw std::invalid_argument("flat <height> <len>");
      seg.kind = TerrainSegment::Kind::Flat;
      seg.p1 = std::stod(toks[1]);
      seg.length = std::stod(toks[2]);
    } else if (kind == "slope") {
      if (toks.size() != 3) throw std::invalid_argument("slope <angle> <len>");
      seg.kind = TerrainSegment::Kind::Slope;
      seg.p1 = parse_angle(toks[1]);
      seg.length = std::stod(toks[2]);
    } else if (kind == "sine") {
      if (toks.size() != 4)
        throw std::invalid_argument("sine <amp> <wavelength> <len>");
      seg.kind = TerrainSegment::Kind::Sine;
      seg.p1 = std::stod(toks[1]);
      seg.p2 = std::stod(toks[2]);
      seg.length = std::stod(toks[3]);
    } else if (kind == "stairs") {
      if (toks.size() != 4)
        throw std::invalid_argument("stairs <rise> <run> <len>");
      seg.kind = TerrainSegment::Kind::Stairs;
      seg.p1 = std::stod(toks[1]);
      seg.p2 = std::stod(toks[2]);
      seg.length = std::stod(toks[3]);
    } else {
      throw std::invalid_argument("unknown terrain kind: " + kind);
    }
    if (seg.length <= 0.0)
      throw std::invalid_argument("terrain segment length must be positive");
    segs.push_back(seg);
  }
  if (segs.empty()) throw std::invalid_argument("empty terrain description");
  return segs;
}

ScenarioConfig scenario_from_kv(const std::string& name,
                                const std::map<std::string, std::string>& kv) {
  ScenarioConfig cfg;
  cfg.name = name;
  if (auto it = kv.find("terrain"); it != kv.end())
    cfg.terrain_segments = parse_terrain(it->second);
  cfg.terrain_x_start = get_num(kv, "x_start", cfg.terrain_x_start);
  cfg.noise_magnitude = get_num(kv, "noise", cfg.noise_magnitude);
  cfg.noise_grid = get_num(kv, "noise_grid", cfg.noise_grid);
  cfg.seed = static_cast<std::uint64_t>(get_num(kv, "seed", 0.0));
  cfg.smoothing_window = get_num(kv, "smoothing_window", cfg.smoothing_window);
  if (auto it = kv.find("estimate"); it != kv.end()) {
    if (it->second == "smoothed")
      cfg.estimate = TerrainEstimate::Smoothed;
    else if (it->second == "noise_free")
      cfg.estimate = TerrainEstimate::NoiseFree;
    else
      throw std::invalid_argument("estimate must be smoothed or noise_free");
  }
  cfg.v_star = get_num(kv, "v_star", cfg.v_star);
  cfg.z0 = get_num(kv, "z0", cfg.z0);
  cfg.T_S = get_num(kv, "T_S", cfg.T_S);
  cfg.T_D = get_num(kv, "T_D", cfg.T_D);
  cfg.duration = get_num(kv, "duration", cfg.duration);
  cfg.dt_physics = get_num(kv, "dt_physics", cfg.dt_physics);
  cfg.dt_control = get_num(kv, "dt_control", cfg.dt_control);

  cfg.model.mass = get_num(kv, "mass", cfg.model.mass);
  cfg.model.K = get_num(kv, "K", cfg.model.K);
  cfg.model.D = get_num(kv, "D", cfg.model.D);
  cfg.model.tau_max = get_num(kv, "tau_max", cfg.model.tau_max);

  cfg.ctrl.alpha = get_num(kv, "alpha", cfg.ctrl.alpha);
  cfg.ctrl.gamma = get_num(kv, "gamma", cfg.ctrl.gamma);
  cfg.ctrl.k = get_num(kv, "k", cfg.ctrl.k);
  cfg.ctrl.c = get_num(kv, "c", cfg.ctrl.c);
  cfg.ctrl.dF = get_num(kv, "dF", cfg.ctrl.dF);
  cfg.ctrl.Kp = get_num(kv, "Kp", cfg.ctrl.Kp);
  cfg.ctrl.Kd = get_num(kv, "Kd", cfg.ctrl.Kd);
  cfg.ctrl.z_max_sw = get_num(kv, "z_max_sw", cfg.ctrl.z_max_sw);
  cfg.ctrl.delta_weight = get_num(kv, "delta_weight", cfg.ctrl.delta_weight);
  cfg.ctrl.filter_omega = get_num(kv, "filter_omega", cfg.ctrl.filter_omega);
  cfg.ctrl.u_max = get_num(kv, "u_max", cfg.ctrl.u_max);

  if (auto it = kv.find("mode"); it != kv.end()) {
    if (it->second == "qp")
      cfg.mode = ControllerMode::BbfQp;
    else if (it->second == "backstepping")
      cfg.mode = ControllerMode::ClosedFormBackstepping;
    else
      throw std::invalid_argument("mode must be qp or backstepping");
  }
  return cfg;
}

SuiteConfig parse_suite(const std::string& text) {
  SuiteConfig suite;
  std::string section = "suite";
  std::string scen_name;
  std::string scen_class = "flat";
  std::map<std::string, std::string> kv;

  auto flush = [&] {
    if (section == "scenario") {
      suite.scenarios.push_back(scenario_from_kv(scen_name, kv));
      auto it = kv.find("class");
      suite.classes.push_back(it == kv.end() ? scen_class : it->second);
    } else {
      suite.suite_opts = kv;
    }
    kv.clear();
  };

  std::istringstream iss(text);
  std::string line;
  while (std::getline(iss, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      flush();
      const auto inner = trim(line.substr(1, line.size() - 2));
      const auto toks = split_ws(inner);
      if (toks.size() == 2 && toks[0] == "scenario") {
        section = "scenario";
        scen_name = toks[1];
      } else if (toks.size() == 1 && toks[0] == "suite") {
        section = "suite";
      } else {
        throw std::invalid_argument("bad section header: " + line);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key = value: " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  flush();
  return suite;
}

SuiteConfig load_suite(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  auto suite = parse_suite(buf.str());
  if (suite.scenarios.empty())
    throw std::runtime_error("no [scenario ...] sections in " + path);
  return suite;
}

ScenarioConfig load_scenario(const std::string& path) {
  return load_suite(path).scenarios.front();
}

namespace {

void add(SuiteConfig& s, const std::string& name, const std::string& cls,
         const std::string& terrain, double v_star, double noise,
         std::uint64_t seed,
         std::map<std::string, std::string> kv = {}) {
  kv["terrain"] = terrain;
  kv["v_star"] = std::to_string(v_star);
  kv["noise"] = std::to_string(noise);
  kv["seed"] = std::to_string(seed);
  s.scenarios.push_back(scenario_from_kv(name, kv));
  s.classes.push_back(cls);
}

}  // namespace

SuiteConfig default_suite() {
  SuiteConfig s;
  add(s, "flat_v02", "flat", "flat 0 60", 0.2, 0.0, 1);
  add(s, "flat_v05", "flat", "flat 0 60", 0.5, 0.0, 1);
  add(s, "flat_v08", "flat", "flat 0 60", 0.8, 0.0, 1);
  add(s, "slope_up10", "slope", "slope 10deg 60", 0.5, 0.0, 1);
  add(s, "slope_up20", "slope", "slope 20deg 60", 0.5, 0.0, 1);
  add(s, "slope_up30", "slope", "slope 30deg 60", 0.5, 0.0, 1);
  add(s, "slope_dn10", "slope", "slope -10deg 60", 0.5, 0.0, 1);
  add(s, "slope_dn20", "slope", "slope -20deg 60", 0.5, 0.0, 1);
  add(s, "slope_dn30", "slope", "slope -30deg 60", 0.5, 0.0, 1);
  add(s, "sine", "sine", "flat 0 12 | sine 0.08 4 40", 0.5, 0.0, 1);
  add(s, "stairs", "stairs", "flat 0 12 | stairs 0.05 0.5 40", 0.5, 0.0, 1);
  add(s, "rough_d00", "rough",
      "flat 0 12 | slope 8deg 8 | sine 0.06 4 12 | slope -8deg 8 | flat 0 12",
      0.5, 0.0, 7);
  add(s, "rough_d05", "rough",
      "flat 0 12 | slope 8deg 8 | sine 0.06 4 12 | slope -8deg 8 | flat 0 12",
      0.5, 0.05, 7);
  // Foot clearance needs z_max_sw >= 2 dz, so the 10 cm case swings higher.
  add(s, "rough_d10", "rough",
      "flat 0 12 | slope 8deg 8 | sine 0.06 4 12 | slope -8deg 8 | flat 0 12",
      0.5, 0.10, 7, {{"z_max_sw", "0.24"}});
  return s;
}

}  // namespace aslip
