#pragma once

#include <map>
#include <string>
#include <vector>

#include "aslip/sim_runner.hpp"

namespace aslip {

/// Key-value scenario description with sections:
///   [suite]
///   out_dir = results
///   [scenario flat_v05]
///   class = flat
///   terrain = flat 0 60
///   v_star = 0.5
///   ...
/// Terrain segments are '|'-separated: "flat <h> <len>",
/// "slope <angle[deg]> <len>", "sine <amp> <wavelength> <len>",
/// "stairs <rise> <run> <len>". Angles take an optional "deg" suffix.
struct SuiteConfig {
  std::map<std::string, std::string> suite_opts;
  std::vector<ScenarioConfig> scenarios;
  std::vector<std::string> classes;  // parallel to scenarios
};

std::vector<TerrainSegment> parse_terrain(const std::string& text);

ScenarioConfig scenario_from_kv(const std::string& name,
                                const std::map<std::string, std::string>& kv);

SuiteConfig parse_suite(const std::string& text);
SuiteConfig load_suite(const std::string& path);

/// First (or only) scenario of the file.
ScenarioConfig load_scenario(const std::string& path);

/// The experiment set mirroring the default evaluation: flat at
/// v* in {0.2, 0.5, 0.8}, slopes +-10/20/30 deg at 0.5, sine, stairs, and
/// composite rough terrain with delta-z in {0, 5, 10} cm.
SuiteConfig default_suite();

}  // namespace aslip
