// Scenario runner: reproducible desk-scale experiments for the contraction,
// positivity/mass, cocycle, noise-continuity, vanishing-viscosity,
// flow-stability and estimate-suite checks, with JSON reports and CSV series.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rpm/config.hpp"
#include "rpm/solver.hpp"

namespace rpm {

const char* tool_version();

// Config-to-object builders shared by the scenario runners and the CLI.
Domain domain_from(const Config& cfg);
SolverParams solver_from(const Config& cfg);
Coefficient coefficient_from(const Config& cfg, const Domain& dom);
SmoothPath path_from(const Config& cfg, std::uint64_t seed, int n, double T);
GridFunction initial_condition(const Config& cfg, const Domain& dom,
                               const std::string& key, const std::string& fallback);
RecordPolicy record_from(const Config& cfg, double t_start, double T,
                         bool with_tallies = false);

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string note;
};

struct SeriesRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string key;
  double t = 0.0;
  double value = 0.0;
};

struct Report {
  std::string scenario_id;
  std::string kind;
  std::string version;
  std::uint64_t config_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<CheckResult> checks;
  std::vector<SeriesRow> series;

  bool all_pass() const;
  std::string to_json() const;
};

// Dispatch on [scenario] kind. Measured fields are deterministic functions of
// the config (identical config hash reproduces them bit-exactly).
Report run_scenario(const Config& cfg);

Report run_contraction(const Config& cfg);
Report run_positivity_mass(const Config& cfg);
Report run_cocycle(const Config& cfg);
Report run_noise_continuity(const Config& cfg);
Report run_vanishing_viscosity(const Config& cfg);
Report run_flow_stability(const Config& cfg);
Report run_estimate_suite(const Config& cfg);

// "scenario, seed, key, t, value" rows.
void write_series_csv(std::ostream& out, const std::vector<SeriesRow>& rows);

// Output directory: the flag value if nonempty, else $ROUGHPM_OUT_DIR, else ".".
std::string resolve_output_dir(const std::string& flag_value);

}  // namespace rpm
