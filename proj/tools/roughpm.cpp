// Command-line front end: simulate (PDE runs), characteristics (flow probes),
// experiment (scenario configs), sample-path (seeded Brownian CSV).
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rpm/characteristics.hpp"
#include "rpm/config.hpp"
#include "rpm/experiments.hpp"
#include "rpm/kinetic.hpp"
#include "rpm/solver.hpp"

namespace {

rpm::Config config_overlay(const std::string& file, const std::vector<std::string>& sets) {
  rpm::Config cfg = file.empty() ? rpm::Config::parse_string("") : rpm::Config::parse_file(file);
  for (const std::string& kv : sets) {
    const auto dot = kv.find('.');
    const auto eq = kv.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq)
      throw std::runtime_error("--set expects section.key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, dot), kv.substr(dot + 1, eq - dot - 1), kv.substr(eq + 1));
  }
  return cfg;
}

std::uint64_t first_seed(const rpm::Config& cfg) {
  const auto seeds = cfg.get_seeds("scenario", "seeds");
  return seeds.empty() ? 1 : seeds.front();
}

int cmd_simulate(const rpm::Config& cfg, const std::string& outdir) {
  using namespace rpm;
  const Domain dom = domain_from(cfg);
  const SolverParams params = solver_from(cfg);
  const Coefficient coeff = coefficient_from(cfg, dom);
  const double T = cfg.get_double("scenario", "T", 0.25);
  const SmoothPath z = path_from(cfg, first_seed(cfg), coeff.dimension(), T);
  const GridFunction u0 = initial_condition(cfg, dom, "u0", "bump:0.5,0.25,1.0");
  const bool with_kinetic = cfg.has("scenario", "xi_bins");
  const Trajectory traj =
      solve(u0, T, params, z, coeff, record_from(cfg, 0.0, T, with_kinetic));

  std::filesystem::create_directories(outdir);
  std::ofstream snap(outdir + "/snapshots.csv");
  snap << "t, x, u\n";
  char buf[96];
  for (const GridFunction& g : traj.snapshots)
    for (int i = 0; i < dom.cells; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", g.time, dom.center(i), g.values[i]);
      snap << buf << "\n";
    }
  const StabilityReport sr = stability_report(traj);
  std::ofstream rep(outdir + "/stability.json");
  rep << "{\n  \"sup_l2_sq\": " << sr.sup_l2_sq
      << ",\n  \"grad_w_sq_dt\": " << sr.grad_w_sq_dt
      << ",\n  \"eta_grad_u_sq_dt\": " << sr.eta_grad_u_sq_dt
      << ",\n  \"combined\": " << sr.combined() << "\n}\n";
  std::cout << "wrote " << outdir << "/snapshots.csv and stability.json\n";

  if (with_kinetic) {
    const double xi_max =
        cfg.get_double("scenario", "xi_max", 2.0 * std::max(1e-3, u0.linf()) + 0.5);
    const XiGrid grid(xi_max, cfg.get_int("scenario", "xi_bins", 64));
    const DefectTally tally = defect_tally(traj, grid);
    const SobolevReport sob = sobolev_diagnostics(traj, params);
    std::ofstream kin(outdir + "/kinetic.json");
    kin << kinetic_report_json(tally, {1.0, 0.5, 0.25}, sob, {}) << "\n";
    std::cout << "wrote " << outdir << "/kinetic.json\n";
  }
  return 0;
}

int cmd_characteristics(const rpm::Config& cfg, const std::string& outdir) {
  using namespace rpm;
  const Domain dom = domain_from(cfg);
  const Coefficient coeff = coefficient_from(cfg, dom);
  const double t0 = cfg.get_double("flow", "t0", 0.0);
  const double T = cfg.get_double("flow", "horizon", 1.0);
  FlowParams fp;
  fp.dt = cfg.get_double("flow", "dt", 1e-3);
  fp.with_jacobian = true;
  const SmoothPath z = path_from(cfg, first_seed(cfg), coeff.dimension(), T);

  const int nprobe = cfg.get_int("flow", "probes", 8);
  const int samples = cfg.get_int("flow", "samples", 16);
  std::filesystem::create_directories(outdir);
  std::ofstream out(outdir + "/characteristics.csv");
  out << "x0, xi0, t, X, Xi, detJ\n";
  char buf[160];
  for (int i = 1; i <= nprobe; ++i) {
    const double x0 = dom.lo + dom.width() * i / (nprobe + 1);
    for (double xi0 : {-1.0, 1.0}) {
      CharState s{x0, xi0};
      double prev = t0;
      for (int k = 1; k <= samples; ++k) {
        const double t = t0 + (T - t0) * k / samples;
        s = forward_flow(s, prev, t, z, coeff, fp);
        prev = t;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", x0, xi0, t,
                      s.x, s.xi, s.det());
        out << buf << "\n";
      }
    }
  }
  std::cout << "wrote " << outdir << "/characteristics.csv\n";
  return 0;
}

int cmd_experiment(const std::string& config_file, const std::string& outdir_flag) {
  rpm::Config cfg = rpm::Config::parse_file(config_file);
  rpm::Report rep = rpm::run_scenario(cfg);
  const std::string outdir = rpm::resolve_output_dir(outdir_flag);
  std::filesystem::create_directories(outdir);
  {
    std::ofstream out(outdir + "/report.json");
    out << rep.to_json() << "\n";
  }
  {
    std::ofstream out(outdir + "/series.csv");
    rpm::write_series_csv(out, rep.series);
  }
  for (const rpm::CheckResult& c : rep.checks)
    std::printf("[%s] %s: measured %.6g vs bound %.6g%s%s\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.measured, c.bound, c.note.empty() ? "" : " -- ",
                c.note.c_str());
  std::printf("%s: %s (report in %s)\n", rep.scenario_id.c_str(),
              rep.all_pass() ? "all checks passed" : "CHECKS FAILED", outdir.c_str());
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear diffusion with conservative rough transport noise: solver, flows, experiments"};
  app.require_subcommand(1);

  std::string config_file, outdir;
  std::vector<std::string> sets;

  auto* sim = app.add_subcommand("simulate", "Run the PDE solver, emit snapshots + stability report");
  sim->add_option("-c,--config", config_file, "config file");
  sim->add_option("--set", sets, "override section.key=value");
  sim->add_option("-o,--out", outdir, "output directory");

  auto* chars = app.add_subcommand("characteristics", "Probe the characteristic flows, emit CSV");
  chars->add_option("-c,--config", config_file, "config file");
  chars->add_option("--set", sets, "override section.key=value");
  chars->add_option("-o,--out", outdir, "output directory");

  std::string exp_config;
  auto* exp = app.add_subcommand("experiment", "Run a scenario config, emit report.json + series.csv");
  exp->add_option("config", exp_config, "scenario config file")->required();
  exp->add_option("-o,--out", outdir, "output directory (default $ROUGHPM_OUT_DIR or .)");

  std::uint64_t seed = 1;
  int dim = 1, steps = 256;
  double horizon = 1.0;
  std::string path_out = "path.csv";
  auto* sp = app.add_subcommand("sample-path", "Sample a seeded Brownian path to CSV");
  sp->add_option("--seed", seed, "RNG seed");
  sp->add_option("--dim", dim, "path dimension");
  sp->add_option("--steps", steps, "number of increments");
  sp->add_option("--T", horizon, "time horizon");
  sp->add_option("-o,--out", path_out, "output CSV file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(config_overlay(config_file, sets), rpm::resolve_output_dir(outdir));
    if (chars->parsed())
      return cmd_characteristics(config_overlay(config_file, sets),
                                 rpm::resolve_output_dir(outdir));
    if (exp->parsed()) return cmd_experiment(exp_config, outdir);
    if (sp->parsed()) {
      std::ofstream out(path_out);
      rpm::write_csv(rpm::sample_brownian(seed, dim, steps, horizon), out);
      std::cout << "wrote " << path_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
