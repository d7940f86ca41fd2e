// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantities at the pinned tolerances.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "rpm/experiments.hpp"
#include "rpm/kinetic.hpp"
#include "rpm/lift.hpp"

using namespace rpm;

namespace {

constexpr double kPi = std::numbers::pi;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int criterion, const char* name, bool pass, const char* fmt, ...) {
  std::printf("[acceptance] criterion %d (%s): %s ", criterion, name,
              pass ? "PASS" : "FAIL");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

bool all_pass(const Report& rep) {
  for (const CheckResult& c : rep.checks)
    if (!c.pass) std::printf("    failed check %s: %.6g vs %.6g\n", c.name.c_str(),
                             c.measured, c.bound);
  return rep.all_pass();
}

RecordPolicy records(double T, int points, bool tallies = false) {
  RecordPolicy rec;
  for (int k = 0; k < points; ++k) rec.times.push_back(T * k / (points - 1));
  rec.with_step_tallies = tallies;
  return rec;
}

}  // namespace

TEST_CASE("criterion 1: heat-equation oracle") {
  const auto t0 = std::chrono::steady_clock::now();
  Domain q(0.0, 1.0, 512);
  SolverParams params;
  params.m = 1.0;
  params.eta = 0.0;
  params.dt = 1e-5;
  const double T = 0.1;
  const GridFunction u0 = project(q, [](double x) { return std::sin(kPi * x); });
  const Trajectory traj = solve(u0, T, params, zero_path(1, T), Coefficient::zero(1), {});
  const GridFunction exact =
      project(q, [&](double x) { return std::exp(-kPi * kPi * T) * std::sin(kPi * x); });
  const double err = l2_diff(traj.snapshots.back(), exact);
  const double elapsed = seconds_since(t0);
  const bool pass = err <= 5e-4 && elapsed < 10.0;
  report(1, "heat oracle", pass, "L2 error %.3e (tol 5e-4), runtime %.2f s (< 10 s)", err,
         elapsed);
  CHECK(err <= 5e-4);
  CHECK(elapsed < 10.0);
}

TEST_CASE("criterion 2: L1 contraction across the diffusion regimes") {
  const char* base = R"(
[scenario]
kind = contraction
id = acceptance-contraction
T = 0.25
seeds = 1 2 3 4 5
record_points = 11
u0_a = bump:0.4,0.2,1.0
u0_b = bump:0.6,0.2,0.5
[pde]
cells = 64
dt = 2.5e-4
[coefficient]
kind = basis-product
sigma = identity
basis = sinsq:1
amplitude = 0.5
[path]
kind = brownian
steps = 64
[tolerances]
contraction = 0.02
)";
  bool pass = true;
  for (double m : {0.5, 1.0, 2.0, 3.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    Config cfg = Config::parse_string(base);
    cfg.set("pde", "m", std::to_string(m));
    const Report rep = run_contraction(cfg);
    const double elapsed = seconds_since(t0);
    const bool ok = all_pass(rep) && elapsed < 120.0;
    pass = pass && ok;
    double worst = 0.0;
    for (const CheckResult& c : rep.checks) worst = std::max(worst, c.measured / c.bound);
    std::printf("    m = %.1f: worst ratio to bound %.4f, %zu runs, %.2f s\n", m, worst,
                rep.checks.size(), elapsed);
    CHECK(ok);
  }
  report(2, "contraction", pass, "m in {0.5, 1, 2, 3}, 5 seeds, tol 2%%");
}

TEST_CASE("criterion 3: positivity and interior mass conservation") {
  Config cfg = Config::parse_string(R"(
[scenario]
kind = positivity-mass
id = acceptance-positivity
T = 0.25
seeds = 5
record_points = 21
u0 = bump:0.5,0.2,1.0
[pde]
cells = 64
m = 3
dt = 2.5e-4
[coefficient]
kind = basis-product
sigma = identity
basis = sinsq:1
amplitude = 0.5
[path]
kind = brownian
steps = 64
[tolerances]
negativity = 1e-8
mass_drift = 1e-8
)");
  const Report rep = run_positivity_mass(cfg);
  double min_cell = 0.0, drift = 0.0;
  for (const CheckResult& c : rep.checks) {
    if (c.name == "min_cell") min_cell = c.measured;
    if (c.name == "mass_drift_pre_contact") drift = c.measured;
  }
  const bool pass = all_pass(rep);
  report(3, "positivity + mass", pass, "min cell %.3e (>= -1e-8), rel drift %.3e (<= 1e-8)",
         min_cell, drift);
  CHECK(pass);
}

TEST_CASE("criterion 4: cocycle property") {
  Config cfg = Config::parse_string(R"(
[scenario]
kind = cocycle
id = acceptance-cocycle
T = 0.25
seeds = 1 2 3
u0 = bump:0.5,0.25,1.0
[pde]
cells = 64
m = 2
dt = 2.5e-4
[coefficient]
kind = basis-product
sigma = identity
basis = sinsq:1
amplitude = 0.5
[path]
kind = brownian
steps = 64
)");
  const Report rep = run_cocycle(cfg);
  const bool pass = all_pass(rep);
  double worst = 0.0;
  for (const CheckResult& c : rep.checks) worst = std::max(worst, c.measured);
  report(4, "cocycle", pass, "shift T/3, 3 seeds, worst mismatch %.3e (<= 10x Richardson)",
         worst);
  CHECK(pass);
}

TEST_CASE("criterion 5: continuity in the driving noise") {
  Config cfg = Config::parse_string(R"(
[scenario]
kind = noise-continuity
id = acceptance-noise
T = 0.25
seeds = 8
levels = 5
base_level = 3
record_points = 17
u0 = bump:0.5,0.25,1.0
[pde]
cells = 48
m = 2
dt = 1.220703125e-4
[coefficient]
kind = basis-product
sigma = identity
basis = sinsq:1
amplitude = 0.25
[path]
kind = brownian
steps = 512
[flow]
alpha = 0.40
[tolerances]
finest_relative_error = 1e-2
)");
  const Report rep = run_noise_continuity(cfg);
  const bool pass = all_pass(rep);
  double rel = 0.0;
  for (const CheckResult& c : rep.checks)
    if (c.name == "finest_relative_error") rel = c.measured;
  report(5, "noise continuity", pass,
         "5 dyadic levels, both ladders non-increasing, finest rel error %.3e (<= 1e-2)", rel);
  CHECK(pass);
}

TEST_CASE("criterion 6: characteristics suite") {
  Domain q(0.0, 1.0, 64);
  const Coefficient c =
      build_basis_coefficient(sigma_rational(), {basis_sin_sq(q, 1)}, q, 0.5);
  const SmoothPath z = sample_brownian(8, 1, 64, 1.0);
  FlowParams p{1e-3, false};

  // inverse relation at dt = 1e-3
  double inv = 0.0;
  for (double x : {0.25, 0.5, 0.75})
    for (double xi : {-1.5, 0.5, 2.0})
      inv = std::max(inv, check_inverse(x, xi, 0.2, 1.0, z, c, p));
  const bool inv_ok = inv <= 1e-8;

  // measure preservation over [0, 1]
  double detdrift = 0.0;
  for (double x : {0.3, 0.6})
    for (double xi : {-1.0, 1.0})
      detdrift = std::max(detdrift, measure_preservation(x, xi, 0.0, 1.0, z, c, p));
  const bool det_ok = detdrift <= 1e-6;

  // sign preservation on a 10^3-point probe grid
  bool sign_ok = true;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const double x = (i + 0.5) / 32.0;
      const double xi = -2.0 + 4.0 * (j + 0.5) / 32.0;
      if (!sign_preserved(x, xi, 0.0, 1.0, z, c, p)) sign_ok = false;
    }

  // boundary ladder 2^-3 .. 2^-8: standstill and no upward drift of the
  // slowdown ratios toward the boundary
  const std::vector<double> xis{-1.0, 0.5, 2.0};
  const BoundaryLadderReport ladder = boundary_estimates(q, 3, 8, xis, 1.0, z, c, p);
  const bool still_ok = ladder.standstill <= 1e-10;
  bool flat_ok = true;
  for (const std::vector<double>* tab :
       {&ladder.move_ratio, &ladder.dxi_y_ratio, &ladder.dxy_ratio}) {
    const double head = std::max((*tab)[0], (*tab)[1]);
    for (double v : *tab)
      if (v > 1.5 * head + 1e-12) flat_ok = false;
  }

  const bool pass = inv_ok && det_ok && sign_ok && still_ok && flat_ok;
  report(6, "characteristics suite", pass,
         "inverse %.2e (<= 1e-8), |detJ-1| %.2e (<= 1e-6), standstill %.2e (<= 1e-10), "
         "sign grid %s, ladder drift %s",
         inv, detdrift, ladder.standstill, sign_ok ? "ok" : "violated",
         flat_ok ? "within +50%" : "exceeded");
  CHECK(inv_ok);
  CHECK(det_ok);
  CHECK(sign_ok);
  CHECK(still_ok);
  CHECK(flat_ok);
}

TEST_CASE("criterion 7: rough-path suite") {
  // geometricity and Chen relation of the Stratonovich lift
  double geo = 0.0, chen = 0.0;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::uint64_t seed : {1, 2, 3}) {
    const Level2Path z = stratonovich_lift(sample_brownian(seed, 2, 64, 1.0));
    for (int rep = 0; rep < 40; ++rep) {
      double s = u01(rng), t = u01(rng), r = u01(rng);
      if (s > t) std::swap(s, t);
      if (t > r) std::swap(t, r);
      if (s > t) std::swap(s, t);
      if (r - s < 1e-3) continue;
      const auto inc = z.increment(s, r);
      const auto A = z.area(s, r);
      double norm2 = 1.0;
      for (double x : inc) norm2 += x * x;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double sym = 0.5 * (A[i * 2 + j] + A[j * 2 + i]);
          geo = std::max(geo, std::abs(sym - 0.5 * inc[i] * inc[j]) / norm2);
        }
      const auto Ast = z.area(s, t);
      const auto Atr = z.area(t, r);
      const auto i1 = z.increment(s, t);
      const auto i2 = z.increment(t, r);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          chen = std::max(chen, std::abs(A[i * 2 + j] - Ast[i * 2 + j] - Atr[i * 2 + j] -
                                         i1[i] * i2[j]));
    }
  }
  const bool lift_ok = geo <= 1e-12 && chen <= 1e-12;

  // d_alpha axioms on the sampled grid
  HolderMetricParams hp;
  hp.alpha = 0.45;
  hp.pair_grid = dyadic_pairs(1.0, 6);
  const Level2Path a = stratonovich_lift(sample_brownian(11, 1, 64, 1.0));
  const Level2Path b = stratonovich_lift(sample_brownian(12, 1, 64, 1.0));
  const Level2Path cc = stratonovich_lift(sample_brownian(13, 1, 64, 1.0));
  const bool axioms_ok =
      holder_distance(a, a, hp) == 0.0 &&
      holder_distance(a, b, hp) == holder_distance(b, a, hp) &&
      holder_distance_parts(a, cc, hp).level1 <=
          holder_distance_parts(a, b, hp).level1 +
              holder_distance_parts(b, cc, hp).level1 + 1e-12;

  // Brownian terminal statistics within Monte Carlo bands
  const int trials = 10000;
  const double T = 1.0;
  double sum = 0.0, sumsq = 0.0;
  for (int k = 0; k < trials; ++k) {
    const SmoothPath pth = sample_brownian(50000 + k, 1, 8, T);
    const double zT = pth.node(pth.segments())[0];
    sum += zT;
    sumsq += zT * zT;
  }
  const double mean = sum / trials;
  const double var = sumsq / trials - mean * mean;
  const bool stats_ok =
      std::abs(mean) <= 3.0 * std::sqrt(T / trials) && std::abs(var - T) <= 0.05 * T;

  const bool pass = lift_ok && axioms_ok && stats_ok;
  report(7, "rough-path suite", pass,
         "geometricity %.2e, Chen %.2e (<= 1e-12), axioms %s, MC mean %.4f var %.4f",
         geo, chen, axioms_ok ? "exact" : "violated", mean, var);
  CHECK(lift_ok);
  CHECK(axioms_ok);
  CHECK(stats_ok);
}

TEST_CASE("criterion 8: kinetic suite") {
  // chi integral recovers u to O(dxi)
  Domain q(0.0, 1.0, 64);
  const GridFunction uu =
      project(q, [](double x) { return 1.2 * std::sin(2 * kPi * x); });
  const XiGrid grid0(2.0, 128);
  const KineticField field = KineticField::from_snapshot(uu, grid0);
  double chi_err = 0.0;
  for (int i = 0; i < q.cells; ++i)
    chi_err = std::max(chi_err, std::abs(field.integral_dxi(i) - uu.values[i]));
  const bool chi_ok = chi_err <= grid0.dxi();

  // weak-form residual: first-order decay under joint refinement and
  // sensitivity to an injected perturbation
  const double T = 0.1;
  FlowParams fp{2e-3, false};
  SolverParams sp;
  sp.m = 1.0;
  const TestFunction rho = bump_test_function(0.5, 0.3, 0.45, 0.4);
  auto heat_traj = [&](int cells, double dt, int rp) {
    Domain qq(0.0, 1.0, cells);
    SolverParams pp;
    pp.m = 1.0;
    pp.dt = dt;
    const GridFunction u0 = project(qq, [](double x) { return std::sin(kPi * x); });
    return solve(u0, T, pp, zero_path(1, T), Coefficient::zero(1), records(T, rp, true));
  };
  auto residual_of = [&](const Trajectory& traj, int bins, double dt) {
    const DefectTally tally = defect_tally(traj, XiGrid(1.5, bins));
    sp.dt = dt;
    return weak_form_residual(traj, tally, rho, 0.0, T, zero_path(1, T),
                              Coefficient::zero(1), fp, sp);
  };
  const double r0 = residual_of(heat_traj(48, 2e-3, 5), 24, 2e-3);
  Trajectory mid = heat_traj(96, 1e-3, 9);
  const double r1 = residual_of(mid, 48, 1e-3);
  const double r2 = residual_of(heat_traj(192, 5e-4, 17), 96, 5e-4);
  const double ratio01 = r0 / r1, ratio12 = r1 / r2;
  const bool decay_ok =
      ratio01 >= 1.5 && ratio01 <= 3.0 && ratio12 >= 1.5 && ratio12 <= 3.0;

  const double base = r1;
  for (GridFunction& g : mid.snapshots)
    if (g.time > 0.5 * T)
      for (int i = 0; i < g.dom.cells; ++i)
        g.values[i] += 0.1 * compact_bump((g.dom.center(i) - 0.5) / 0.2);
  const double perturbed = residual_of(mid, 48, 1e-3);
  const bool sens_ok = perturbed >= 10.0 * base;

  // singular moments finite on a nonnegative run
  Domain qs(0.0, 1.0, 64);
  SolverParams ps;
  ps.m = 2.0;
  ps.dt = 2.5e-4;
  const Coefficient cs =
      build_basis_coefficient(sigma_identity(), {basis_sin_sq(qs, 1)}, qs, 0.25);
  const GridFunction us =
      project(qs, [](double x) { return compact_bump((x - 0.5) / 0.22); });
  const Trajectory ts =
      solve(us, 0.1, ps, sample_brownian(8, 1, 64, 0.1), cs, records(0.1, 9, true));
  const DefectTally tallys = defect_tally(ts, XiGrid(2.0, 64));
  bool moments_ok = true;
  double worst_moment = 0.0;
  for (double delta : {1.0, 0.5, 0.25}) {
    const double mom = singular_moment(tallys, delta);
    worst_moment = std::max(worst_moment, mom);
    if (!std::isfinite(mom)) moments_ok = false;
  }

  // Poincare ratio for sin(pi x), m = 1
  Domain qp(0.0, 1.0, 256);
  Trajectory tp;
  tp.m = 1.0;
  tp.snapshots = {project(qp, [](double x) { return std::sin(kPi * x); })};
  tp.snapshots.push_back(tp.snapshots[0]);
  tp.snapshots[1].time = 1.0;
  SolverParams pp;
  pp.m = 1.0;
  const double ratio = sobolev_diagnostics(tp, pp).poincare_ratio_max;
  const bool poincare_ok = std::abs(ratio - 1.0 / (kPi * kPi)) <= 0.01 / (kPi * kPi);

  const bool pass = chi_ok && decay_ok && sens_ok && moments_ok && poincare_ok;
  report(8, "kinetic suite", pass,
         "chi error %.2e (<= dxi %.2e), residual ratios %.2f/%.2f (in [1.5,3]), "
         "sensitivity %.1fx (>= 10x), moments finite (max %.3g), Poincare %.6f vs %.6f",
         chi_err, grid0.dxi(), ratio01, ratio12, perturbed / base, worst_moment, ratio,
         1.0 / (kPi * kPi));
  CHECK(chi_ok);
  CHECK(decay_ok);
  CHECK(sens_ok);
  CHECK(moments_ok);
  CHECK(poincare_ok);
}

TEST_CASE("criterion 9: stable estimates across the (eta, eps) sweep") {
  Config cfg = Config::parse_string(R"(
[scenario]
kind = vanishing-viscosity
id = acceptance-stability
T = 0.25
seeds = 1
record_points = 9
u0 = bump:0.5,0.25,1.0
etas = 0.1 0.01 0.001
epsilons = 0.1 0.01 0.001
[pde]
cells = 48
m = 2
dt = 1e-4
[coefficient]
kind = basis-product
sigma = identity
basis = sinsq:1
amplitude = 0.2
[path]
kind = brownian
steps = 1024
)");
  const Report rep = run_vanishing_viscosity(cfg);
  double variation = 0.0, value = 0.0, bound = 0.0;
  for (const CheckResult& c : rep.checks) {
    if (c.name == "sweep_variation_factor") variation = c.measured;
    if (c.name == "sweep_bounded_by_fitted_C") {
      value = c.measured;
      bound = c.bound;
    }
  }
  const bool pass = all_pass(rep);
  report(9, "stable estimates", pass,
         "sweep variation %.3f (< 2), max combined %.4f <= fitted C(1+|u0|^2) = %.4f",
         variation, value, bound);
  CHECK(pass);
}
