// Kinetic function, entropy/parabolic defect tallies, the weak-form residual
// of the transported kinetic equation, and the singular-moment and Sobolev
// diagnostics.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rpm/characteristics.hpp"
#include "rpm/solver.hpp"

namespace rpm {

// chi(v, xi): +1 on 0 < xi < v, -1 on v < xi < 0, 0 elsewhere.
int kinetic_function(double v, double xi);

// Uniform velocity grid on [-xi_max, xi_max]. An even bin count keeps bin
// centers away from xi = 0, where the singular moments weight blows up.
struct XiGrid {
  double xi_max;
  int bins;

  XiGrid(double xi_max_, int bins_);
  double dxi() const { return 2.0 * xi_max / bins; }
  double center(int j) const { return -xi_max + (j + 0.5) * dxi(); }
  // Nearest-bin index of u; throws if u falls outside the grid.
  int bin_of(double u) const;
};

struct KineticField {
  Domain dom;
  XiGrid xi;
  std::vector<std::int8_t> chi;  // cells x bins, row-major

  static KineticField from_snapshot(const GridFunction& u, const XiGrid& grid);
  int at(int i, int j) const { return chi[static_cast<std::size_t>(i) * xi.bins + j]; }
  // int chi(x_i, xi) dxi, which recovers u(x_i) to O(dxi).
  double integral_dxi(int i) const;
};

// Defect masses per (recording interval, cell, velocity bin). Intervals are
// the snapshot intervals of the source trajectory; deposition is nearest-bin,
// so nonnegativity and the total masses are preserved exactly.
struct DefectTally {
  XiGrid xi;
  int cells = 0;
  std::vector<double> interval_edges;  // snapshot times, K+1 edges
  std::vector<double> p;               // K * cells * bins
  std::vector<double> q;

  DefectTally(XiGrid grid, int cells_, std::vector<double> edges);
  int intervals() const { return static_cast<int>(interval_edges.size()) - 1; }
  std::size_t index(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * cells + i) * xi.bins + j;
  }
  double p_total() const;
  double q_total() const;
  bool empty() const { return p.empty(); }
};

// Bins the per-step gradient energies of the trajectory. Requires the
// trajectory to carry step tallies; throws if any cell value leaves the grid.
DefectTally defect_tally(const Trajectory& traj, const XiGrid& grid);

// delta * sum |xi|^{delta-1} (p + q); equals the total defect mass at
// delta = 1. Throws on an empty tally.
double singular_moment(const DefectTally& tally, double delta);

// Test function rho_0 on Q x R, compactly supported in both variables.
struct TestFunction {
  std::string id;
  std::function<double(double, double)> rho0;
};

// Smooth product bump centered at (xc, xic) with half-widths (xw, xiw).
TestFunction bump_test_function(double xc, double xw, double xic, double xiw);

// Absolute defect of the transported weak formulation over [t0, t1]:
// the time-boundary bracket against the (m|xi|^{m-1} + eta) chi Lap(rho)
// quadrature and the (p+q) d_xi(rho) tally term, with rho transported by the
// backward characteristics evaluated at every quadrature node. Both t0 and
// t1 must be snapshot times. Throws if the transported support touches the
// boundary cells.
double weak_form_residual(const Trajectory& traj, const DefectTally& tally,
                          const TestFunction& rho, double t0, double t1,
                          const SmoothPath& path, const Coefficient& c,
                          const FlowParams& fp, const SolverParams& sp);

struct SobolevReport {
  double poincare_ratio_max = 0.0;  // sup_t |u|_{m+1}^{m+1} / |grad u^[(m+1)/2]|_2^2
  double sobolev_pm_norm = 0.0;     // L^{p_m}-in-time W^{1,p_m} norm of u^[m]
  double p_m = 2.0;                 // min((m+1)/m, 2)
};

SobolevReport sobolev_diagnostics(const Trajectory& traj, const SolverParams& sp);

struct WeakResidualEntry {
  std::string rho_id;
  double t0 = 0.0;
  double t1 = 0.0;
  double value = 0.0;
};

// Serialized report: {q_total, p_total, singular_moments, poincare_ratio_max,
// sobolev_pm_norm, weak_residuals}.
std::string kinetic_report_json(const DefectTally& tally,
                                const std::vector<double>& deltas,
                                const SobolevReport& sobolev,
                                const std::vector<WeakResidualEntry>& residuals);

}  // namespace rpm
