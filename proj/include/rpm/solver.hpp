// Finite-volume IMEX solver for the regularized equation
//   du/dt = Lap(u^[m]) + eta Lap(u) + d/dx (A(x, u) zdot)
// on Q with u = 0 on the boundary: diffusion implicit (damped Newton on the
// u^[m] face-difference form), transport explicit with upwinding by the sign
// of the kinetic characteristic velocity.
#pragma once

#include <optional>
#include <vector>

#include "rpm/coefficient.hpp"
#include "rpm/grid.hpp"
#include "rpm/path.hpp"

namespace rpm {

enum class FluxScheme { Upwind, Central };

struct SolverParams {
  double m = 1.0;           // diffusion exponent
  double eta = 0.0;         // viscosity in [0, 1)
  double dt = 1e-3;         // target step
  double theta_reg = 1e-8;  // linearization floor for m < 1 (inner solve only)
  double cfl_guard = 0.9;   // explicit-transport guard, must stay < 1
  FluxScheme flux = FluxScheme::Upwind;
};

// Per-step record kept when a run feeds the kinetic module: the end-of-step
// cell values plus each cell's share of the gradient energies. The cell
// shares split every face energy between its neighbors (boundary faces go
// wholly to the single adjacent cell), so the cell sums reproduce the face
// sums exactly.
struct StepTally {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> u;         // end-of-step cell values
  std::vector<double> q_energy;  // (4m/(m+1)^2) |grad u^[(m+1)/2]|^2 share * h * dt
  std::vector<double> p_energy;  // eta |grad u|^2 share * h * dt
};

struct RecordPolicy {
  std::vector<double> times;        // snapshot times; start and end are implied
  bool with_step_tallies = false;   // keep per-step cell tallies
  double support_threshold = 1e-8;  // boundary-contact detector
};

struct Trajectory {
  std::vector<GridFunction> snapshots;
  std::vector<StepTally> step_tallies;

  double m = 1.0;
  double eta = 0.0;

  double sup_l2_sq = 0.0;          // sup over all steps of |u|_2^2
  double min_cell = 0.0;           // min over all steps and cells
  double grad_w_sq_dt = 0.0;       // int |grad u^[(m+1)/2]|^2 dt
  double eta_grad_u_sq_dt = 0.0;   // eta int |grad u|^2 dt
  double boundary_flux_abs = 0.0;  // int (|wall flux lo| + |wall flux hi|) dt

  // First time the numerical support reaches a boundary cell, and the
  // absolute boundary flux accumulated afterwards.
  std::optional<double> first_contact_time;
  double post_contact_flux_abs = 0.0;

  double q_total() const { return 4.0 * m / ((m + 1.0) * (m + 1.0)) * grad_w_sq_dt; }
  double p_total() const { return eta_grad_u_sq_dt; }

  const GridFunction& at_time(double t) const;  // snapshot lookup, exact match
};

// One conservative update of length dt_step starting at time t. The step must
// not straddle a path kink; solve() arranges that. Throws on CFL violation or
// a failed inner solve.
GridFunction step(const GridFunction& u, double t, double dt_step,
                  const SolverParams& params, const SmoothPath& path,
                  const Coefficient& c);

// March from u0.time to T with sub-steps aligned to the path kinks, the
// record times and the target dt.
Trajectory solve(const GridFunction& u0, double T, const SolverParams& params,
                 const SmoothPath& path, const Coefficient& c,
                 const RecordPolicy& record);

struct StabilityReport {
  double sup_l2_sq = 0.0;
  double grad_w_sq_dt = 0.0;
  double eta_grad_u_sq_dt = 0.0;
  double combined() const { return sup_l2_sq + grad_w_sq_dt + eta_grad_u_sq_dt; }
};

StabilityReport stability_report(const Trajectory& traj);

}  // namespace rpm
