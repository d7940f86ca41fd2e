// Forward and backward characteristic flows of the kinetic transport, their
// derivative flows, and the executable flow-property checks.
#pragma once

#include <array>
#include <vector>

#include "rpm/coefficient.hpp"
#include "rpm/geometry.hpp"
#include "rpm/path.hpp"

namespace rpm {

// A point (x, xi) with an optional 2x2 derivative-flow matrix, row-major
// blocks [dX/dx, dX/dxi; dXi/dx, dXi/dxi]. The vector field of the
// characteristic system is divergence-free in (x, xi), so det(jac) stays 1
// up to integrator error.
struct CharState {
  double x = 0.0;
  double xi = 0.0;
  std::array<double, 4> jac{1.0, 0.0, 0.0, 1.0};

  double det() const { return jac[0] * jac[3] - jac[1] * jac[2]; }
};

struct FlowParams {
  double dt = 1e-3;           // target step; sub-steps align with path kinks
  bool with_jacobian = false;
};

// Integrates dX = -d_xi A(X, Xi) zdot, dXi = d_x A(X, Xi) zdot from t0 to t1
// with the classical 4th-order one-step method; co-integrates the variational
// equations when requested. Throws on non-finite states.
CharState forward_flow(CharState s0, double t0, double t1, const SmoothPath& path,
                       const Coefficient& c, const FlowParams& p);

// Same integration applied to a whole batch with a common step schedule.
void forward_flow_batch(std::vector<CharState>& states, double t0, double t1,
                        const SmoothPath& path, const Coefficient& c,
                        const FlowParams& p);

// Backward characteristic (Y, Pi) at backward time s in [0, t0]: the forward
// system driven by the reversed path.
CharState backward_flow(CharState s0, double t0, double s, const SmoothPath& path,
                        const Coefficient& c, const FlowParams& p);

// |forward o backward (x, xi) - (x, xi)| under the inverse-relation
// composition; O(dt^4) for smooth coefficients.
double check_inverse(double x, double xi, double t0, double t, const SmoothPath& path,
                     const Coefficient& c, const FlowParams& p);

// |det(jac) - 1| after flowing from t0 to t.
double measure_preservation(double x, double xi, double t0, double t,
                            const SmoothPath& path, const Coefficient& c,
                            const FlowParams& p);

// sign(Xi) == sign(xi) along the flow, with Xi == 0 iff xi == 0 (to tol).
bool sign_preserved(double x, double xi, double t0, double t, const SmoothPath& path,
                    const Coefficient& c, const FlowParams& p, double tol = 1e-10);

// Distance-ladder report near the boundary: for delta_k = 2^-k, the sup over
// time (and the sampled velocities) of |X - x| / delta_k, |dY/dxi| / delta_k
// and |dY/dx - I| / delta_k, plus the displacement of boundary-started
// characteristics.
struct BoundaryLadderReport {
  std::vector<int> k;
  std::vector<double> move_ratio;
  std::vector<double> dxi_y_ratio;
  std::vector<double> dxy_ratio;
  double standstill = 0.0;
};

BoundaryLadderReport boundary_estimates(const Domain& dom, int k_min, int k_max,
                                        std::span<const double> xi_samples, double t0,
                                        const SmoothPath& path, const Coefficient& c,
                                        const FlowParams& p);

// min and max of |Pi(s)| / |xi| over the backward horizon, and the fitted
// sup of |grad_x Pi| / (s^alpha (|xi| ^ 1)). Throws for xi == 0.
struct VelocityComparability {
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  double grad_pi_fitted = 0.0;
};

VelocityComparability velocity_comparability(double x, double xi, double t0,
                                             const SmoothPath& path, const Coefficient& c,
                                             const FlowParams& p, double alpha = 0.45);

// Sup over probes and derivative order j in {0,1} of the deviation between
// the two driven flows, sampled along [0, T]. Throws if either path leaves
// the configured d_alpha ball around the zero path.
double flow_stability(const SmoothPath& path_a, const SmoothPath& path_b,
                      const Coefficient& c, const FlowParams& p,
                      std::span<const std::pair<double, double>> probes,
                      double r_ball, double alpha = 0.45);

}  // namespace rpm
