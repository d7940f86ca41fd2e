// Spatial domain, signed distance, extended normal, boundary layers and the
// cutoff family phi_beta used by the diagnostics.
#pragma once

#include <utility>

namespace rpm {

// Open interval (lo, hi) with a uniform cell mesh. The interval is the
// 1-D instance of the domain; positions stay scalar doubles throughout so
// a vector-valued extension only touches this module.
struct Domain {
  double lo;
  double hi;
  int cells;

  Domain(double lo_, double hi_, int cells_);

  double width() const { return hi - lo; }
  double h() const { return width() / cells; }
  double center(int i) const { return lo + (i + 0.5) * h(); }
  double face(int j) const { return lo + j * h(); }
  bool contains(double x) const { return x > lo && x < hi; }
};

// Signed distance to the boundary: positive inside, zero on {lo, hi},
// negative outside. Total function.
double signed_distance(const Domain& dom, double x);

// Extended unit outward normal: -1 near lo, +1 near hi. Throws at the exact
// midpoint, where the nearest boundary point is not unique.
double extended_normal(const Domain& dom, double x);

// Parameters of the cutoff phi_beta. The inner dead layer has width
// beta^gamma_m and the ramp has slope ~1/beta; the profile is a mollified
// piecewise-linear ramp, mollifier scale beta^gamma_m / 2.
//
// The exponent gamma_m defaults to min(m+2, 3); it is configurable because
// the rescaled variant min is not the only choice in use (see module docs).
struct CutoffParams {
  double beta;
  double m;
  double gamma_m;

  CutoffParams(double beta_, double m_);
  CutoffParams(double beta_, double m_, double gamma_m_);

  double inner_width() const;  // beta^gamma_m
  double moll_scale() const;   // beta^gamma_m / 2
};

// phi_beta(x) in [0,1]: 0 when signed_distance < beta^gamma_m/2, 1 when
// signed_distance > beta + (3/2) beta^gamma_m, smooth and monotone in the
// signed distance in between.
double cutoff(const CutoffParams& params, const Domain& dom, double x);

// (first, second) derivative of phi_beta at x. Both vanish wherever
// phi_beta is locally constant; |phi'| <= C/beta with C independent of beta.
std::pair<double, double> cutoff_derivatives(const CutoffParams& params,
                                             const Domain& dom, double x);

// Lebesgue measure of {x in Q : signed_distance(x) <= c1 * ell}. Equals
// 2*c1*ell while the two layers are disjoint, saturating at |Q|.
double boundary_layer_measure(const Domain& dom, double ell, double c1 = 1.0);

}  // namespace rpm
