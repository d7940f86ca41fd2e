#include "rpm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rpm/quadrature.hpp"

namespace rpm {

Domain::Domain(double lo_, double hi_, int cells_) : lo(lo_), hi(hi_), cells(cells_) {
  if (!(lo < hi)) throw std::invalid_argument("Domain: requires lo < hi");
  if (cells < 4) throw std::invalid_argument("Domain: requires cells >= 4");
}

double signed_distance(const Domain& dom, double x) {
  // min(x - lo, hi - x) carries the right sign on both sides of the boundary.
  return std::min(x - dom.lo, dom.hi - x);
}

double extended_normal(const Domain& dom, double x) {
  const double dlo = std::abs(x - dom.lo);
  const double dhi = std::abs(x - dom.hi);
  if (dlo == dhi)
    throw std::domain_error("extended_normal: equidistant from both boundary points");
  return dlo < dhi ? -1.0 : 1.0;
}

namespace {

// Standard positive radial mollifier on (-1,1), normalized to unit mass.
double bump_raw(double r) {
  const double s = 1.0 - r * r;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

double bump_mass() {
  static const double mass = integrate_panels([](double r) { return bump_raw(r); },
                                              -1.0, 1.0, gauss_legendre(24), 16);
  return mass;
}

double mollifier(double r) { return bump_raw(r) / bump_mass(); }

// Piecewise-linear ramp psi_beta^o: 0 below k1 = beta^gamma, linear slope
// 1/beta on [k1, k2 = beta + beta^gamma], 1 above.
double ramp(double s, double k1, double k2, double beta) {
  if (s <= k1) return 0.0;
  if (s >= k2) return 1.0;
  return (s - k1) / beta;
}

}  // namespace

CutoffParams::CutoffParams(double beta_, double m_)
    : CutoffParams(beta_, m_, std::min(m_ + 2.0, 3.0)) {}

CutoffParams::CutoffParams(double beta_, double m_, double gamma_m_)
    : beta(beta_), m(m_), gamma_m(gamma_m_) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("CutoffParams: beta must lie in (0,1)");
  if (!(m > 0.0)) throw std::invalid_argument("CutoffParams: m must be positive");
}

double CutoffParams::inner_width() const { return std::pow(beta, gamma_m); }
double CutoffParams::moll_scale() const { return 0.5 * inner_width(); }

double cutoff(const CutoffParams& params, const Domain& dom, double x) {
  const double d = signed_distance(dom, x);
  const double eps = params.moll_scale();
  const double k1 = params.inner_width();
  const double k2 = params.beta + k1;
  if (d <= k1 - eps) return 0.0;
  if (d >= k2 + eps) return 1.0;
  // psi_beta = mollifier_eps * ramp, evaluated as an integral over the
  // mollifier support. The integrand has kinks where s - eps*r crosses k1 or
  // k2; split there so each piece is smooth for the quadrature.
  std::vector<double> cuts = {-1.0, 1.0};
  for (double kink : {k1, k2}) {
    const double r = (d - kink) / eps;
    if (r > -1.0 && r < 1.0) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  const auto& rule = gauss_legendre(24);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += integrate_panels(
        [&](double r) { return mollifier(r) * ramp(d - eps * r, k1, k2, params.beta); },
        cuts[i], cuts[i + 1], rule, 8);
  return std::clamp(acc, 0.0, 1.0);
}

std::pair<double, double> cutoff_derivatives(const CutoffParams& params,
                                             const Domain& dom, double x) {
  const double d = signed_distance(dom, x);
  const double eps = params.moll_scale();
  const double k1 = params.inner_width();
  const double k2 = params.beta + k1;
  if (d <= k1 - eps || d >= k2 + eps) return {0.0, 0.0};

  // d/ds of the mollified ramp: (1/beta) * integral of the mollifier over the
  // preimage of the ramp's linear piece.
  const double r_hi = std::min(1.0, (d - k1) / eps);
  const double r_lo = std::max(-1.0, (d - k2) / eps);
  double dpsi = 0.0;
  if (r_hi > r_lo)
    dpsi = integrate_panels([](double r) { return mollifier(r); }, r_lo, r_hi,
                            gauss_legendre(24), 8) /
           params.beta;

  // Second derivative is the difference of the rescaled mollifier at the two
  // kinks of the ramp.
  const double d2psi =
      (mollifier((d - k1) / eps) - mollifier((d - k2) / eps)) / (eps * params.beta);

  // Chain rule through the signed distance; in 1-D |d'| = 1 and d'' = 0 away
  // from the midpoint, where the cutoff is constant anyway.
  const double dprime = (x - dom.lo < dom.hi - x) ? 1.0 : -1.0;
  return {dpsi * dprime, d2psi};
}

double boundary_layer_measure(const Domain& dom, double ell, double c1) {
  if (ell < 0.0) throw std::invalid_argument("boundary_layer_measure: ell must be >= 0");
  return std::min(2.0 * c1 * ell, dom.width());
}

}  // namespace rpm
