#include "rpm/characteristics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rpm/lift.hpp"

namespace rpm {

namespace {

struct Rhs {
  double fx = 0.0;
  double fxi = 0.0;
  std::array<double, 4> fj{0.0, 0.0, 0.0, 0.0};
};

// Work area sized to the noise dimension; reused across stages.
struct Scratch {
  std::vector<double> a_xi, a_x, a_xxi, a_xixi, a_xx;
  explicit Scratch(int n) : a_xi(n), a_x(n), a_xxi(n), a_xixi(n), a_xx(n) {}
};

// Right-hand side of the characteristic system and, when requested, of the
// variational equations J' = M J with
//   M = [ -d_x d_xi A . zdot   -d_xi^2 A . zdot ]
//       [     d_x^2 A . zdot    d_x d_xi A . zdot ].
// M is trace-free, which is what makes the flow measure-preserving.
void eval_rhs(const Coefficient& c, const double* zdot, const CharState& s,
              bool with_jac, Scratch& w, Rhs& out) {
  const int n = c.dimension();
  c.a_xi(s.x, s.xi, w.a_xi.data());
  c.a_x(s.x, s.xi, w.a_x.data());
  double vx = 0.0, vxi = 0.0;
  for (int j = 0; j < n; ++j) {
    vx -= w.a_xi[j] * zdot[j];
    vxi += w.a_x[j] * zdot[j];
  }
  out.fx = vx;
  out.fxi = vxi;
  if (!with_jac) return;
  c.a_xxi(s.x, s.xi, w.a_xxi.data());
  c.a_xixi(s.x, s.xi, w.a_xixi.data());
  c.a_xx(s.x, s.xi, w.a_xx.data());
  double m00 = 0.0, m01 = 0.0, m10 = 0.0;
  for (int j = 0; j < n; ++j) {
    m00 -= w.a_xxi[j] * zdot[j];
    m01 -= w.a_xixi[j] * zdot[j];
    m10 += w.a_xx[j] * zdot[j];
  }
  const double m11 = -m00;
  out.fj[0] = m00 * s.jac[0] + m01 * s.jac[2];
  out.fj[1] = m00 * s.jac[1] + m01 * s.jac[3];
  out.fj[2] = m10 * s.jac[0] + m11 * s.jac[2];
  out.fj[3] = m10 * s.jac[1] + m11 * s.jac[3];
}

CharState advance(const CharState& s, const Rhs& k, double w, bool with_jac) {
  CharState out = s;
  out.x += w * k.fx;
  out.xi += w * k.fxi;
  if (with_jac)
    for (int i = 0; i < 4; ++i) out.jac[i] += w * k.fj[i];
  return out;
}

void rk4_step(CharState& s, double h, const Coefficient& c, const double* zdot,
              bool with_jac, Scratch& w) {
  Rhs k1, k2, k3, k4;
  eval_rhs(c, zdot, s, with_jac, w, k1);
  eval_rhs(c, zdot, advance(s, k1, 0.5 * h, with_jac), with_jac, w, k2);
  eval_rhs(c, zdot, advance(s, k2, 0.5 * h, with_jac), with_jac, w, k3);
  eval_rhs(c, zdot, advance(s, k3, h, with_jac), with_jac, w, k4);
  const double w6 = h / 6.0;
  s.x += w6 * (k1.fx + 2.0 * (k2.fx + k3.fx) + k4.fx);
  s.xi += w6 * (k1.fxi + 2.0 * (k2.fxi + k3.fxi) + k4.fxi);
  if (with_jac)
    for (int i = 0; i < 4; ++i)
      s.jac[i] += w6 * (k1.fj[i] + 2.0 * (k2.fj[i] + k3.fj[i]) + k4.fj[i]);
}

// Breakpoints of [t0, t1] at every interior path kink.
std::vector<double> breakpoints(const SmoothPath& path, double t0, double t1) {
  std::vector<double> bp{t0};
  for (double tk : path.times)
    if (tk > t0 + 1e-15 && tk < t1 - 1e-15) bp.push_back(tk);
  bp.push_back(t1);
  return bp;
}

// Core integrator. The observer is called after every sub-step with the
// current time and state.
template <typename Obs>
CharState integrate(CharState s, double t0, double t1, const SmoothPath& path,
                    const Coefficient& c, const FlowParams& p, Obs&& obs) {
  if (!(p.dt > 0.0)) throw std::invalid_argument("FlowParams: dt must be positive");
  if (t1 < t0) throw std::invalid_argument("forward_flow: requires t0 <= t1");
  if (t1 == t0) return s;
  Scratch w(c.dimension());
  std::vector<double> zdot(c.dimension());
  const std::vector<double> bp = breakpoints(path, t0, t1);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i], b = bp[i + 1];
    path.derivative(path.segment_of(0.5 * (a + b)), zdot.data());
    const int nsub = std::max(1, static_cast<int>(std::ceil((b - a) / p.dt - 1e-12)));
    const double h = (b - a) / nsub;
    for (int k = 0; k < nsub; ++k) {
      rk4_step(s, h, c, zdot.data(), p.with_jacobian, w);
      if (!std::isfinite(s.x) || !std::isfinite(s.xi))
        throw std::runtime_error("flow: non-finite state at t = " +
                                 std::to_string(a + (k + 1) * h));
      obs(a + (k + 1) * h, s);
    }
  }
  return s;
}

struct NoObs {
  void operator()(double, const CharState&) const {}
};

}  // namespace

CharState forward_flow(CharState s0, double t0, double t1, const SmoothPath& path,
                       const Coefficient& c, const FlowParams& p) {
  return integrate(s0, t0, t1, path, c, p, NoObs{});
}

void forward_flow_batch(std::vector<CharState>& states, double t0, double t1,
                        const SmoothPath& path, const Coefficient& c,
                        const FlowParams& p) {
  for (auto& s : states) s = integrate(s, t0, t1, path, c, p, NoObs{});
}

CharState backward_flow(CharState s0, double t0, double s, const SmoothPath& path,
                        const Coefficient& c, const FlowParams& p) {
  if (s < 0.0 || s > t0 * (1.0 + 1e-12))
    throw std::invalid_argument("backward_flow: requires 0 <= s <= t0");
  if (s == 0.0) return s0;
  const SmoothPath rev = reverse(path, t0);
  return integrate(s0, 0.0, std::min(s, t0), rev, c, p, NoObs{});
}

double check_inverse(double x, double xi, double t0, double t, const SmoothPath& path,
                     const Coefficient& c, const FlowParams& p) {
  if (t < t0) throw std::invalid_argument("check_inverse: requires t >= t0");
  FlowParams q = p;
  q.with_jacobian = false;
  const CharState back = backward_flow({x, xi}, t, t - t0, path, c, q);
  const CharState fwd = forward_flow(back, t0, t, path, c, q);
  return std::hypot(fwd.x - x, fwd.xi - xi);
}

double measure_preservation(double x, double xi, double t0, double t,
                            const SmoothPath& path, const Coefficient& c,
                            const FlowParams& p) {
  FlowParams q = p;
  q.with_jacobian = true;
  const CharState s = forward_flow({x, xi}, t0, t, path, c, q);
  return std::abs(s.det() - 1.0);
}

bool sign_preserved(double x, double xi, double t0, double t, const SmoothPath& path,
                    const Coefficient& c, const FlowParams& p, double tol) {
  FlowParams q = p;
  q.with_jacobian = false;
  bool ok = true;
  integrate({x, xi}, t0, t, path, c, q, [&](double, const CharState& s) {
    if (xi == 0.0) {
      if (std::abs(s.xi) > tol) ok = false;
    } else if (s.xi * xi <= 0.0 || std::abs(s.xi) <= tol * std::abs(xi)) {
      ok = false;
    }
  });
  return ok;
}

BoundaryLadderReport boundary_estimates(const Domain& dom, int k_min, int k_max,
                                        std::span<const double> xi_samples, double t0,
                                        const SmoothPath& path, const Coefficient& c,
                                        const FlowParams& p) {
  BoundaryLadderReport rep;
  FlowParams pj = p;
  pj.with_jacobian = true;
  const SmoothPath rev = reverse(path, t0);
  for (int k = k_min; k <= k_max; ++k) {
    const double delta = std::pow(2.0, -k);
    double move = 0.0, dxi_y = 0.0, dxy = 0.0;
    for (double x0 : {dom.lo + delta, dom.hi - delta}) {
      for (double xi0 : xi_samples) {
        integrate({x0, xi0}, 0.0, t0, path, c, p, [&](double, const CharState& s) {
          move = std::max(move, std::abs(s.x - x0));
        });
        integrate({x0, xi0}, 0.0, t0, rev, c, pj, [&](double, const CharState& s) {
          dxi_y = std::max(dxi_y, std::abs(s.jac[1]));
          dxy = std::max(dxy, std::abs(s.jac[0] - 1.0));
        });
      }
    }
    rep.k.push_back(k);
    rep.move_ratio.push_back(move / delta);
    rep.dxi_y_ratio.push_back(dxi_y / delta);
    rep.dxy_ratio.push_back(dxy / delta);
  }
  for (double xb : {dom.lo, dom.hi}) {
    for (double xi0 : xi_samples) {
      integrate({xb, xi0}, 0.0, t0, path, c, p, [&](double, const CharState& s) {
        rep.standstill = std::max(rep.standstill, std::abs(s.x - xb));
      });
    }
  }
  return rep;
}

VelocityComparability velocity_comparability(double x, double xi, double t0,
                                             const SmoothPath& path, const Coefficient& c,
                                             const FlowParams& p, double alpha) {
  if (xi == 0.0)
    throw std::invalid_argument("velocity_comparability: requires xi != 0");
  VelocityComparability out;
  out.min_ratio = 1.0;
  out.max_ratio = 1.0;
  FlowParams pj = p;
  pj.with_jacobian = true;
  const SmoothPath rev = reverse(path, t0);
  const double axi = std::abs(xi);
  integrate({x, xi}, 0.0, t0, rev, c, pj, [&](double s, const CharState& st) {
    const double r = std::abs(st.xi) / axi;
    out.min_ratio = std::min(out.min_ratio, r);
    out.max_ratio = std::max(out.max_ratio, r);
    if (s > 0.0)
      out.grad_pi_fitted = std::max(
          out.grad_pi_fitted,
          std::abs(st.jac[2]) / (std::pow(s, alpha) * std::min(axi, 1.0)));
  });
  return out;
}

double flow_stability(const SmoothPath& path_a, const SmoothPath& path_b,
                      const Coefficient& c, const FlowParams& p,
                      std::span<const std::pair<double, double>> probes,
                      double r_ball, double alpha) {
  const double T = std::min(path_a.horizon(), path_b.horizon());
  HolderMetricParams hp;
  hp.alpha = alpha;
  hp.pair_grid = dyadic_pairs(T, 8);
  const Level2Path zero = stratonovich_lift(zero_path(path_a.n, T));
  for (const SmoothPath* path : {&path_a, &path_b}) {
    const double d = holder_distance(stratonovich_lift(*path), zero, hp);
    if (d > r_ball)
      throw std::invalid_argument("flow_stability: path outside the configured R ball (d_alpha = " +
                                  std::to_string(d) + ")");
  }
  FlowParams pj = p;
  pj.with_jacobian = true;
  constexpr int samples = 16;
  double dev = 0.0;
  for (const auto& [x0, xi0] : probes) {
    CharState sa{x0, xi0}, sb{x0, xi0};
    double prev = 0.0;
    for (int k = 1; k <= samples; ++k) {
      const double t = T * k / samples;
      sa = integrate(sa, prev, t, path_a, c, pj, NoObs{});
      sb = integrate(sb, prev, t, path_b, c, pj, NoObs{});
      prev = t;
      dev = std::max(dev, std::abs(sa.x - sb.x));
      dev = std::max(dev, std::abs(sa.xi - sb.xi));
      for (int i = 0; i < 4; ++i) dev = std::max(dev, std::abs(sa.jac[i] - sb.jac[i]));
    }
  }
  return dev;
}

}  // namespace rpm
