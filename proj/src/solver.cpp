#include "rpm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace rpm {

namespace {

// Tridiagonal solve, rhs overwritten with the solution.
void thomas(std::vector<double>& dl, std::vector<double>& dd, std::vector<double>& du,
            std::vector<double>& rhs) {
  const int n = static_cast<int>(dd.size());
  for (int i = 1; i < n; ++i) {
    const double w = dl[i] / dd[i - 1];
    dd[i] -= w * du[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= dd[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - du[i] * rhs[i + 1]) / dd[i];
}

double w_of(double v, double m, double eta) { return signed_power(v, m) + eta * v; }

double norm_inf(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Implicit diffusion update v - dt * Lap(w(v)) = ustar, w(v) = v^[m] + eta v,
// with the odd-ghost Dirichlet closure (wall face value 0, wall gradient
// 2 w_0 / h). Damped Newton; the unknown depends on the regime:
//   m >= 1: Newton in v, slope m|v|^{m-1} + eta	(bounded).
//   m <  1: Newton in a = v^[m], so v = a^[1/m] and w = a + eta a^[1/m];
//           every exponent is >= 1 and the linearization stays bounded where
//           the porous-medium slope would blow up. theta_reg floors the
//           diagonal so the tridiagonal solve stays strictly dominant.
std::vector<double> diffusion_solve(const std::vector<double>& ustar, double lam,
                                    const SolverParams& params, double t) {
  const int n = static_cast<int>(ustar.size());
  const double m = params.m;
  const double eta = params.eta;
  const bool in_v = m >= 1.0;
  const double pinv = 1.0 / m;

  // unknown y; v(y) and w(y) per regime
  auto v_of_y = [&](double y) { return in_v ? y : signed_power(y, pinv); };
  auto w_of_y = [&](double y) {
    return in_v ? w_of(y, m, eta) : y + eta * signed_power(y, pinv);
  };
  // d v / d y and d w / d y
  auto dv_of_y = [&](double y) {
    return in_v ? 1.0 : pinv * std::pow(std::abs(y), pinv - 1.0);
  };
  auto dw_of_y = [&](double y) {
    return in_v ? m * std::pow(std::abs(y), m - 1.0) + eta
                : 1.0 + eta * pinv * std::pow(std::abs(y), pinv - 1.0);
  };

  std::vector<double> y(n), w(n), r(n), dl(n), dd(n), du(n), delta(n), ytrial(n),
      wtrial(n), rtrial(n);
  for (int i = 0; i < n; ++i) y[i] = in_v ? ustar[i] : signed_power(ustar[i], m);

  auto residual = [&](const std::vector<double>& yy, std::vector<double>& ww,
                      std::vector<double>& rr) {
    for (int i = 0; i < n; ++i) ww[i] = w_of_y(yy[i]);
    for (int i = 0; i < n; ++i) {
      const double wl = (i == 0) ? -ww[0] : ww[i - 1];
      const double wr = (i == n - 1) ? -ww[n - 1] : ww[i + 1];
      rr[i] = v_of_y(yy[i]) - ustar[i] - lam * (wr - 2.0 * ww[i] + wl);
    }
  };

  residual(y, w, r);
  double rn = norm_inf(r);
  const double tol = 1e-13 * std::max(1.0, norm_inf(ustar));
  int iter = 0;
  while (rn > tol) {
    if (++iter > 80)
      throw std::runtime_error("step: inner diffusion solve did not converge at t = " +
                               std::to_string(t));
    for (int i = 0; i < n; ++i) {
      const double cdiag = (i == 0 || i == n - 1) ? 3.0 : 2.0;
      dd[i] = std::max(dv_of_y(y[i]), in_v ? 0.0 : params.theta_reg) +
              lam * cdiag * dw_of_y(y[i]);
      dl[i] = (i > 0) ? -lam * dw_of_y(y[i - 1]) : 0.0;
      du[i] = (i < n - 1) ? -lam * dw_of_y(y[i + 1]) : 0.0;
    }
    delta = r;
    for (double& d : delta) d = -d;
    thomas(dl, dd, du, delta);
    double lambda = 1.0;
    for (;;) {
      for (int i = 0; i < n; ++i) ytrial[i] = y[i] + lambda * delta[i];
      residual(ytrial, wtrial, rtrial);
      const double rt = norm_inf(rtrial);
      if (rt < rn || lambda < 1.0 / 1024.0) {
        y.swap(ytrial);
        w.swap(wtrial);
        r.swap(rtrial);
        rn = rt;
        break;
      }
      lambda *= 0.5;
    }
  }
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = v_of_y(y[i]);
  return v;
}

struct StepAccounting {
  double boundary_flux_abs = 0.0;  // |wall flux| dt, both walls, all terms
};

GridFunction step_impl(const GridFunction& u, double t, double dt_step,
                       const SolverParams& params, const SmoothPath& path,
                       const Coefficient& c, StepAccounting* acc) {
  const int n = u.dom.cells;
  const double h = u.dom.h();
  const int seg = path.segment_of(t + 0.5 * dt_step);
  if (path.times[seg] > t + 1e-12 || path.times[seg + 1] < t + dt_step - 1e-12)
    throw std::invalid_argument("step: interval straddles a path kink");
  std::vector<double> zdot(path.n);
  path.derivative(seg, zdot.data());

  // Explicit transport. Face flux A(x_f, u_f) . zdot with the donor cell
  // picked by the sign of the characteristic velocity -d_xi A . zdot.
  std::vector<double> flux(n + 1, 0.0);
  std::vector<double> buf(c.dimension());
  double max_speed = 0.0;
  auto dot_z = [&](const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * zdot[j];
    return s;
  };
  for (int j = 0; j <= n; ++j) {
    const double xf = u.dom.face(j);
    const double ul = (j == 0) ? 0.0 : u.values[j - 1];
    const double ur = (j == n) ? 0.0 : u.values[j];
    const double umid = 0.5 * (ul + ur);
    c.a_xi(xf, umid, buf.data());
    const double speed = -dot_z(buf);
    max_speed = std::max(max_speed, std::abs(speed));
    double uf;
    if (j == 0 || j == n)
      uf = 0.0;  // Dirichlet face value
    else if (params.flux == FluxScheme::Central)
      uf = umid;
    else
      uf = (speed >= 0.0) ? ul : ur;
    c.a(xf, uf, buf.data());
    flux[j] = dot_z(buf);
  }
  if (dt_step * max_speed / h > params.cfl_guard)
    throw std::runtime_error("step: transport CFL guard violated at t = " +
                             std::to_string(t) + " (speed " + std::to_string(max_speed) + ")");
  std::vector<double> ustar(n);
  for (int i = 0; i < n; ++i)
    ustar[i] = u.values[i] + dt_step / h * (flux[i + 1] - flux[i]);

  // Implicit diffusion by damped Newton on the face-difference form.
  const double lam = dt_step / (h * h);
  std::vector<double> v = diffusion_solve(ustar, lam, params, t);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = w_of(v[i], params.m, params.eta);

  if (acc) {
    // Wall fluxes at the end-of-step state: diffusive 2 w / h plus the
    // (identically zero for admissible A) transport contribution.
    const double dlo = 2.0 * w[0] / h;
    const double dhi = 2.0 * w[n - 1] / h;
    acc->boundary_flux_abs =
        (std::abs(dlo) + std::abs(dhi) + std::abs(flux[0]) + std::abs(flux[n])) * dt_step;
  }

  GridFunction out(u.dom, std::move(v), t + dt_step);
  for (double x : out.values)
    if (!std::isfinite(x))
      throw std::runtime_error("step: non-finite state at t = " + std::to_string(t));
  return out;
}

}  // namespace

GridFunction step(const GridFunction& u, double t, double dt_step,
                  const SolverParams& params, const SmoothPath& path,
                  const Coefficient& c) {
  return step_impl(u, t, dt_step, params, path, c, nullptr);
}

const GridFunction& Trajectory::at_time(double t) const {
  for (const GridFunction& g : snapshots)
    if (std::abs(g.time - t) <= 1e-10 * std::max(1.0, std::abs(t))) return g;
  throw std::invalid_argument("Trajectory::at_time: no snapshot at t = " + std::to_string(t));
}

Trajectory solve(const GridFunction& u0, double T, const SolverParams& params,
                 const SmoothPath& path, const Coefficient& c,
                 const RecordPolicy& record) {
  const double t_start = u0.time;
  if (T < t_start) throw std::invalid_argument("solve: T must be >= start time");
  if (T > path.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("solve: horizon exceeds the driving path");

  Trajectory traj;
  traj.m = params.m;
  traj.eta = params.eta;
  traj.snapshots.push_back(u0);
  traj.sup_l2_sq = u0.l2sq();
  traj.min_cell = u0.min_value();
  if (T == t_start) return traj;

  // Step schedule: the dt grid anchored at the start time, the path kinks
  // and the record times. Anchoring at t_start keeps the discretization
  // time-homogeneous, so a run started at s under z and a run started at 0
  // under the shifted driver see identical step sequences.
  const double tol = 1e-12 * std::max(1.0, T);
  std::set<double> sched{t_start, T};
  for (long j = 1; t_start + j * params.dt < T - tol; ++j)
    sched.insert(t_start + j * params.dt);
  for (double tk : path.times)
    if (tk > t_start + tol && tk < T - tol) sched.insert(tk);
  for (double tr : record.times)
    if (tr > t_start + tol && tr < T - tol) sched.insert(tr);
  std::vector<double> times(sched.begin(), sched.end());
  // Merge near-duplicates so no step degenerates to round-off length.
  std::vector<double> clean{times.front()};
  for (double t : times)
    if (t - clean.back() > tol) clean.push_back(t);
  clean.back() = T;

  std::set<double> record_set(record.times.begin(), record.times.end());
  auto is_recorded = [&](double t) {
    auto it = record_set.lower_bound(t - tol);
    return it != record_set.end() && std::abs(*it - t) <= tol;
  };

  const double prefactor = 4.0 * params.m / ((params.m + 1.0) * (params.m + 1.0));
  const double mhalf = 0.5 * (params.m + 1.0);
  const int n = u0.dom.cells;
  const double h = u0.dom.h();
  GridFunction u = u0;
  for (std::size_t k = 0; k + 1 < clean.size(); ++k) {
    const double t = clean[k];
    const double dt_step = clean[k + 1] - t;
    StepAccounting acc;
    u = step_impl(u, t, dt_step, params, path, c, &acc);

    traj.sup_l2_sq = std::max(traj.sup_l2_sq, u.l2sq());
    traj.min_cell = std::min(traj.min_cell, u.min_value());
    traj.boundary_flux_abs += acc.boundary_flux_abs;

    GridFunction whalf(u.dom, 0.0, u.time);
    for (int i = 0; i < n; ++i) whalf.values[i] = signed_power(u.values[i], mhalf);
    const std::vector<double> gw = face_gradients(whalf);
    const std::vector<double> gu = face_gradients(u);
    double gw2 = 0.0, gu2 = 0.0;
    for (double g : gw) gw2 += g * g;
    for (double g : gu) gu2 += g * g;
    traj.grad_w_sq_dt += gw2 * h * dt_step;
    traj.eta_grad_u_sq_dt += params.eta * gu2 * h * dt_step;

    if (!traj.first_contact_time &&
        (std::abs(u.values[0]) > record.support_threshold ||
         std::abs(u.values[n - 1]) > record.support_threshold))
      traj.first_contact_time = u.time;
    if (traj.first_contact_time) traj.post_contact_flux_abs += acc.boundary_flux_abs;

    if (record.with_step_tallies) {
      StepTally tally;
      tally.t0 = t;
      tally.t1 = u.time;
      tally.u = u.values;
      tally.q_energy.assign(n, 0.0);
      tally.p_energy.assign(n, 0.0);
      // Split each face energy between the adjacent cells; wall faces belong
      // to the single adjacent cell. Cell sums then match the face sums.
      for (int j = 0; j <= n; ++j) {
        const double eq = prefactor * gw[j] * gw[j] * h * dt_step;
        const double ep = params.eta * gu[j] * gu[j] * h * dt_step;
        if (j == 0) {
          tally.q_energy[0] += eq;
          tally.p_energy[0] += ep;
        } else if (j == n) {
          tally.q_energy[n - 1] += eq;
          tally.p_energy[n - 1] += ep;
        } else {
          tally.q_energy[j - 1] += 0.5 * eq;
          tally.q_energy[j] += 0.5 * eq;
          tally.p_energy[j - 1] += 0.5 * ep;
          tally.p_energy[j] += 0.5 * ep;
        }
      }
      traj.step_tallies.push_back(std::move(tally));
    }

    if (is_recorded(u.time) || k + 2 == clean.size()) traj.snapshots.push_back(u);
  }
  return traj;
}

StabilityReport stability_report(const Trajectory& traj) {
  StabilityReport rep;
  rep.sup_l2_sq = traj.sup_l2_sq;
  rep.grad_w_sq_dt = traj.grad_w_sq_dt;
  rep.eta_grad_u_sq_dt = traj.eta_grad_u_sq_dt;
  return rep;
}

}  // namespace rpm
