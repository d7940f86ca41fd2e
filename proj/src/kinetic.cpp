#include "rpm/kinetic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rpm {

int kinetic_function(double v, double xi) {
  if (xi > 0.0 && xi < v) return 1;
  if (v < xi && xi < 0.0) return -1;
  return 0;
}

XiGrid::XiGrid(double xi_max_, int bins_) : xi_max(xi_max_), bins(bins_) {
  if (!(xi_max > 0.0)) throw std::invalid_argument("XiGrid: xi_max must be positive");
  if (bins < 2 || bins % 2 != 0)
    throw std::invalid_argument("XiGrid: bins must be even and >= 2");
}

int XiGrid::bin_of(double u) const {
  if (std::abs(u) >= xi_max)
    throw std::runtime_error("XiGrid: value " + std::to_string(u) +
                             " outside the velocity grid; enlarge xi_max");
  const int j = static_cast<int>((u + xi_max) / dxi());
  return std::min(std::max(j, 0), bins - 1);
}

KineticField KineticField::from_snapshot(const GridFunction& u, const XiGrid& grid) {
  KineticField field{u.dom, grid, {}};
  field.chi.resize(static_cast<std::size_t>(u.dom.cells) * grid.bins);
  for (int i = 0; i < u.dom.cells; ++i)
    for (int j = 0; j < grid.bins; ++j)
      field.chi[static_cast<std::size_t>(i) * grid.bins + j] =
          static_cast<std::int8_t>(kinetic_function(u.values[i], grid.center(j)));
  return field;
}

double KineticField::integral_dxi(int i) const {
  long s = 0;
  for (int j = 0; j < xi.bins; ++j) s += at(i, j);
  return s * xi.dxi();
}

DefectTally::DefectTally(XiGrid grid, int cells_, std::vector<double> edges)
    : xi(grid), cells(cells_), interval_edges(std::move(edges)) {
  if (interval_edges.size() < 2)
    throw std::invalid_argument("DefectTally: need at least one interval");
  const std::size_t total =
      static_cast<std::size_t>(intervals()) * cells * xi.bins;
  p.assign(total, 0.0);
  q.assign(total, 0.0);
}

double DefectTally::p_total() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

double DefectTally::q_total() const {
  double s = 0.0;
  for (double v : q) s += v;
  return s;
}

DefectTally defect_tally(const Trajectory& traj, const XiGrid& grid) {
  if (traj.step_tallies.empty())
    throw std::invalid_argument("defect_tally: trajectory has no step tallies");
  std::vector<double> edges;
  for (const GridFunction& g : traj.snapshots) edges.push_back(g.time);
  const int cells = traj.snapshots.front().dom.cells;
  DefectTally tally(grid, cells, edges);
  int k = 0;
  for (const StepTally& st : traj.step_tallies) {
    const double mid = 0.5 * (st.t0 + st.t1);
    while (k + 1 < tally.intervals() && mid > tally.interval_edges[k + 1]) ++k;
    for (int i = 0; i < cells; ++i) {
      const int j = grid.bin_of(st.u[i]);
      tally.q[tally.index(k, i, j)] += st.q_energy[i];
      tally.p[tally.index(k, i, j)] += st.p_energy[i];
    }
  }
  return tally;
}

double singular_moment(const DefectTally& tally, double delta) {
  if (tally.empty()) throw std::invalid_argument("singular_moment: empty tally");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("singular_moment: delta must lie in (0, 1]");
  double s = 0.0;
  for (int k = 0; k < tally.intervals(); ++k)
    for (int i = 0; i < tally.cells; ++i)
      for (int j = 0; j < tally.xi.bins; ++j) {
        const std::size_t idx = tally.index(k, i, j);
        const double mass = tally.p[idx] + tally.q[idx];
        if (mass != 0.0)
          s += std::pow(std::abs(tally.xi.center(j)), delta - 1.0) * mass;
      }
  return delta * s;
}

TestFunction bump_test_function(double xc, double xw, double xic, double xiw) {
  std::ostringstream id;
  id << "bump(x:" << xc << "+-" << xw << ", xi:" << xic << "+-" << xiw << ")";
  return {id.str(), [=](double x, double xi) {
            return compact_bump((x - xc) / xw) * compact_bump((xi - xic) / xiw);
          }};
}

double weak_form_residual(const Trajectory& traj, const DefectTally& tally,
                          const TestFunction& rho, double t0, double t1,
                          const SmoothPath& path, const Coefficient& c,
                          const FlowParams& fp, const SolverParams& sp) {
  if (!(t0 < t1)) throw std::invalid_argument("weak_form_residual: requires t0 < t1");
  // Snapshot times inside the window; t0 and t1 must be among them.
  std::vector<const GridFunction*> snaps;
  for (const GridFunction& g : traj.snapshots)
    if (g.time > t0 - 1e-12 && g.time < t1 + 1e-12) snaps.push_back(&g);
  if (snaps.empty() || std::abs(snaps.front()->time - t0) > 1e-10 ||
      std::abs(snaps.back()->time - t1) > 1e-10)
    throw std::invalid_argument("weak_form_residual: t0, t1 must be recorded times");

  const Domain dom = snaps.front()->dom;
  const int nx = dom.cells;
  const int nxi = tally.xi.bins;
  const double h = dom.h();
  const double dxi = tally.xi.dxi();
  const int nt = static_cast<int>(snaps.size());

  // Transported test function on the full (x, xi) grid at every snapshot
  // time, each node flowed backward individually (no interpolation).
  std::vector<std::vector<double>> rho_t(nt);
  std::vector<std::vector<double>> dxi_rho(nt);
  std::vector<std::vector<double>> lap_rho(nt);
  std::vector<CharState> states(static_cast<std::size_t>(nx) * nxi);
  for (int k = 0; k < nt; ++k) {
    const double r = snaps[k]->time;
    std::vector<double>& field = rho_t[k];
    field.assign(static_cast<std::size_t>(nx) * nxi, 0.0);
    if (k == 0) {
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nxi; ++j)
          field[static_cast<std::size_t>(i) * nxi + j] =
              rho.rho0(dom.center(i), tally.xi.center(j));
    } else {
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nxi; ++j)
          states[static_cast<std::size_t>(i) * nxi + j] =
              CharState{dom.center(i), tally.xi.center(j)};
      const SmoothPath rev = reverse(path, r);
      FlowParams fq = fp;
      fq.with_jacobian = false;
      forward_flow_batch(states, 0.0, r - t0, rev, c, fq);
      for (std::size_t idx = 0; idx < states.size(); ++idx)
        field[idx] = rho.rho0(states[idx].x, states[idx].xi);
    }
    // The transported support must stay away from the boundary cells; the
    // derivative stencils below rely on it (ghost value zero).
    for (int j = 0; j < nxi; ++j)
      for (int i : {0, 1, nx - 2, nx - 1})
        if (field[static_cast<std::size_t>(i) * nxi + j] != 0.0)
          throw std::runtime_error(
              "weak_form_residual: transported test function touches the boundary cells");
    for (int i = 0; i < nx; ++i)
      for (int j : {0, 1, nxi - 2, nxi - 1})
        if (field[static_cast<std::size_t>(i) * nxi + j] != 0.0)
          throw std::runtime_error(
              "weak_form_residual: transported test function leaves the velocity grid");

    std::vector<double>& lap = lap_rho[k];
    std::vector<double>& dxr = dxi_rho[k];
    lap.assign(field.size(), 0.0);
    dxr.assign(field.size(), 0.0);
    auto at = [&](int i, int j) -> double {
      if (i < 0 || i >= nx || j < 0 || j >= nxi) return 0.0;
      return field[static_cast<std::size_t>(i) * nxi + j];
    };
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nxi; ++j) {
        lap[static_cast<std::size_t>(i) * nxi + j] =
            (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (h * h);
        dxr[static_cast<std::size_t>(i) * nxi + j] =
            (at(i, j + 1) - at(i, j - 1)) / (2.0 * dxi);
      }
  }

  // chi against the fields. In xi the kinetic profile is integrated exactly:
  // the signed overlap of each bin with (0, u) replaces a midpoint rule whose
  // error would oscillate with the offset of u within its bin.
  auto chi_weight = [&](double u, int j) {
    const double lo = tally.xi.center(j) - 0.5 * dxi;
    const double hi = lo + dxi;
    if (u > 0.0) return std::max(0.0, std::min(hi, u) - std::max(lo, 0.0));
    if (u < 0.0) return -std::max(0.0, std::min(hi, 0.0) - std::max(lo, u));
    return 0.0;
  };
  auto bracket = [&](int k) {
    const GridFunction& u = *snaps[k];
    double s = 0.0;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nxi; ++j) {
        const double w = chi_weight(u.values[i], j);
        if (w != 0.0) s += w * rho_t[k][static_cast<std::size_t>(i) * nxi + j];
      }
    return s * h;
  };
  auto diffusion_term = [&](int k) {
    const GridFunction& u = *snaps[k];
    double s = 0.0;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nxi; ++j) {
        const double w = chi_weight(u.values[i], j);
        if (w != 0.0) {
          const double weight =
              sp.m * std::pow(std::abs(tally.xi.center(j)), sp.m - 1.0) + sp.eta;
          s += weight * w * lap_rho[k][static_cast<std::size_t>(i) * nxi + j];
        }
      }
    return s * h;
  };

  // Left-endpoint rule in time throughout: the residual contract is first
  // order under joint refinement, and the rectangle rule keeps that leading
  // error smooth instead of leaving phase jitter from the bin deposition as
  // the dominant term.
  const double lhs = bracket(nt - 1) - bracket(0);
  double term_diff = 0.0;
  for (int k = 0; k + 1 < nt; ++k)
    term_diff += diffusion_term(k) * (snaps[k + 1]->time - snaps[k]->time);

  // Tally intervals within the window, matching snapshot intervals by time.
  double term_defect = 0.0;
  for (int kk = 0; kk < tally.intervals(); ++kk) {
    const double a = tally.interval_edges[kk], b = tally.interval_edges[kk + 1];
    if (a < t0 - 1e-12 || b > t1 + 1e-12) continue;
    int k = -1;
    for (int s = 0; s + 1 < nt; ++s)
      if (std::abs(snaps[s]->time - a) < 1e-10) k = s;
    if (k < 0)
      throw std::runtime_error("weak_form_residual: tally intervals do not match snapshots");
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nxi; ++j) {
        const std::size_t idx = tally.index(kk, i, j);
        const double mass = tally.p[idx] + tally.q[idx];
        if (mass != 0.0)
          term_defect += mass * dxi_rho[k][static_cast<std::size_t>(i) * nxi + j];
      }
  }

  return std::abs(lhs - term_diff + term_defect);
}

SobolevReport sobolev_diagnostics(const Trajectory& traj, const SolverParams& sp) {
  SobolevReport rep;
  rep.p_m = std::min((sp.m + 1.0) / sp.m, 2.0);
  const double mhalf = 0.5 * (sp.m + 1.0);
  std::vector<double> wnorm_pm;  // W^{1,p_m} norm of u^[m] per snapshot
  for (const GridFunction& u : traj.snapshots) {
    const int n = u.dom.cells;
    const double h = u.dom.h();
    GridFunction whalf(u.dom), wm(u.dom);
    double num = 0.0;
    for (int i = 0; i < n; ++i) {
      num += std::pow(std::abs(u.values[i]), sp.m + 1.0);
      whalf.values[i] = signed_power(u.values[i], mhalf);
      wm.values[i] = signed_power(u.values[i], sp.m);
    }
    num *= h;
    double den = 0.0;
    for (double g : face_gradients(whalf)) den += g * g;
    den *= h;
    rep.poincare_ratio_max = std::max(rep.poincare_ratio_max, den > 0.0 ? num / den : 0.0);
    double gsum = 0.0;
    for (double g : face_gradients(wm)) gsum += std::pow(std::abs(g), rep.p_m);
    wnorm_pm.push_back(wm.lp(rep.p_m) + std::pow(gsum * h, 1.0 / rep.p_m));
  }
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < traj.snapshots.size(); ++k)
    acc += 0.5 *
           (std::pow(wnorm_pm[k], rep.p_m) + std::pow(wnorm_pm[k + 1], rep.p_m)) *
           (traj.snapshots[k + 1].time - traj.snapshots[k].time);
  rep.sobolev_pm_norm = std::pow(acc, 1.0 / rep.p_m);
  return rep;
}

std::string kinetic_report_json(const DefectTally& tally,
                                const std::vector<double>& deltas,
                                const SobolevReport& sobolev,
                                const std::vector<WeakResidualEntry>& residuals) {
  nlohmann::json j;
  j["q_total"] = tally.q_total();
  j["p_total"] = tally.p_total();
  nlohmann::json moments = nlohmann::json::object();
  for (double d : deltas) {
    std::ostringstream key;
    key << d;
    moments[key.str()] = singular_moment(tally, d);
  }
  j["singular_moments"] = moments;
  j["poincare_ratio_max"] = sobolev.poincare_ratio_max;
  j["sobolev_pm_norm"] = sobolev.sobolev_pm_norm;
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : residuals)
    rs.push_back({{"rho_id", r.rho_id}, {"t0", r.t0}, {"t1", r.t1}, {"value", r.value}});
  j["weak_residuals"] = rs;
  return j.dump(2);
}

}  // namespace rpm
