#include "rpm/lift.hpp"

#include <cmath>
#include <stdexcept>

namespace rpm {

std::vector<double> Level2Path::increment(double s, double t) const {
  std::vector<double> zs = path.eval(s);
  std::vector<double> zt = path.eval(t);
  for (int j = 0; j < path.n; ++j) zt[j] -= zs[j];
  return zt;
}

std::vector<double> Level2Path::area(double s, double t) const {
  const int n = path.n;
  std::vector<double> A(static_cast<std::size_t>(n) * n, 0.0);
  if (!(t > s)) {
    if (t == s) return A;
    throw std::invalid_argument("Level2Path::area: requires s <= t");
  }
  const std::vector<double> zs = path.eval(s);
  std::vector<double> za(n), v(n);
  const int k0 = path.segment_of(s);
  const int k1 = path.segment_of(t);
  // On a linear piece [a,b] with slope v: the integrand is
  // (z(a) - z(s) + v (r-a)) (x) v, which integrates exactly.
  for (int k = k0; k <= k1; ++k) {
    const double a = std::max(s, path.times[k]);
    const double b = std::min(t, path.times[k + 1]);
    if (!(b > a)) continue;
    path.eval(a, za.data());
    path.derivative(k, v.data());
    const double len = b - a;
    for (int i = 0; i < n; ++i) {
      const double base = za[i] - zs[i];
      for (int j = 0; j < n; ++j)
        A[static_cast<std::size_t>(i) * n + j] +=
            (base * len + 0.5 * v[i] * len * len) * v[j];
    }
  }
  return A;
}

Level2Path stratonovich_lift(SmoothPath p) { return Level2Path{std::move(p)}; }

std::vector<std::pair<double, double>> dyadic_pairs(double T, int max_level) {
  std::vector<std::pair<double, double>> pairs;
  for (int k = 0; k <= max_level; ++k) {
    const int windows = 1 << k;
    const double len = T / windows;
    for (int j = 0; j < windows; ++j) pairs.emplace_back(j * len, (j + 1) * len);
  }
  return pairs;
}

HolderDistance holder_distance_parts(const Level2Path& a, const Level2Path& b,
                                     const HolderMetricParams& params) {
  if (!(params.alpha > 1.0 / 3.0 && params.alpha <= 1.0))
    throw std::invalid_argument(
        "holder_distance: alpha must lie in (1/3, 1], where level-2 data suffices");
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("holder_distance: dimension mismatch");
  if (std::abs(a.horizon() - b.horizon()) > 1e-12 * std::max(a.horizon(), b.horizon()))
    throw std::invalid_argument("holder_distance: horizon mismatch");
  const int n = a.dimension();
  HolderDistance d;
  for (const auto& [s, t] : params.pair_grid) {
    const double scale = std::pow(t - s, params.alpha);
    const std::vector<double> ia = a.increment(s, t);
    const std::vector<double> ib = b.increment(s, t);
    double inc2 = 0.0;
    for (int j = 0; j < n; ++j) inc2 += (ia[j] - ib[j]) * (ia[j] - ib[j]);
    d.level1 = std::max(d.level1, std::sqrt(inc2) / scale);
    const std::vector<double> Aa = a.area(s, t);
    const std::vector<double> Ab = b.area(s, t);
    double ar2 = 0.0;
    for (std::size_t k = 0; k < Aa.size(); ++k) ar2 += (Aa[k] - Ab[k]) * (Aa[k] - Ab[k]);
    d.level2 = std::max(d.level2, std::sqrt(std::sqrt(ar2)) / scale);
  }
  return d;
}

double holder_distance(const Level2Path& a, const Level2Path& b,
                       const HolderMetricParams& params) {
  return holder_distance_parts(a, b, params).total();
}

}  // namespace rpm
