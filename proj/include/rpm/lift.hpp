// Level-2 (Stratonovich) enhancement of piecewise-linear paths and the
// alpha-Holder rough-path distance evaluated on a dyadic pair grid.
#pragma once

#include <utility>
#include <vector>

#include "rpm/path.hpp"

namespace rpm {

// A path together with its iterated integrals. Increments and areas are
// computed exactly, segment by segment, on demand.
struct Level2Path {
  SmoothPath path;

  int dimension() const { return path.n; }
  double horizon() const { return path.horizon(); }

  // z(t) - z(s).
  std::vector<double> increment(double s, double t) const;

  // n x n matrix (row-major) of int_s^t (z_r - z_s) (x) dz_r.
  std::vector<double> area(double s, double t) const;
};

Level2Path stratonovich_lift(SmoothPath p);

struct HolderMetricParams {
  double alpha = 0.45;  // restricted to (1/3, 1]: level-2 data suffices
  std::vector<std::pair<double, double>> pair_grid;
};

// All dyadic pairs (j*T/2^k, (j+1)*T/2^k) for k = 0..max_level.
std::vector<std::pair<double, double>> dyadic_pairs(double T, int max_level);

struct HolderDistance {
  double level1 = 0.0;
  double level2 = 0.0;
  double total() const { return level1 > level2 ? level1 : level2; }
};

// Grid approximation of d_alpha: the supremum over the pair grid of
// |increment difference| / |t-s|^alpha and |area difference|^{1/2} / |t-s|^alpha.
// Symmetric and zero iff the lifts agree on the grid; the level-1 part obeys
// the triangle inequality exactly. Used comparatively, never as a certified
// absolute value.
HolderDistance holder_distance_parts(const Level2Path& a, const Level2Path& b,
                                     const HolderMetricParams& params);
double holder_distance(const Level2Path& a, const Level2Path& b,
                       const HolderMetricParams& params);

}  // namespace rpm
