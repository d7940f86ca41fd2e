// Driving signals: piecewise-linear paths, seeded Brownian samples, the
// dyadic coarsenings z^eps, time reversal and shifts, and CSV round-trips.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rpm {

// Piecewise-linear n-dimensional path on [0, T]. The derivative is piecewise
// constant; flows driven by the path handle segment kinks exactly.
//
// Note on reversal: the backward characteristics are driven by the reversed
// path s -> z(t0 - s). Some formulations index this as z_{t-t0}, which would
// run through negative times; the time reversal below is the reading
// consistent with the backward system, and the one implemented here.
struct SmoothPath {
  std::vector<double> times;   // strictly increasing, times.front() == 0
  std::vector<double> values;  // times.size() * n, row-major
  int n = 0;

  SmoothPath() = default;
  SmoothPath(std::vector<double> times_, std::vector<double> values_, int n_);

  int dimension() const { return n; }
  int segments() const { return static_cast<int>(times.size()) - 1; }
  double horizon() const { return times.back(); }
  double native_mesh() const;  // smallest segment length

  const double* node(int k) const { return values.data() + static_cast<std::size_t>(k) * n; }

  // Index of the segment [times[k], times[k+1]] containing t; the last
  // segment is closed on the right.
  int segment_of(double t) const;

  void eval(double t, double* out) const;
  std::vector<double> eval(double t) const;

  // Constant derivative on segment k.
  void derivative(int k, double* out) const;
};

// Brownian sample with increments of variance T/steps per coordinate;
// bit-identical for identical seeds.
SmoothPath sample_brownian(std::uint64_t seed, int n, int steps, double T);

SmoothPath zero_path(int n, double T, int steps = 1);

// Piecewise-linear interpolation of p on the coarser uniform mesh. Throws if
// mesh is below the native mesh of p.
SmoothPath coarsen(const SmoothPath& p, double mesh);

// s -> z(t0 - s) on [0, t0]. Throws if t0 is outside [0, horizon].
SmoothPath reverse(const SmoothPath& p, double t0);

// r -> z(r + s) on [0, horizon - s].
SmoothPath shift(const SmoothPath& p, double s);

// CSV serialization, header "t, z1, ..., zn"; values are written with enough
// digits to round-trip bit-exactly.
void write_csv(const SmoothPath& p, std::ostream& out);
SmoothPath read_csv(std::istream& in);

}  // namespace rpm
