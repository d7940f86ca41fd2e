#include "rpm/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rpm {

SmoothPath::SmoothPath(std::vector<double> times_, std::vector<double> values_, int n_)
    : times(std::move(times_)), values(std::move(values_)), n(n_) {
  if (n < 1) throw std::invalid_argument("SmoothPath: dimension must be >= 1");
  if (times.size() < 2) throw std::invalid_argument("SmoothPath: need at least two nodes");
  if (times.front() != 0.0) throw std::invalid_argument("SmoothPath: times must start at 0");
  if (values.size() != times.size() * static_cast<std::size_t>(n))
    throw std::invalid_argument("SmoothPath: values size mismatch");
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    if (!(times[k] < times[k + 1]))
      throw std::invalid_argument("SmoothPath: times must be strictly increasing");
}

double SmoothPath::native_mesh() const {
  double mesh = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    mesh = std::min(mesh, times[k + 1] - times[k]);
  return mesh;
}

int SmoothPath::segment_of(double t) const {
  if (t < times.front() || t > times.back() * (1.0 + 1e-12) + 1e-300)
    throw std::invalid_argument("SmoothPath: time outside [0, T]");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int k = static_cast<int>(it - times.begin()) - 1;
  return std::clamp(k, 0, segments() - 1);
}

void SmoothPath::eval(double t, double* out) const {
  const int k = segment_of(t);
  const double w = (t - times[k]) / (times[k + 1] - times[k]);
  const double* a = node(k);
  const double* b = node(k + 1);
  for (int j = 0; j < n; ++j) out[j] = a[j] + w * (b[j] - a[j]);
}

std::vector<double> SmoothPath::eval(double t) const {
  std::vector<double> out(n);
  eval(t, out.data());
  return out;
}

void SmoothPath::derivative(int k, double* out) const {
  const double dt = times[k + 1] - times[k];
  const double* a = node(k);
  const double* b = node(k + 1);
  for (int j = 0; j < n; ++j) out[j] = (b[j] - a[j]) / dt;
}

SmoothPath sample_brownian(std::uint64_t seed, int n, int steps, double T) {
  if (steps < 1) throw std::invalid_argument("sample_brownian: steps must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("sample_brownian: T must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sdt = std::sqrt(T / steps);
  std::vector<double> times(steps + 1);
  std::vector<double> values(static_cast<std::size_t>(steps + 1) * n, 0.0);
  for (int k = 0; k <= steps; ++k) times[k] = T * k / steps;
  times.back() = T;
  for (int k = 1; k <= steps; ++k)
    for (int j = 0; j < n; ++j)
      values[static_cast<std::size_t>(k) * n + j] =
          values[static_cast<std::size_t>(k - 1) * n + j] + sdt * normal(rng);
  return SmoothPath(std::move(times), std::move(values), n);
}

SmoothPath zero_path(int n, double T, int steps) {
  if (steps < 1) throw std::invalid_argument("zero_path: steps must be >= 1");
  std::vector<double> times(steps + 1);
  for (int k = 0; k <= steps; ++k) times[k] = T * k / steps;
  times.back() = T;
  return SmoothPath(std::move(times),
                    std::vector<double>(static_cast<std::size_t>(steps + 1) * n, 0.0), n);
}

SmoothPath coarsen(const SmoothPath& p, double mesh) {
  if (mesh < p.native_mesh() * (1.0 - 1e-12))
    throw std::invalid_argument("coarsen: mesh below native mesh of the path");
  const double T = p.horizon();
  std::vector<double> times;
  for (double t = 0.0; t < T - 1e-12 * T; t += mesh) times.push_back(t);
  times.push_back(T);
  std::vector<double> values(times.size() * p.n);
  for (std::size_t k = 0; k < times.size(); ++k) p.eval(times[k], values.data() + k * p.n);
  return SmoothPath(std::move(times), std::move(values), p.n);
}

SmoothPath reverse(const SmoothPath& p, double t0) {
  if (t0 < 0.0 || t0 > p.horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("reverse: t0 outside [0, T]");
  t0 = std::min(t0, p.horizon());
  if (t0 == 0.0) {
    std::vector<double> z0 = p.eval(0.0);
    std::vector<double> values;
    values.insert(values.end(), z0.begin(), z0.end());
    values.insert(values.end(), z0.begin(), z0.end());
    // Degenerate horizon: represent the constant path on a token interval.
    return SmoothPath({0.0, std::numeric_limits<double>::min()}, std::move(values), p.n);
  }
  // Nodes of the reversed path are t0 minus the original nodes in [0, t0].
  std::vector<double> times{0.0};
  for (std::size_t k = p.times.size(); k-- > 0;) {
    const double s = t0 - p.times[k];
    if (s > 1e-14 * t0 && s < t0 * (1.0 - 1e-14)) times.push_back(s);
  }
  times.push_back(t0);
  std::vector<double> values(times.size() * p.n);
  for (std::size_t k = 0; k < times.size(); ++k)
    p.eval(t0 - times[k], values.data() + k * p.n);
  return SmoothPath(std::move(times), std::move(values), p.n);
}

SmoothPath shift(const SmoothPath& p, double s) {
  if (s < 0.0 || s >= p.horizon())
    throw std::invalid_argument("shift: s outside [0, T)");
  std::vector<double> times{0.0};
  for (double t : p.times)
    if (t > s + 1e-14 && t < p.horizon() - 1e-14) times.push_back(t - s);
  times.push_back(p.horizon() - s);
  std::vector<double> values(times.size() * p.n);
  for (std::size_t k = 0; k < times.size(); ++k) p.eval(times[k] + s, values.data() + k * p.n);
  return SmoothPath(std::move(times), std::move(values), p.n);
}

void write_csv(const SmoothPath& p, std::ostream& out) {
  out << "t";
  for (int j = 0; j < p.n; ++j) out << ", z" << (j + 1);
  out << "\n";
  char buf[32];
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", p.times[k]);
    out << buf;
    for (int j = 0; j < p.n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", p.node(static_cast<int>(k))[j]);
      out << "," << buf;
    }
    out << "\n";
  }
}

SmoothPath read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  int n = -1;  // from header column count
  {
    int cols = 1;
    for (char c : line)
      if (c == ',') ++cols;
    n = cols - 1;
  }
  if (n < 1) throw std::runtime_error("read_csv: malformed header");
  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    int col = 0;
    while (std::getline(row, cell, ',')) {
      const double v = std::strtod(cell.c_str(), nullptr);
      if (col == 0)
        times.push_back(v);
      else
        values.push_back(v);
      ++col;
    }
    if (col != n + 1) throw std::runtime_error("read_csv: inconsistent column count");
  }
  return SmoothPath(std::move(times), std::move(values), n);
}

}  // namespace rpm
