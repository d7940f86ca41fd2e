#include "rpm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rpm/quadrature.hpp"

namespace rpm {

double signed_power(double u, double m) {
  if (u == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(u), m), u);
}

double compact_bump(double r) {
  const double s = 1.0 - r * r;
  return s > 0.0 ? std::exp(1.0 - 1.0 / s) : 0.0;
}

GridFunction::GridFunction(Domain d, std::vector<double> v, double t)
    : dom(d), values(std::move(v)), time(t) {
  if (static_cast<int>(values.size()) != dom.cells)
    throw std::invalid_argument("GridFunction: value count must equal cells");
}

double GridFunction::l1() const {
  double s = 0.0;
  for (double v : values) s += std::abs(v);
  return s * dom.h();
}

double GridFunction::l2sq() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s * dom.h();
}

double GridFunction::l2() const { return std::sqrt(l2sq()); }

double GridFunction::linf() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

double GridFunction::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * dom.h();
}

double GridFunction::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double GridFunction::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double GridFunction::lp(double p) const {
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), p);
  return std::pow(s * dom.h(), 1.0 / p);
}

GridFunction project(const Domain& dom, const std::function<double(double)>& f,
                     double time) {
  GridFunction g(dom, 0.0, time);
  const auto& rule = gauss_legendre(4);
  for (int i = 0; i < dom.cells; ++i)
    g.values[i] = integrate(f, dom.face(i), dom.face(i + 1), rule) / dom.h();
  return g;
}

double l1_diff(const GridFunction& a, const GridFunction& b) {
  if (a.dom.cells != b.dom.cells)
    throw std::invalid_argument("l1_diff: mesh mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dom.cells; ++i) s += std::abs(a.values[i] - b.values[i]);
  return s * a.dom.h();
}

double l2_diff(const GridFunction& a, const GridFunction& b) {
  if (a.dom.cells != b.dom.cells)
    throw std::invalid_argument("l2_diff: mesh mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dom.cells; ++i) {
    const double d = a.values[i] - b.values[i];
    s += d * d;
  }
  return std::sqrt(s * a.dom.h());
}

std::vector<double> face_gradients(const GridFunction& g) {
  const int n = g.dom.cells;
  const double h = g.dom.h();
  std::vector<double> grad(n + 1);
  grad[0] = 2.0 * g.values[0] / h;
  for (int j = 1; j < n; ++j) grad[j] = (g.values[j] - g.values[j - 1]) / h;
  grad[n] = -2.0 * g.values[n - 1] / h;
  return grad;
}

}  // namespace rpm
