// Cell-averaged scalar fields on the uniform mesh and the discrete norms
// used throughout.
#pragma once

#include <functional>
#include <vector>

#include "rpm/geometry.hpp"

namespace rpm {

// Odd extension of the m-th power: |u|^{m-1} u, with 0^[m] := 0.
double signed_power(double u, double m);

// Smooth compactly supported bump on (-1, 1) with peak value 1.
double compact_bump(double r);

struct GridFunction {
  Domain dom;
  std::vector<double> values;  // one cell average per cell
  double time = 0.0;

  GridFunction(Domain d, double fill = 0.0, double t = 0.0)
      : dom(d), values(d.cells, fill), time(t) {}
  GridFunction(Domain d, std::vector<double> v, double t = 0.0);

  double l1() const;
  double l2sq() const;
  double l2() const;
  double linf() const;
  double mass() const;  // signed cell sum times h
  double min_value() const;
  double max_value() const;
  // Discrete Lp norm, p >= 1.
  double lp(double p) const;
};

// Cell averages of f by per-cell Gauss quadrature.
GridFunction project(const Domain& dom, const std::function<double(double)>& f,
                     double time = 0.0);

double l1_diff(const GridFunction& a, const GridFunction& b);
double l2_diff(const GridFunction& a, const GridFunction& b);

// Face gradients of the field with the Dirichlet ghost convention: the ghost
// value is the odd reflection, so boundary face values are zero and the wall
// gradient is 2 v_0 / h. Returns cells+1 values.
std::vector<double> face_gradients(const GridFunction& g);

}  // namespace rpm
