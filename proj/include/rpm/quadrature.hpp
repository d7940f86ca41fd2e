#pragma once

#include <span>
#include <vector>

namespace rpm {

// Gauss-Legendre nodes and weights on [-1, 1]. Cached per order.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const QuadRule& gauss_legendre(int order);

// Integrate f over [a, b] with the given rule.
template <typename F>
double integrate(const F& f, double a, double b, const QuadRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    acc += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return acc * half;
}

// Composite rule on equal panels; use for smooth-but-not-analytic integrands
// (mollifier bumps) where a single Gauss panel converges slowly.
template <typename F>
double integrate_panels(const F& f, double a, double b, const QuadRule& rule,
                        int panels) {
  double acc = 0.0;
  for (int p = 0; p < panels; ++p)
    acc += integrate(f, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels, rule);
  return acc;
}

}  // namespace rpm
