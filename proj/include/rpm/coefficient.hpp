// The noise coefficient A(x, xi) in R^{1 x n}: construction from a scalar
// nonlinearity and a boundary-flat basis, analytic derivative evaluators, and
// validators for the structural assumptions the flows rely on.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rpm/geometry.hpp"

namespace rpm {

// Scalar nonlinearity sigma(xi) with sigma(0) = 0; closed-form with two
// derivatives. The smoothness certification is by construction, not checked.
struct Sigma {
  std::string id;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

Sigma sigma_identity();
Sigma sigma_rational();  // xi / (1 + xi^2)
Sigma sigma_tanh();

// Spatial profile rho(x) with two derivatives; admissible profiles vanish
// together with their first derivative at both endpoints.
struct BasisFunction {
  std::string id;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
};

BasisFunction basis_sin_sq(const Domain& dom, int k);   // sin^2(k pi x^)
BasisFunction basis_poly_bump(const Domain& dom);       // x^2 (1-x)^2, normalized
BasisFunction basis_sin(const Domain& dom, int k);      // sin(k pi x^): not admissible

// Noise coefficient with analytic evaluators for A and the derivatives the
// characteristic system and its variational equations need. Immutable.
class Coefficient {
 public:
  enum class Kind { Zero, LinearXi, BasisProduct };

  static Coefficient zero(int n = 1);
  // A_j(x, xi) = direction_j * xi; constant in x, so it violates the
  // boundary assumption on purpose (free-space testing only).
  static Coefficient linear_xi(std::vector<double> direction);

  int dimension() const { return n_; }
  Kind kind() const { return kind_; }
  double smoothness_budget() const { return smoothness_budget_; }

  // All evaluators fill an n-vector.
  void a(double x, double xi, double* out) const;        // A
  void a_xi(double x, double xi, double* out) const;     // d_xi A
  void a_x(double x, double xi, double* out) const;      // d_x A  (= div_x A in 1-D)
  void a_xxi(double x, double xi, double* out) const;    // d_x d_xi A
  void a_xixi(double x, double xi, double* out) const;   // d_xi^2 A
  void a_xx(double x, double xi, double* out) const;     // d_x^2 A

  std::vector<double> a(double x, double xi) const;
  std::vector<double> a_xi(double x, double xi) const;
  std::vector<double> a_x(double x, double xi) const;
  std::vector<double> a_xxi(double x, double xi) const;

  friend Coefficient build_basis_coefficient(const Sigma& sigma,
                                             const std::vector<BasisFunction>& basis,
                                             const Domain& dom, double amplitude);

 private:
  Kind kind_ = Kind::Zero;
  int n_ = 1;
  double amplitude_ = 1.0;
  Sigma sigma_;
  std::vector<BasisFunction> basis_;
  std::vector<double> direction_;
  double smoothness_budget_ = 0.0;
};

// A(x, xi) = amplitude * sigma(xi) * [rho_1(x) | ... | rho_n(x)], the
// truncated white-noise expansion. Throws if any rho_i or rho_i' fails to
// vanish at the endpoints.
Coefficient build_basis_coefficient(const Sigma& sigma,
                                    const std::vector<BasisFunction>& basis,
                                    const Domain& dom, double amplitude = 1.0);

struct ValidationReport {
  double div_at_zero = 0.0;       // sup |d_x A(x, 0)|
  double dxi_at_boundary = 0.0;   // sup |d_xi A| on the boundary
  double dxdxi_at_boundary = 0.0; // sup |d_x d_xi A| on the boundary
  double max_violation() const;
  bool pass(double tol) const { return max_violation() <= tol; }
};

// Samples the two structural assumptions on a grid over Q x [-xi_max, xi_max]
// including the boundary points.
ValidationReport validate_assumptions(const Coefficient& c, const Domain& dom,
                                      int nx = 65, int nxi = 33, double xi_max = 4.0);

// Max over the sample points of |analytic derivative - centered difference|
// across all derivative evaluators; O(h^2) for smooth data.
double finite_difference_consistency(const Coefficient& c,
                                     std::span<const std::pair<double, double>> points,
                                     double h);

}  // namespace rpm
