#include "rpm/coefficient.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rpm {

Sigma sigma_identity() {
  return {"identity", [](double xi) { return xi; }, [](double) { return 1.0; },
          [](double) { return 0.0; }};
}

Sigma sigma_rational() {
  return {"rational",
          [](double xi) { return xi / (1.0 + xi * xi); },
          [](double xi) {
            const double d = 1.0 + xi * xi;
            return (1.0 - xi * xi) / (d * d);
          },
          [](double xi) {
            const double d = 1.0 + xi * xi;
            return 2.0 * xi * (xi * xi - 3.0) / (d * d * d);
          }};
}

Sigma sigma_tanh() {
  return {"tanh", [](double xi) { return std::tanh(xi); },
          [](double xi) {
            const double c = std::cosh(xi);
            return 1.0 / (c * c);
          },
          [](double xi) {
            const double t = std::tanh(xi);
            const double c = std::cosh(xi);
            return -2.0 * t / (c * c);
          }};
}

BasisFunction basis_sin_sq(const Domain& dom, int k) {
  const double w = k * std::numbers::pi / dom.width();
  const double lo = dom.lo;
  return {"sinsq:" + std::to_string(k),
          [w, lo](double x) { const double s = std::sin(w * (x - lo)); return s * s; },
          [w, lo](double x) { return w * std::sin(2.0 * w * (x - lo)); },
          [w, lo](double x) { return 2.0 * w * w * std::cos(2.0 * w * (x - lo)); }};
}

BasisFunction basis_poly_bump(const Domain& dom) {
  const double lo = dom.lo, hi = dom.hi;
  const double half = dom.width() / 2.0;
  const double scale = 1.0 / (half * half * half * half);  // peak value 1
  return {"poly",
          [=](double x) {
            const double a = x - lo, b = hi - x;
            return scale * a * a * b * b;
          },
          [=](double x) {
            const double a = x - lo, b = hi - x;
            return scale * 2.0 * a * b * (b - a);
          },
          [=](double x) {
            const double a = x - lo, b = hi - x;
            return scale * 2.0 * (a * a - 4.0 * a * b + b * b);
          }};
}

BasisFunction basis_sin(const Domain& dom, int k) {
  const double w = k * std::numbers::pi / dom.width();
  const double lo = dom.lo;
  return {"sin:" + std::to_string(k),
          [w, lo](double x) { return std::sin(w * (x - lo)); },
          [w, lo](double x) { return w * std::cos(w * (x - lo)); },
          [w, lo](double x) { return -w * w * std::sin(w * (x - lo)); }};
}

Coefficient Coefficient::zero(int n) {
  Coefficient c;
  c.kind_ = Kind::Zero;
  c.n_ = n;
  c.smoothness_budget_ = 0.0;
  return c;
}

Coefficient Coefficient::linear_xi(std::vector<double> direction) {
  if (direction.empty())
    throw std::invalid_argument("Coefficient::linear_xi: empty direction");
  Coefficient c;
  c.kind_ = Kind::LinearXi;
  c.n_ = static_cast<int>(direction.size());
  c.direction_ = std::move(direction);
  c.smoothness_budget_ = 0.0;
  for (double d : c.direction_) c.smoothness_budget_ = std::max(c.smoothness_budget_, std::abs(d));
  return c;
}

Coefficient build_basis_coefficient(const Sigma& sigma,
                                    const std::vector<BasisFunction>& basis,
                                    const Domain& dom, double amplitude) {
  if (basis.empty())
    throw std::invalid_argument("build_basis_coefficient: empty basis");
  constexpr double boundary_tol = 1e-12;
  for (const auto& rho : basis) {
    for (double xb : {dom.lo, dom.hi}) {
      if (std::abs(rho.f(xb)) > boundary_tol)
        throw std::invalid_argument("build_basis_coefficient: basis function '" + rho.id +
                                    "' has nonzero boundary value");
      if (std::abs(rho.df(xb)) > boundary_tol)
        throw std::invalid_argument("build_basis_coefficient: basis function '" + rho.id +
                                    "' has nonzero boundary derivative");
    }
  }
  if (std::abs(sigma.f(0.0)) > boundary_tol)
    throw std::invalid_argument("build_basis_coefficient: sigma(0) must vanish");

  Coefficient c;
  c.kind_ = Coefficient::Kind::BasisProduct;
  c.n_ = static_cast<int>(basis.size());
  c.amplitude_ = amplitude;
  c.sigma_ = sigma;
  c.basis_ = basis;

  // Declared smoothness budget: coarse sup of every evaluator magnitude over
  // a sample grid. Feeds only constant-fitting diagnostics.
  double budget = 0.0;
  for (int i = 0; i <= 32; ++i) {
    const double x = dom.lo + dom.width() * i / 32.0;
    for (const auto& rho : c.basis_)
      for (double v : {rho.f(x), rho.df(x), rho.d2f(x)})
        budget = std::max(budget, std::abs(v));
  }
  for (int j = -16; j <= 16; ++j) {
    const double xi = j / 4.0;
    for (double v : {sigma.f(xi), sigma.df(xi), sigma.d2f(xi)})
      budget = std::max(budget, std::abs(v));
  }
  c.smoothness_budget_ = std::abs(amplitude) * std::max(1.0, budget);
  return c;
}

// Evaluators for the basis-product kind assemble by the product rule from
// A_j = amp * sigma(xi) * rho_j(x).
void Coefficient::a(double x, double xi, double* out) const {
  switch (kind_) {
    case Kind::Zero:
      for (int j = 0; j < n_; ++j) out[j] = 0.0;
      return;
    case Kind::LinearXi:
      for (int j = 0; j < n_; ++j) out[j] = direction_[j] * xi;
      return;
    case Kind::BasisProduct: {
      const double s = amplitude_ * sigma_.f(xi);
      for (int j = 0; j < n_; ++j) out[j] = s * basis_[j].f(x);
      return;
    }
  }
}

void Coefficient::a_xi(double x, double xi, double* out) const {
  switch (kind_) {
    case Kind::Zero:
      for (int j = 0; j < n_; ++j) out[j] = 0.0;
      return;
    case Kind::LinearXi:
      for (int j = 0; j < n_; ++j) out[j] = direction_[j];
      return;
    case Kind::BasisProduct: {
      const double s = amplitude_ * sigma_.df(xi);
      for (int j = 0; j < n_; ++j) out[j] = s * basis_[j].f(x);
      return;
    }
  }
}

void Coefficient::a_x(double x, double xi, double* out) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::LinearXi:
      for (int j = 0; j < n_; ++j) out[j] = 0.0;
      return;
    case Kind::BasisProduct: {
      const double s = amplitude_ * sigma_.f(xi);
      for (int j = 0; j < n_; ++j) out[j] = s * basis_[j].df(x);
      return;
    }
  }
}

void Coefficient::a_xxi(double x, double xi, double* out) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::LinearXi:
      for (int j = 0; j < n_; ++j) out[j] = 0.0;
      return;
    case Kind::BasisProduct: {
      const double s = amplitude_ * sigma_.df(xi);
      for (int j = 0; j < n_; ++j) out[j] = s * basis_[j].df(x);
      return;
    }
  }
}

void Coefficient::a_xixi(double x, double xi, double* out) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::LinearXi:
      for (int j = 0; j < n_; ++j) out[j] = 0.0;
      return;
    case Kind::BasisProduct: {
      const double s = amplitude_ * sigma_.d2f(xi);
      for (int j = 0; j < n_; ++j) out[j] = s * basis_[j].f(x);
      return;
    }
  }
}

void Coefficient::a_xx(double x, double xi, double* out) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::LinearXi:
      for (int j = 0; j < n_; ++j) out[j] = 0.0;
      return;
    case Kind::BasisProduct: {
      const double s = amplitude_ * sigma_.f(xi);
      for (int j = 0; j < n_; ++j) out[j] = s * basis_[j].d2f(x);
      return;
    }
  }
}

std::vector<double> Coefficient::a(double x, double xi) const {
  std::vector<double> out(n_);
  a(x, xi, out.data());
  return out;
}
std::vector<double> Coefficient::a_xi(double x, double xi) const {
  std::vector<double> out(n_);
  a_xi(x, xi, out.data());
  return out;
}
std::vector<double> Coefficient::a_x(double x, double xi) const {
  std::vector<double> out(n_);
  a_x(x, xi, out.data());
  return out;
}
std::vector<double> Coefficient::a_xxi(double x, double xi) const {
  std::vector<double> out(n_);
  a_xxi(x, xi, out.data());
  return out;
}

double ValidationReport::max_violation() const {
  return std::max(div_at_zero, std::max(dxi_at_boundary, dxdxi_at_boundary));
}

ValidationReport validate_assumptions(const Coefficient& c, const Domain& dom,
                                      int nx, int nxi, double xi_max) {
  ValidationReport rep;
  std::vector<double> buf(c.dimension());
  auto maxabs = [&](double cur) {
    double v = cur;
    for (double b : buf) v = std::max(v, std::abs(b));
    return v;
  };
  for (int i = 0; i < nx; ++i) {
    const double x = dom.lo + dom.width() * i / (nx - 1);
    c.a_x(x, 0.0, buf.data());
    rep.div_at_zero = maxabs(rep.div_at_zero);
  }
  for (double xb : {dom.lo, dom.hi}) {
    for (int j = 0; j < nxi; ++j) {
      const double xi = -xi_max + 2.0 * xi_max * j / (nxi - 1);
      c.a_xi(xb, xi, buf.data());
      rep.dxi_at_boundary = maxabs(rep.dxi_at_boundary);
      c.a_xxi(xb, xi, buf.data());
      rep.dxdxi_at_boundary = maxabs(rep.dxdxi_at_boundary);
    }
  }
  return rep;
}

double finite_difference_consistency(const Coefficient& c,
                                     std::span<const std::pair<double, double>> points,
                                     double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_consistency: h must be > 0");
  const int n = c.dimension();
  std::vector<double> an(n), fp(n), fm(n), f0(n);
  double err = 0.0;
  auto update = [&](const std::vector<double>& analytic, const std::vector<double>& plus,
                    const std::vector<double>& minus, double denom) {
    for (int j = 0; j < n; ++j)
      err = std::max(err, std::abs(analytic[j] - (plus[j] - minus[j]) / denom));
  };
  auto update2 = [&](const std::vector<double>& analytic, const std::vector<double>& plus,
                     const std::vector<double>& center, const std::vector<double>& minus) {
    for (int j = 0; j < n; ++j)
      err = std::max(err,
                     std::abs(analytic[j] - (plus[j] - 2.0 * center[j] + minus[j]) / (h * h)));
  };
  for (const auto& [x, xi] : points) {
    // first derivatives of A
    c.a_xi(x, xi, an.data());
    c.a(x, xi + h, fp.data());
    c.a(x, xi - h, fm.data());
    update(an, fp, fm, 2.0 * h);
    c.a_x(x, xi, an.data());
    c.a(x + h, xi, fp.data());
    c.a(x - h, xi, fm.data());
    update(an, fp, fm, 2.0 * h);
    // mixed and pure second derivatives
    c.a_xxi(x, xi, an.data());
    c.a_xi(x + h, xi, fp.data());
    c.a_xi(x - h, xi, fm.data());
    update(an, fp, fm, 2.0 * h);
    c.a(x, xi, f0.data());
    c.a_xixi(x, xi, an.data());
    c.a(x, xi + h, fp.data());
    c.a(x, xi - h, fm.data());
    update2(an, fp, f0, fm);
    c.a_xx(x, xi, an.data());
    c.a(x + h, xi, fp.data());
    c.a(x - h, xi, fm.data());
    update2(an, fp, f0, fm);
  }
  return err;
}

}  // namespace rpm
