#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rpm/characteristics.hpp"
#include "rpm/lift.hpp"

using namespace rpm;

namespace {

Domain unit_domain() { return Domain(0.0, 1.0, 64); }

Coefficient basis_coeff(const Domain& q, double amplitude = 0.4) {
  return build_basis_coefficient(sigma_rational(), {basis_sin_sq(q, 1)}, q, amplitude);
}

}  // namespace

TEST_CASE("zero coefficient: flow is the identity") {
  const SmoothPath z = sample_brownian(3, 1, 32, 1.0);
  FlowParams p{1e-2, true};
  const CharState s = forward_flow({0.3, -1.2}, 0.0, 1.0, z, Coefficient::zero(1), p);
  CHECK(s.x == doctest::Approx(0.3));
  CHECK(s.xi == doctest::Approx(-1.2));
  CHECK(s.det() == doctest::Approx(1.0));
  for (double back : {0.0, 0.4, 0.9}) {
    const CharState b = backward_flow({0.3, -1.2}, 0.9, back, z, Coefficient::zero(1), p);
    CHECK(b.x == doctest::Approx(0.3));
    CHECK(b.xi == doctest::Approx(-1.2));
  }
  CHECK(check_inverse(0.3, -1.2, 0.0, 1.0, z, Coefficient::zero(1), p) ==
        doctest::Approx(0.0));
  CHECK(measure_preservation(0.3, -1.2, 0.0, 1.0, z, Coefficient::zero(1), p) ==
        doctest::Approx(0.0));
}

TEST_CASE("linear-in-xi coefficient: exact translation solution") {
  // A(x, xi) = xi gives dX = -zdot, dXi = 0: X = x - (z_t - z_t0).
  const SmoothPath z = sample_brownian(5, 1, 64, 1.0);
  const Coefficient c = Coefficient::linear_xi({1.0});
  FlowParams p{1e-3, false};
  const double t0 = 0.25, t1 = 0.875;
  const CharState s = forward_flow({0.4, 0.7}, t0, t1, z, c, p);
  const double inc = z.eval(t1)[0] - z.eval(t0)[0];
  CHECK(s.x == doctest::Approx(0.4 - inc).epsilon(1e-12));
  CHECK(s.xi == doctest::Approx(0.7));
  // exact flows cancel in the inverse composition
  CHECK(check_inverse(0.4, 0.7, t0, t1, z, c, p) <= 1e-10);
}

TEST_CASE("backward flow at s = 0 is the identity") {
  const SmoothPath z = sample_brownian(7, 1, 32, 1.0);
  Domain q = unit_domain();
  const Coefficient c = basis_coeff(q);
  FlowParams p{1e-2, false};
  const CharState s = backward_flow({0.5, 1.0}, 0.7, 0.0, z, c, p);
  CHECK(s.x == 0.5);
  CHECK(s.xi == 1.0);
}

TEST_CASE("order-4 self-convergence of the stepper") {
  Domain q = unit_domain();
  const Coefficient c = basis_coeff(q, 1.0);
  // smooth single-segment driver keeps the local analysis clean
  const SmoothPath z({0.0, 1.0}, {0.0, 1.5}, 1);
  const CharState s0{0.37, 0.9};
  auto run = [&](double dt) {
    FlowParams p{dt, false};
    return forward_flow(s0, 0.0, 1.0, z, c, p);
  };
  const CharState ref = run(1.0 / 1024.0);
  auto err = [&](double dt) {
    const CharState s = run(dt);
    return std::hypot(s.x - ref.x, s.xi - ref.xi);
  };
  const double e1 = err(1.0 / 16.0);
  const double e2 = err(1.0 / 32.0);
  const double e3 = err(1.0 / 64.0);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.35));
  CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.35));
}

TEST_CASE("inverse relation residual shrinks at fourth order") {
  Domain q = unit_domain();
  const Coefficient c = basis_coeff(q, 1.0);
  const SmoothPath z = sample_brownian(11, 1, 8, 1.0);
  auto residual = [&](double dt) {
    FlowParams p{dt, false};
    return check_inverse(0.45, 1.2, 0.2, 1.0, z, c, p);
  };
  const double r1 = residual(1.0 / 16.0);
  const double r2 = residual(1.0 / 32.0);
  const double r3 = residual(1.0 / 64.0);
  CHECK(r1 / r2 >= 8.0);
  CHECK(r2 / r3 >= 8.0);
  CHECK(r1 / r2 <= 32.0);
  CHECK(r2 / r3 <= 32.0);
}

TEST_CASE("measure preservation against the fine-step reference") {
  Domain q = unit_domain();
  const Coefficient c = basis_coeff(q, 0.8);
  const SmoothPath z = sample_brownian(13, 1, 32, 1.0);
  FlowParams p{1e-3, true};
  const double drift = measure_preservation(0.6, -0.8, 0.0, 1.0, z, c, p);
  CHECK(drift <= 1e-6);
  // dt_ref = dt/4 and the defect scales at order 4, so the reference-run
  // comparison carries the (dt/dt_ref)^4 = 256 factor.
  FlowParams pf{2.5e-4, true};
  const double drift_fine = measure_preservation(0.6, -0.8, 0.0, 1.0, z, c, pf);
  CHECK(drift <= 10.0 * 256.0 * std::max(drift_fine, 1e-12) + 1e-10);
}

TEST_CASE("trace of the variational right-hand side vanishes identically") {
  // The field is (-d_xi A, d_x A) zdot, so d_x(f_x) + d_xi(f_xi)
  // = (-d_x d_xi A + d_xi d_x A) zdot = 0 pointwise.
  Domain q = unit_domain();
  const Coefficient c = basis_coeff(q, 1.0);
  for (double x : {0.2, 0.5, 0.9})
    for (double xi : {-1.0, 0.3}) {
      const double m00 = -c.a_xxi(x, xi)[0];
      const double m11 = c.a_xxi(x, xi)[0];
      CHECK(m00 + m11 == 0.0);
    }
}

TEST_CASE("sign of the velocity is preserved") {
  Domain q = unit_domain();
  const Coefficient c = basis_coeff(q, 2.0);  // strong noise
  const SmoothPath z = sample_brownian(17, 1, 64, 1.0);
  FlowParams p{2e-4, false};
  CHECK(sign_preserved(0.5, 0.0, 0.0, 1.0, z, c, p));
  CHECK(sign_preserved(0.5, 1e-3, 0.0, 1.0, z, c, p));
  CHECK(sign_preserved(0.3, -1.0, 0.0, 1.0, z, c, p));
  CHECK(sign_preserved(0.8, 2.0, 0.0, 1.0, z, c, p));
}

TEST_CASE("boundary ladder: standstill and no upward drift of the ratios") {
  Domain q = unit_domain();
  const Coefficient c = basis_coeff(q, 0.8);
  const SmoothPath z = sample_brownian(19, 1, 32, 1.0);
  FlowParams p{1e-3, false};
  const std::vector<double> xis{-1.0, 0.5, 2.0};
  const BoundaryLadderReport rep = boundary_estimates(q, 3, 8, xis, 1.0, z, c, p);
  CHECK(rep.standstill <= 1e-10);
  REQUIRE(rep.k.size() == 6);
  // bounded by a k-independent constant: no growth toward the boundary
  auto no_drift = [&](const std::vector<double>& r) {
    const double head = std::max(r[0], r[1]);
    for (double v : r) CHECK(v <= 1.5 * head + 1e-12);
  };
  no_drift(rep.move_ratio);
  no_drift(rep.dxi_y_ratio);
  no_drift(rep.dxy_ratio);

  // zero coefficient: every ratio vanishes
  const BoundaryLadderReport zero =
      boundary_estimates(q, 3, 5, xis, 1.0, z, Coefficient::zero(1), p);
  for (double v : zero.move_ratio) CHECK(v == 0.0);
  for (double v : zero.dxi_y_ratio) CHECK(v == 0.0);
  for (double v : zero.dxy_ratio) CHECK(v == 0.0);
}

TEST_CASE("boundary ladder flags an inadmissible coefficient") {
  // A = xi moves characteristics at unit rate: |X - x| / delta blows up as
  // delta -> 0, unlike admissible coefficients.
  Domain q = unit_domain();
  const SmoothPath z = sample_brownian(23, 1, 32, 1.0);
  FlowParams p{1e-2, false};
  const std::vector<double> xis{1.0};
  const BoundaryLadderReport rep =
      boundary_estimates(q, 3, 8, xis, 1.0, z, Coefficient::linear_xi({1.0}), p);
  CHECK(rep.move_ratio.back() > 10.0 * rep.move_ratio.front());
}

TEST_CASE("velocity comparability") {
  Domain q = unit_domain();
  const SmoothPath z = sample_brownian(29, 1, 32, 1.0);
  FlowParams p{1e-3, false};

  const VelocityComparability trivial =
      velocity_comparability(0.5, 2.0, 1.0, z, Coefficient::zero(1), p);
  CHECK(trivial.min_ratio == doctest::Approx(1.0));
  CHECK(trivial.max_ratio == doctest::Approx(1.0));

  // linear-in-xi: Xi is constant along the flow
  const VelocityComparability lin =
      velocity_comparability(0.5, -3.0, 1.0, z, Coefficient::linear_xi({1.0}), p);
  CHECK(lin.min_ratio == doctest::Approx(1.0));
  CHECK(lin.max_ratio == doctest::Approx(1.0));

  // For sigma(xi) = xi the relative drive of the velocity equation does not
  // depend on the magnitude of xi, so the fitted constant is flat in |xi|.
  const Coefficient c =
      build_basis_coefficient(sigma_identity(), {basis_sin_sq(q, 1)}, q, 0.8);
  std::vector<double> cs;
  for (double mag : {1e-2, 1.0, 1e2}) {
    const VelocityComparability vc = velocity_comparability(0.5, mag, 1.0, z, c, p);
    CHECK(vc.min_ratio > 0.0);
    cs.push_back(std::max(vc.max_ratio, 1.0 / vc.min_ratio));
  }
  const double lo = *std::min_element(cs.begin(), cs.end());
  const double hi = *std::max_element(cs.begin(), cs.end());
  CHECK(hi / lo <= 4.0);

  CHECK_THROWS_AS(velocity_comparability(0.5, 0.0, 1.0, z, c, p), std::invalid_argument);
}

TEST_CASE("flow stability along the dyadic ladder") {
  Domain q = unit_domain();
  const Coefficient c = basis_coeff(q, 0.8);
  const SmoothPath fine = sample_brownian(31, 1, 64, 1.0);
  FlowParams p{1e-3, false};
  std::vector<std::pair<double, double>> probes{{0.3, 1.0}, {0.6, -0.5}, {0.8, 2.0}};

  CHECK(flow_stability(fine, fine, c, p, probes, 100.0) == doctest::Approx(0.0));

  HolderMetricParams hp;
  hp.alpha = 0.45;
  hp.pair_grid = dyadic_pairs(1.0, 6);
  const Level2Path lf = stratonovich_lift(fine);
  std::vector<double> devs, dists;
  for (double mesh : {1.0 / 4, 1.0 / 16, 1.0 / 64}) {
    const SmoothPath zc = coarsen(fine, mesh);
    devs.push_back(flow_stability(zc, fine, c, p, probes, 100.0));
    dists.push_back(holder_distance(stratonovich_lift(zc), lf, hp));
  }
  CHECK(devs[0] > devs[1]);
  CHECK(devs[1] > devs[2]);
  // deviation controlled by the rough-path distance, ratio bounded along
  // the ladder by the coarsest-level calibration
  const double c_fit = 2.0 * devs[0] / dists[0];
  for (std::size_t k = 1; k < devs.size(); ++k) CHECK(devs[k] <= c_fit * dists[k]);

  CHECK_THROWS_AS(flow_stability(fine, fine, c, p, probes, 1e-6), std::invalid_argument);
}

TEST_CASE("transported compact support never touches the boundary cells") {
  Domain q(0.0, 1.0, 64);
  const Coefficient c = basis_coeff(q, 1.0);
  const SmoothPath z = sample_brownian(37, 1, 32, 1.0);
  FlowParams p{1e-3, false};
  // rho0 supported in [0.25, 0.75]: backward characteristics started in the
  // boundary cells stay near the boundary, so the pullback vanishes there.
  auto rho0 = [](double x) { return std::abs(x - 0.5) < 0.25 ? 1.0 : 0.0; };
  for (double t : {0.25, 0.5, 1.0}) {
    const SmoothPath rev = reverse(z, t);
    for (int i : {0, 1, 62, 63}) {
      for (double xi : {-1.0, 0.4}) {
        const CharState s = forward_flow({q.center(i), xi}, 0.0, t, rev, c, p);
        CHECK(rho0(s.x) == 0.0);
      }
    }
  }
}

TEST_CASE("non-finite states are reported") {
  // A coefficient with huge amplitude and a steep path blows the state up
  // within a few steps; the integrator must say where.
  const Coefficient c = Coefficient::linear_xi({1e300});
  const SmoothPath z({0.0, 1.0}, {0.0, 1e300}, 1);
  FlowParams p{0.5, false};
  CHECK_THROWS_AS(forward_flow({0.5, 1.0}, 0.0, 1.0, z, c, p), std::runtime_error);
}
