#include <cmath>

#include "doctest.h"
#include "singmap/asymptotics.hpp"
#include "singmap/errors.hpp"
#include "singmap/regression.hpp"
#include "singmap/solver.hpp"
#include "singmap/spectral.hpp"

using namespace singmap;

namespace {

MapState synthetic(const CylinderGrid& g, const Renormalizer& w, double a,
                   const std::function<double(double, double)>& phi,
                   const std::function<double(double, double)>& v) {
  return make_state(Field::from_function(g, phi), Field::from_function(g, v), w, a);
}

}  // namespace

TEST_CASE("least squares helpers") {
  const LinearFit f = ols({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1).epsilon(1e-14));
  CHECK(f.r2 == doctest::Approx(1));
  // y = 4 + x^2 - x^3 through three points
  std::vector<double> x{0.1, 0.2, 0.3}, y;
  for (double xi : x) y.push_back(4 + xi * xi - xi * xi * xi);
  CHECK(extrapolate_to_zero(x, y, {0, 2, 3}) == doctest::Approx(4).epsilon(1e-13));
}

TEST_CASE("pole traces recover a and the gauge shift") {
  const CylinderGrid g(0, 1, 3, 64);
  for (double b : {-0.8, 0.0, 0.5}) {
    MapState s = lift_tangent(g, TangentParams(1.5, b));
    const auto [north, south] = pole_traces(s, 1);
    CHECK(north == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(south == doctest::Approx(-1.5).epsilon(1e-10));
  }
  const MapState k = sample_kerr(CylinderGrid(1, 2, 3, 64), KerrParams(0.7));
  const auto [north, south] = pole_traces(k, 0);
  CHECK(north == doctest::Approx(2 * 0.49).epsilon(1e-10));
  CHECK(south == doctest::Approx(-2 * 0.49).epsilon(1e-10));
}

TEST_CASE("tangent fit is idempotent on lifted tangent maps") {
  const CylinderGrid g(0, 4, 17, 64);
  for (double a : {0.3, 0.7, 1.0, 2.0, 5.0})
    for (double b : {-0.9, -0.4, 0.0, 0.4, 0.9}) {
      const TangentFit f = fit_tangent(lift_tangent(g, TangentParams(a, b)));
      CHECK(std::fabs(f.params.a - a) < 1e-8 * a);
      CHECK(std::fabs(f.params.b - b) < 1e-8);
      CHECK_FALSE(f.beta_reported);
      CHECK(f.note.find("noise floor") != std::string::npos);
      for (double d : f.residuals) CHECK(d < 1e-6);
    }
}

TEST_CASE("tangent fit of extreme Kerr") {
  const CylinderGrid g(2, 10, 161, 64);
  const TangentFit f = fit_tangent(sample_kerr(g, KerrParams(1.0)));
  CHECK(f.params.a == doctest::Approx(2).epsilon(1e-8));
  CHECK(std::fabs(f.params.b) < 1e-8);
  REQUIRE(f.beta_reported);
  CHECK(f.beta > 0);
  CHECK(f.r2 >= 0.99);
  // Kerr approaches its tangent map like r = e^{-t}
  CHECK(f.beta == doctest::Approx(1).epsilon(0.02));
}

TEST_CASE("tangent fit of a relaxing solver output") {
  const TangentParams p(1.0, 0.3);
  const int n = 128;
  const CylinderGrid g(0, 12, 97, n);
  const SolveReport r = solve_dirichlet(g, Renormalizer::translation_invariant(), p.a,
                                        perturbed_tangent_profile(n, p, 1e-2),
                                        tangent_profile(n, p), std::nullopt, SolveConfig{});
  REQUIRE(r.converged);
  const TangentFit f = fit_tangent(*r.final_state);
  CHECK(std::fabs(f.params.a - 1) < 1e-3);
  CHECK(std::fabs(f.params.b - 0.3) < 1e-3);
  REQUIRE(f.beta_reported);
  CHECK(f.beta > 0);
  CHECK(f.r2 >= 0.99);
  MESSAGE("fitted beta " << f.beta << ", from mu_2 "
                         << kernel_spectrum(p, n, 2).beta_from_mu2);
}

TEST_CASE("tangent fit preconditions") {
  const CylinderGrid shortg(0, 2, 17, 32);
  CHECK_THROWS_AS(fit_tangent(lift_tangent(shortg, TangentParams(1, 0))), Error);
  const CylinderGrid g(0, 4, 17, 32);
  try {
    fit_tangent(lift_tangent(g, TangentParams(1, 0), Renormalizer::linear_growth()));
    FAIL("expected Config");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
  // pole traces drifting in t
  const MapState drift = synthetic(
      g, Renormalizer::translation_invariant(), 1.0,
      [](double, double th) { return tangent_phi(TangentParams(1, 0), th); },
      [](double t, double th) { return (1 + 0.1 * t) * std::cos(th); });
  try {
    fit_tangent(drift);
    FAIL("expected FitUnstable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FitUnstable);
  }
}

TEST_CASE("infinity fit on constant and synthetic states") {
  const CylinderGrid g(-7, -2, 101, 96);
  const Renormalizer rho = Renormalizer::linear_growth();
  {
    const InfinityFit f = fit_infinity(synthetic(
        g, rho, 1.0, [](double, double) { return 0.25; },
        [](double, double th) { return v0_profile(1.0, th); }));
    CHECK(f.c0 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::fabs(f.Y0) < 1e-12);
    CHECK(std::fabs(f.Y1) < 1e-12);
    CHECK(std::fabs(f.Y2) < 1e-12);
    for (const auto& e : f.exponents) CHECK_FALSE(e.reported);
    CHECK(f.a_twist == doctest::Approx(1).epsilon(1e-10));
    CHECK(std::fabs(f.c2) < 1e-12);
    CHECK_FALSE(f.tail.reported);
    CHECK(f.parseval_defect < 1e-10);
  }
  {
    const InfinityFit f = fit_infinity(synthetic(
        g, rho, 1.0, [](double t, double th) { return 3 + 5 * std::exp(2 * t) * std::cos(th); },
        [](double t, double th) {
          const double s = std::sin(th);
          return v0_profile(1.0, th) + 7 * std::exp(t) * s * s * s * s;
        }));
    CHECK(f.c0 == doctest::Approx(3).epsilon(1e-10));
    CHECK(f.Y1 == doctest::Approx(5).epsilon(1e-8));
    REQUIRE(f.exponents[1].reported);
    CHECK(f.exponents[1].value == doctest::Approx(2).epsilon(1e-6));
    CHECK(f.c2 == doctest::Approx(7).epsilon(1e-8));
    CHECK(f.v_remainder < 1e-10);
    CHECK(f.parseval_defect < 1e-10);
  }
}

TEST_CASE("infinity fit of extreme Kerr") {
  const CylinderGrid g(-std::log(1e3), -std::log(10.0), 201, 128);
  for (double m : {0.5, 1.0}) {
    const InfinityFit f = fit_infinity(sample_kerr(g, KerrParams(m), Renormalizer::linear_growth()));
    CHECK(std::fabs(f.c0) < 1e-3);
    CHECK(std::fabs(f.Y0 + m) < 1e-3);
    CHECK(std::fabs(f.Y1) < 1e-10);
    CHECK(std::fabs(f.a_twist - 2 * m * m) < 1e-3);
    CHECK(std::fabs(f.c2) < 1e-3);
    REQUIRE(f.exponents[0].reported);
    REQUIRE(f.exponents[2].reported);
    CHECK(f.exponents[0].value == doctest::Approx(1).epsilon(0.05));
    CHECK(f.exponents[2].value == doctest::Approx(3).epsilon(0.05 / 3));
    CHECK(f.parseval_defect < 1e-10);
  }
  CHECK_THROWS_AS(fit_infinity(sample_kerr(g, KerrParams(1))), Error);
}
