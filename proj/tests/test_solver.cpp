#include <cmath>

#include "doctest.h"
#include "singmap/cylinder_ops.hpp"
#include "singmap/solver.hpp"

using namespace singmap;

namespace {

double sup_diff(const MapState& a, const MapState& b) {
  double m = 0;
  for (std::size_t q = 0; q < a.grid().size(); ++q) {
    m = std::max(m, std::fabs(a.phi.values()[q] - b.phi.values()[q]));
    m = std::max(m, std::fabs(a.v.values()[q] - b.v.values()[q]));
  }
  return m;
}

SolveReport solve_kerr(const CylinderGrid& g, const KerrParams& k) {
  const MapState ex = sample_kerr(g, k);
  return solve_dirichlet(g, ex.omega, ex.a, profile_of(ex, 0),
                         profile_of(ex, g.n_t() - 1), std::nullopt, SolveConfig{});
}

}  // namespace

TEST_CASE("config validation") {
  SolveConfig c;
  c.damping = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SolveConfig{};
  c.residual_tol = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  const CylinderGrid g(0, 1, 5, 8);
  const auto p = tangent_profile(8, TangentParams(1, 0));
  CHECK_THROWS_AS(solve_dirichlet(g, Renormalizer::translation_invariant(), 0.5, p, p,
                                  std::nullopt, SolveConfig{}),
                  Error);
}

TEST_CASE("Kerr Dirichlet problem: second order interior error, quadratic tail") {
  const KerrParams k(1.0);
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const CylinderGrid g(2, 6, 4 * n / 2 + 1, n);
    const SolveReport r = solve_kerr(g, k);
    CHECK(r.converged);
    err.push_back(sup_diff(*r.final_state, sample_kerr(g, k)));
    const auto& h = r.residual_history;
    for (std::size_t q = 1; q < h.size(); ++q) {
      CHECK(h[q] < h[q - 1]);
      if (h[q - 1] < 1e-3 && h[q] > 1e-13) CHECK(h[q] <= 50 * h[q - 1] * h[q - 1]);
    }
    // discrete maximum-type control
    double lam0 = 0;
    for (int j = 0; j < n; ++j)
      lam0 = std::max({lam0, std::fabs(r.final_state->phi(0, j)),
                       std::fabs(r.final_state->phi(g.n_t() - 1, j))});
    CHECK(r.final_state->phi.sup_norm() <= lam0 + 1);
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("tangent data is a near fixed point") {
  const TangentParams p(1.3, -0.4);
  const CylinderGrid g(0, 3, 25, 48);
  const MapState t = lift_tangent(g, p);
  const auto d = tangent_profile(48, p);
  const SolveReport r =
      solve_dirichlet(g, t.omega, p.a, d, d, t, SolveConfig{});
  CHECK(r.converged);
  CHECK(r.iterations <= 3);
  // the only correction is the discretization error of the lifted profile
  CHECK(sup_diff(*r.final_state, t) < 2e-3);
}

TEST_CASE("v shift gauge symmetry") {
  const KerrParams k(0.9);
  const CylinderGrid g(1, 3, 17, 16);
  const MapState ex = sample_kerr(g, k);
  auto lo = profile_of(ex, 0), hi = profile_of(ex, g.n_t() - 1);
  const SolveReport base = solve_dirichlet(g, ex.omega, ex.a, lo, hi, std::nullopt, SolveConfig{});
  const double c = 0.75;
  for (auto& x : lo.v) x += c;
  for (auto& x : hi.v) x += c;
  const SolveReport shifted =
      solve_dirichlet(g, ex.omega, ex.a, lo, hi, std::nullopt, SolveConfig{}, c);
  double m = 0;
  for (std::size_t q = 0; q < g.size(); ++q) {
    m = std::max(m, std::fabs(shifted.final_state->v.values()[q] -
                              base.final_state->v.values()[q] - c));
    m = std::max(m, std::fabs(shifted.final_state->phi.values()[q] -
                              base.final_state->phi.values()[q]));
  }
  CHECK(m < 1e-10);
}

TEST_CASE("perturbed tangent data relaxes toward the tangent map") {
  const TangentParams p(1.0, 0.3);
  const int n = 48;
  const CylinderGrid g(0, 8, 65, n);
  const auto lo = perturbed_tangent_profile(n, p, 1e-2);
  const auto hi = tangent_profile(n, p);
  const SolveReport pert = solve_dirichlet(g, Renormalizer::translation_invariant(),
                                           p.a, lo, hi, std::nullopt, SolveConfig{});
  const SolveReport base = solve_dirichlet(g, Renormalizer::translation_invariant(),
                                           p.a, hi, hi, std::nullopt, SolveConfig{});
  CHECK(pert.converged);
  const ThetaGeometry geo(n);
  auto dist = [&](int i) {
    double d = 0;
    for (int j = 0; j < n; ++j)
      d = std::max(d, hyperbolic_distance_reg(
                          pert.final_state->phi(i, j), pert.final_state->v(i, j),
                          base.final_state->phi(i, j), base.final_state->v(i, j),
                          geo.sin_node[j]));
    return d;
  };
  // one e-fold of decay or better per unit t over the first stretch
  CHECK(dist(8) < 0.5 * dist(0));
  CHECK(dist(16) < 0.5 * dist(8));
  CHECK(dist(24) < 0.5 * dist(16));
}

TEST_CASE("continuation") {
  const CylinderGrid g(2, 5, 25, 16);
  const KerrParams k0(1.0), k1(1.2);
  const Renormalizer om = Renormalizer::translation_invariant();
  const auto b_lo = kerr_profile(16, k0, 2, om), b_hi = kerr_profile(16, k0, 5, om);
  const auto t_lo = kerr_profile(16, k1, 2, om), t_hi = kerr_profile(16, k1, 5, om);

  const ContinuationReport one =
      continuation_solve(g, om, 2.0, b_lo, b_hi, 2.0, b_lo, b_hi, 1, std::nullopt, SolveConfig{});
  const SolveReport direct = solve_dirichlet(g, om, 2.0, b_lo, b_hi, std::nullopt, SolveConfig{});
  CHECK(one.last().residual_history == direct.residual_history);

  const ContinuationReport four = continuation_solve(
      g, om, 2.0, b_lo, b_hi, 2 * 1.44, t_lo, t_hi, 4, std::nullopt, SolveConfig{});
  CHECK(four.steps.size() == 4);
  const double e = sup_diff(*four.last().final_state, sample_kerr(g, k1));
  CHECK(e < 2e-2);

  // b-homotopy along the tangent family
  const CylinderGrid gt(0, 2, 9, 24);
  const auto z = tangent_profile(24, TangentParams(1, 0));
  const auto w = tangent_profile(24, TangentParams(1, 0.8));
  const ContinuationReport hb =
      continuation_solve(gt, om, 1, z, z, 1, w, w, 5, std::nullopt, SolveConfig{});
  double prev = -1;
  for (const auto& s : hb.steps) {
    CHECK(s.converged);
    // v at the equator tracks b monotonically
    const double v_eq = s.final_state->v(4, 11) + s.final_state->v(4, 12);
    CHECK(v_eq > prev);
    prev = v_eq;
  }

  SolveConfig tight;
  tight.max_newton_iters = 1;
  try {
    continuation_solve(g, om, 2.0, b_lo, b_hi, 2 * 1.44, t_lo, t_hi, 2, std::nullopt, tight);
    CHECK(false);
  } catch (const SolveError& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
    CHECK(e.report.continuation_step == 1);
  }
}

TEST_CASE("bound guard") {
  const CylinderGrid g(2, 4, 9, 8);
  const MapState ex = sample_kerr(g, KerrParams(1.0));
  SolveConfig c;
  c.lambda_guard = 0.01;
  CHECK_THROWS_AS(solve_dirichlet(g, ex.omega, ex.a, profile_of(ex, 0), profile_of(ex, 8),
                                  std::nullopt, c),
                  SolveError);
}
