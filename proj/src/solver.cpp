#include "singmap/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>
#include <sstream>

#include "singmap/cylinder_ops.hpp"
#include "singmap/parallel.hpp"
#include "stencil.hpp"

namespace singmap {

namespace {

using D = Dual<10>;
using SpMat = Eigen::SparseMatrix<double>;

// slots: 0..4 Phi (c, tm, tp, jm, jp), 5..9 v
enum Slot { C = 0, TM = 1, TP = 2, JM = 3, JP = 4 };

struct System {
  const CylinderGrid& g;
  ThetaGeometry geo;
  int n, nt, rows;
  System(const CylinderGrid& grid)
      : g(grid), geo(grid.n_theta()), n(grid.n_theta()), nt(grid.n_t()),
        rows((grid.n_t() - 2) * grid.n_theta() * 2) {}
  int col(int i, int j, int field) const { return ((i - 1) * n + j) * 2 + field; }
  bool unknown(int i) const { return i >= 1 && i <= nt - 2; }
};

// interior sup-norm of (R_Phi, R_v)
double merit(const MapState& s) { return residual(s).sup_interior(); }

void check_profile(const SphereData& p, int n, double a, double shift,
                   const char* which) {
  require(int(p.phi.size()) == n && int(p.v.size()) == n,
          std::string(which) + " boundary profile has wrong length");
  for (int j = 0; j < n; ++j) {
    require(std::isfinite(p.phi[j]) && std::isfinite(p.v[j]),
            std::string(which) + " boundary profile is not finite");
    require(std::fabs(p.v[j] - shift) <= a * (1 + 1e-8) + 1e-12,
            std::string(which) + " boundary v-profile exceeds the pole trace a");
  }
}

// Newton residual vector (Phi rows R_Phi, v rows sin^4 * div-form) and its
// Jacobian.
void assemble(const System& sys, const MapState& s, Eigen::VectorXd& F,
              std::vector<Eigen::Triplet<double>>* trip) {
  const int n = sys.n;
  F.resize(sys.rows);
  std::vector<std::vector<Eigen::Triplet<double>>> per_row(sys.nt);
  parallel_for(sys.nt - 2, [&](int k) {
    const int i = k + 1;
    auto& out = per_row[i];
    for (int j = 0; j < n; ++j) {
      const detail::NodeGeom ng = detail::node_geom(s, sys.geo, i, j);
      const double s4 = std::pow(sys.geo.sin_node[j], 4);
      if (!trip) {
        const auto nr = detail::interior_residual<double>(
            ng, detail::gather(s.phi, i, j), detail::gather(s.v, i, j));
        F[sys.col(i, j, 0)] = nr.phi;
        F[sys.col(i, j, 1)] = nr.dv * s4;
        continue;
      }
      detail::Stencil<D> P, V;
      P.c = D::variable(s.phi(i, j), C);
      P.tm = D::variable(s.phi(i - 1, j), TM);
      P.tp = D::variable(s.phi(i + 1, j), TP);
      P.jm = j > 0 ? D::variable(s.phi(i, j - 1), JM) : P.c;
      P.jp = j + 1 < n ? D::variable(s.phi(i, j + 1), JP) : P.c;
      V.c = D::variable(s.v(i, j), 5 + C);
      V.tm = D::variable(s.v(i - 1, j), 5 + TM);
      V.tp = D::variable(s.v(i + 1, j), 5 + TP);
      V.jm = j > 0 ? D::variable(s.v(i, j - 1), 5 + JM) : V.c;
      V.jp = j + 1 < n ? D::variable(s.v(i, j + 1), 5 + JP) : V.c;
      const auto nr = detail::interior_residual<D>(ng, P, V);
      const D gv = nr.dv * s4;
      F[sys.col(i, j, 0)] = nr.phi.val;
      F[sys.col(i, j, 1)] = gv.val;
      const int nb_i[5] = {i, i - 1, i + 1, i, i};
      const int nb_j[5] = {j, j, j, j - 1, j + 1};
      for (int slot = 0; slot < 5; ++slot) {
        if (!sys.unknown(nb_i[slot]) || nb_j[slot] < 0 || nb_j[slot] >= n) continue;
        for (int field = 0; field < 2; ++field) {
          const int c = sys.col(nb_i[slot], nb_j[slot], field);
          out.emplace_back(sys.col(i, j, 0), c, nr.phi.d[5 * field + slot]);
          out.emplace_back(sys.col(i, j, 1), c, gv.d[5 * field + slot]);
        }
      }
    }
  });
  if (trip) {
    trip->clear();
    for (auto& r : per_row) trip->insert(trip->end(), r.begin(), r.end());
  }
}

MapState with_update(const System& sys, const MapState& s,
                     const Eigen::VectorXd& dx, double lam) {
  MapState out = s;
  for (int i = 1; i + 1 < sys.nt; ++i)
    for (int j = 0; j < sys.n; ++j) {
      out.phi(i, j) += lam * dx[sys.col(i, j, 0)];
      out.v(i, j) += lam * dx[sys.col(i, j, 1)];
    }
  return out;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(3);
  o << x;
  return o.str();
}

}  // namespace

void SolveConfig::validate() const {
  require(max_newton_iters >= 1, "max_newton_iters must be >= 1");
  require(residual_tol > 0, "residual_tol must be positive");
  require(damping > 0 && damping < 1, "damping must lie in (0, 1)");
  require(min_step > 0 && min_step < 1, "min_step must lie in (0, 1)");
  require(continuation_steps >= 1, "continuation_steps must be >= 1");
  require(lambda_guard > 0, "lambda_guard must be positive");
  require(armijo > 0 && armijo < 1, "armijo constant must lie in (0, 1)");
}

SphereData profile_of(const MapState& s, int i) {
  return {s.phi.slice(i), s.v.slice(i)};
}

SphereData tangent_profile(int n_theta, const TangentParams& p) {
  const ThetaGeometry geo(n_theta);
  SphereData d;
  for (double th : geo.theta) {
    d.phi.push_back(tangent_phi(p, th));
    d.v.push_back(tangent_v(p, th));
  }
  return d;
}

SphereData kerr_profile(int n_theta, const KerrParams& p, double t,
                        const Renormalizer& omega) {
  const ThetaGeometry geo(n_theta);
  SphereData d;
  const double r = std::exp(-t);
  for (double th : geo.theta) {
    d.phi.push_back(kerr_phi(p, r, th) + omega.log_ratio(t, th));
    d.v.push_back(kerr_v(p, r, th));
  }
  return d;
}

SphereData perturbed_tangent_profile(int n_theta, const TangentParams& p,
                                     double eps, unsigned seed) {
  const ThetaGeometry geo(n_theta);
  double c3 = 0, c4 = 0;
  if (seed != 0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    c3 = U(rng);
    c4 = U(rng);
  }
  std::vector<double> b1(n_theta), b2(n_theta), k1(n_theta), k2(n_theta), w(n_theta);
  double bk = 0, kk = 0;
  for (int j = 0; j < n_theta; ++j) {
    const double th = geo.theta[j], c = geo.cos_node[j], s = geo.sin_node[j];
    const double s4 = s * s * s * s;
    b1[j] = 0.5 * (3 * c * c - 1) + c3 * 0.5 * (5 * c * c * c - 3 * c);
    b2[j] = p.a * s4 * (1 + c + c4 * c * c);
    const JacobiFields J = jacobi_fields(p, th);
    k1[j] = J.phi_b.first;
    k2[j] = J.phi_b.second;
    w[j] = std::exp(4 * tangent_phi(p, th)) / s4;
    bk += s * (b1[j] * k1[j] + w[j] * b2[j] * k2[j]);
    kk += s * (k1[j] * k1[j] + w[j] * k2[j] * k2[j]);
  }
  SphereData d = tangent_profile(n_theta, p);
  for (int j = 0; j < n_theta; ++j) {
    d.phi[j] += eps * (b1[j] - bk / kk * k1[j]);
    d.v[j] += eps * (b2[j] - bk / kk * k2[j]);
  }
  return d;
}

MapState default_initial_guess(const CylinderGrid& g, const Renormalizer& omega,
                               double a, const SphereData& lo,
                               const SphereData& hi, double v_shift) {
  const int n = g.n_theta();
  require(int(lo.phi.size()) == n && int(hi.phi.size()) == n,
          "boundary profile length does not match grid");
  Field phi(g), v(g);
  const double T = g.t_max() - g.t_min();
  for (int i = 0; i < g.n_t(); ++i) {
    const double s = g.t(i) - g.t_min();
    const double w_harm = std::expm1(s) / std::expm1(T);
    const double w_lin = s / T;
    for (int j = 0; j < n; ++j) {
      phi(i, j) = lo.phi[j] + w_harm * (hi.phi[j] - lo.phi[j]);
      v(i, j) = lo.v[j] + w_lin * (hi.v[j] - lo.v[j]);
    }
  }
  return make_state(std::move(phi), std::move(v), omega, a, v_shift);
}

SolveReport solve_dirichlet(const CylinderGrid& g, const Renormalizer& omega,
                            double a, const SphereData& lo, const SphereData& hi,
                            const std::optional<MapState>& init,
                            const SolveConfig& cfg, double v_shift) {
  cfg.validate();
  require(a > 0, "pole trace a must be positive");
  const int n = g.n_theta();
  check_profile(lo, n, a, v_shift, "lower");
  check_profile(hi, n, a, v_shift, "upper");

  MapState s = init ? *init : default_initial_guess(g, omega, a, lo, hi, v_shift);
  require(s.grid() == g, "initial state is on a different grid");
  if (init && (init->a != a || init->v_shift != v_shift)) {
    // carry the warm start onto the new traces; a mismatch at the pole
    // ghosts would put O(1/h^4) fluxes into the first rows
    for (double& x : s.v.values()) x = v_shift + (x - init->v_shift) * a / init->a;
  }
  s.a = a;
  s.v_shift = v_shift;
  s.omega = omega;
  for (int j = 0; j < n; ++j) {
    s.phi(0, j) = lo.phi[j];
    s.v(0, j) = lo.v[j];
    s.phi(g.n_t() - 1, j) = hi.phi[j];
    s.v(g.n_t() - 1, j) = hi.v[j];
  }
  if (!s.phi.all_finite() || !s.v.all_finite())
    fail(ErrorCode::Config, "initial state is not finite");

  const System sys(g);
  SolveReport rep;
  double r = merit(s);
  rep.residual_history.push_back(r);
  const double target = cfg.residual_tol * (1 + r);

  Eigen::VectorXd F;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;

  auto bail = [&](ErrorCode c, const std::string& msg) {
    rep.message = msg;
    rep.final_state = s;
    throw SolveError(c, msg, rep);
  };

  while (r > target) {
    if (rep.iterations >= cfg.max_newton_iters)
      bail(ErrorCode::NonConvergence,
           "Newton budget of " + std::to_string(cfg.max_newton_iters) +
               " iterations exhausted at residual " + fmt(r));
    assemble(sys, s, F, &trip);
    SpMat J(sys.rows, sys.rows);
    J.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      bail(ErrorCode::SingularJacobian, "Jacobian factorization failed");
    const Eigen::VectorXd dx = lu.solve(-F);
    if (lu.info() != Eigen::Success || !dx.allFinite())
      bail(ErrorCode::SingularJacobian, "Jacobian solve produced non-finite step");

    double lam = 1.0;
    for (;;) {
      MapState trial = with_update(sys, s, dx, lam);
      double rt = INFINITY;
      if (trial.phi.all_finite() && trial.v.all_finite()) rt = merit(trial);
      if (rt <= (1 - cfg.armijo * lam) * r) {
        s = std::move(trial);
        r = rt;
        break;
      }
      lam *= cfg.damping;
      if (lam < cfg.min_step)
        bail(ErrorCode::NonConvergence,
             "line search stalled at residual " + fmt(r));
    }
    ++rep.iterations;
    rep.step_lengths.push_back(lam);
    rep.residual_history.push_back(r);
    if (s.phi.sup_norm() > cfg.lambda_guard)
      bail(ErrorCode::BoundBreach, "sup|Phi| = " + fmt(s.phi.sup_norm()) +
                                       " exceeds the guard " + fmt(cfg.lambda_guard));
  }
  rep.converged = true;
  rep.message = "converged";
  rep.final_state = std::move(s);
  return rep;
}

ContinuationReport continuation_solve(const CylinderGrid& g,
                                      const Renormalizer& omega, double a_base,
                                      const SphereData& base_lo,
                                      const SphereData& base_hi, double a_target,
                                      const SphereData& target_lo,
                                      const SphereData& target_hi, int steps,
                                      const std::optional<MapState>& init,
                                      const SolveConfig& cfg) {
  require(steps >= 1, "continuation needs at least one step");
  const int n = g.n_theta();
  auto blend = [n](const SphereData& x, const SphereData& y, double w) {
    require(int(x.phi.size()) == n && int(y.phi.size()) == n,
            "boundary profile length does not match grid");
    SphereData out{std::vector<double>(n), std::vector<double>(n)};
    for (int j = 0; j < n; ++j) {
      out.phi[j] = (1 - w) * x.phi[j] + w * y.phi[j];
      out.v[j] = (1 - w) * x.v[j] + w * y.v[j];
    }
    return out;
  };
  ContinuationReport rep;
  std::optional<MapState> warm = init;
  for (int k = 1; k <= steps; ++k) {
    const double w = double(k) / steps;
    const double a = (1 - w) * a_base + w * a_target;
    try {
      SolveReport r = solve_dirichlet(g, omega, a, blend(base_lo, target_lo, w),
                                      blend(base_hi, target_hi, w), warm, cfg);
      r.continuation_step = k;
      warm = r.final_state;
      rep.parameters.push_back(w);
      rep.steps.push_back(std::move(r));
    } catch (SolveError& e) {
      e.report.continuation_step = k;
      throw SolveError(e.code(),
                       "continuation step " + std::to_string(k) + "/" +
                           std::to_string(steps) + ": " + e.what(),
                       e.report);
    }
  }
  return rep;
}

}  // namespace singmap
