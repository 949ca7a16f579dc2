#include "singmap/cylinder_ops.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

#include "singmap/errors.hpp"
#include "singmap/parallel.hpp"
#include "stencil.hpp"

namespace singmap {

namespace detail {

std::pair<double, double> t_derivs(const Field& f, int i, int j) {
  const CylinderGrid& g = f.grid();
  const double dt = g.dt();
  const int nt = g.n_t();
  if (i > 0 && i + 1 < nt) {
    return {(f(i + 1, j) - f(i - 1, j)) / (2 * dt),
            (f(i + 1, j) - 2 * f(i, j) + f(i - 1, j)) / (dt * dt)};
  }
  // mirror so that k steps inward
  const int sgn = i == 0 ? 1 : -1;
  auto at = [&](int k) { return f(i + sgn * k, j); };
  const double ft = sgn * (-3 * at(0) + 4 * at(1) - at(2)) / (2 * dt);
  const double ftt = nt >= 4
                         ? (2 * at(0) - 5 * at(1) + 4 * at(2) - at(3)) / (dt * dt)
                         : (at(0) - 2 * at(1) + at(2)) / (dt * dt);
  return {ft, ftt};
}

}  // namespace detail

namespace {

double theta_lap(const ThetaGeometry& geo, const Field& f, int i, int j) {
  const int n = geo.n;
  const double c = f(i, j);
  const double up = j + 1 < n ? geo.sin_face[j + 1] * (f(i, j + 1) - c) : 0.0;
  const double dn = j > 0 ? geo.sin_face[j] * (c - f(i, j - 1)) : 0.0;
  return (up - dn) / (geo.sin_node[j] * geo.h * geo.h);
}

// jump of v across theta face f, ghost traces on the pole faces
double face_dv(const MapState& s, int i, int f) {
  const int n = s.grid().n_theta();
  if (f == 0) return s.v(i, 0) - s.north_trace();
  if (f == n) return s.south_trace() - s.v(i, n - 1);
  return s.v(i, f) - s.v(i, f - 1);
}

}  // namespace

Field op_L(const Field& f) {
  const CylinderGrid& g = f.grid();
  const ThetaGeometry geo(g.n_theta());
  Field out(g);
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) {
      const auto [ft, ftt] = detail::t_derivs(f, i, j);
      out(i, j) = ftt - ft + theta_lap(geo, f, i, j);
    }
  return out;
}

double Residual::sup() const { return std::max(phi.sup_norm(), v.sup_norm()); }

double Residual::sup_interior() const {
  const CylinderGrid& g = phi.grid();
  double m = 0.0;
  for (int i = 1; i + 1 < g.n_t(); ++i)
    for (int j = 0; j < g.n_theta(); ++j)
      m = std::max({m, std::fabs(phi(i, j)), std::fabs(v(i, j))});
  return m;
}

std::vector<double> slice_v_fluxes(const MapState& s, int i) {
  const CylinderGrid& g = s.grid();
  const ThetaGeometry geo(g.n_theta());
  const int n = g.n_theta();
  std::vector<double> F(n + 1);
  for (int f = 0; f <= n; ++f) {
    double psi_f, dv;
    if (f == 0) {
      psi_f = s.psi(i, 0);
      dv = s.v(i, 0) - s.north_trace();
    } else if (f == n) {
      psi_f = s.psi(i, n - 1);
      dv = s.south_trace() - s.v(i, n - 1);
    } else {
      psi_f = 0.5 * (s.psi(i, f - 1) + s.psi(i, f));
      dv = s.v(i, f) - s.v(i, f - 1);
    }
    F[f] = std::exp(4 * psi_f) / geo.s3_face[f] * dv;
  }
  return F;
}

Residual residual(const MapState& s) {
  const CylinderGrid& g = s.grid();
  if (!s.phi.all_finite() || !s.v.all_finite())
    fail(ErrorCode::InvariantBreach, "residual of a non-finite state");
  const ThetaGeometry geo(g.n_theta());
  Residual r{Field(g), Field(g)};
  const int nt = g.n_t(), n = g.n_theta();
  parallel_for(nt, [&](int i) {
    for (int j = 0; j < n; ++j) {
      const detail::NodeGeom ng = detail::node_geom(s, geo, i, j);
      const auto P = detail::gather(s.phi, i, j);
      const auto V = detail::gather(s.v, i, j);
      if (i > 0 && i + 1 < nt) {
        const auto nr = detail::interior_residual<double>(ng, P, V);
        r.phi(i, j) = nr.phi;
        r.v(i, j) = nr.dv / nr.e_c;
        continue;
      }
      // t-boundary rows: same theta fluxes, one-sided t derivatives
      const double psi_c = P.c - ng.g_c;
      const double sn = ng.sin_c;
      const double e4 = std::exp(4 * psi_c);
      const double e_c = e4 / (sn * sn * sn * sn);
      const auto f = detail::theta_fluxes<double>(ng, psi_c, P.jm - ng.g_jm,
                                                  P.jp - ng.g_jp, V.c, V.jm, V.jp);
      const double f_node = 0.5 * (f.fm + f.fp);
      const auto [pt, ptt] = detail::t_derivs(s.phi, i, j);
      const auto [vt, vtt] = detail::t_derivs(s.v, i, j);
      const double gt = (s.omega.log_ratio(g.t(i) + 1e-6, geo.theta[j]) -
                         s.omega.log_ratio(g.t(i) - 1e-6, geo.theta[j])) / 2e-6;
      const double psi_t = pt - gt;
      r.phi(i, j) = ptt - pt + theta_lap(geo, s.phi, i, j) -
                    2 * (e_c * vt * vt + f_node * f_node * sn * sn / e4) - ng.llnw;
      r.v(i, j) = vtt - vt + 4 * psi_t * vt + (f.fp - f.fm) / (sn * geo.h * e_c);
    }
  });
  return r;
}

Field homogenize_renormalizer(const Renormalizer& omega, const CylinderGrid& g) {
  const ThetaGeometry geo(g.n_theta());
  const int nt = g.n_t(), n = g.n_theta();
  const int rows = (nt - 2) * n;
  const double dt = g.dt(), h2 = geo.h * geo.h;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(rows);
  auto id = [&](int i, int j) { return (i - 1) * n + j; };
  for (int i = 1; i + 1 < nt; ++i)
    for (int j = 0; j < n; ++j) {
      const int r = id(i, j);
      rhs[r] = omega.lap_log_omega(g.t(i), geo.theta[j]);
      const double ct = 1 / (dt * dt);
      const double c1 = 1 / (2 * dt);
      double diag = -2 * ct;
      if (i - 1 >= 1) trip.emplace_back(r, id(i - 1, j), ct + c1);
      if (i + 1 <= nt - 2) trip.emplace_back(r, id(i + 1, j), ct - c1);
      const double w = 1 / (geo.sin_node[j] * h2);
      if (j > 0) {
        trip.emplace_back(r, id(i, j - 1), geo.sin_face[j] * w);
        diag -= geo.sin_face[j] * w;
      }
      if (j + 1 < n) {
        trip.emplace_back(r, id(i, j + 1), geo.sin_face[j + 1] * w);
        diag -= geo.sin_face[j + 1] * w;
      }
      trip.emplace_back(r, r, diag);
    }
  Eigen::SparseMatrix<double> A(rows, rows);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    fail(ErrorCode::SingularJacobian, "homogenization factorization failed");
  const Eigen::VectorXd x = lu.solve(rhs);
  Field xi(g);
  for (int i = 1; i + 1 < nt; ++i)
    for (int j = 0; j < n; ++j) xi(i, j) = x[id(i, j)];
  return xi;
}

double sphere_energy(const MapState& s, int i) {
  const CylinderGrid& g = s.grid();
  const ThetaGeometry geo(g.n_theta());
  const int n = g.n_theta();
  double grad_phi = 0, twist = 0, source = 0;
  for (int f = 1; f < n; ++f) {
    const double d = s.phi(i, f) - s.phi(i, f - 1);
    grad_phi += geo.sin_face[f] * d * d / geo.h;
  }
  const std::vector<double> F = slice_v_fluxes(s, i);
  for (int f = 0; f <= n; ++f) {
    const double dv = face_dv(s, i, f);
    twist += F[f] * dv;
  }
  for (int j = 0; j < n; ++j)
    source += 2 * s.omega.lap_log_omega(g.t(i), geo.theta[j]) * s.phi(i, j) *
              geo.sin_node[j] * geo.h;
  return M_PI * (grad_phi + twist + source);
}

double kinetic_energy(const MapState& s, int i) {
  const CylinderGrid& g = s.grid();
  const ThetaGeometry geo(g.n_theta());
  double k = 0;
  for (int j = 0; j < g.n_theta(); ++j) {
    const double pt = detail::t_derivs(s.phi, i, j).first;
    const double vt = detail::t_derivs(s.v, i, j).first;
    const double sn = geo.sin_node[j];
    const double e = std::exp(4 * s.psi(i, j)) / (sn * sn * sn * sn);
    k += geo.h * sn * (pt * pt + e * vt * vt);
  }
  return M_PI * k;
}

double EnergyLedger::max_interior_drift() const {
  double m = 0;
  for (std::size_t i = 1; i + 1 < drift.size(); ++i)
    m = std::max(m, std::fabs(drift[i]));
  return m;
}

EnergyLedger monotonicity_check(const MapState& s) {
  if (!s.omega.t_independent())
    fail(ErrorCode::Config,
         "monotonicity check needs a t-independent renormalizer; '" +
             s.omega.name() + "' depends on t");
  const CylinderGrid& g = s.grid();
  const int nt = g.n_t();
  EnergyLedger L;
  L.t.resize(nt);
  L.energy.resize(nt);
  L.kinetic.resize(nt);
  L.drift.resize(nt);
  for (int i = 0; i < nt; ++i) {
    L.t[i] = g.t(i);
    L.energy[i] = sphere_energy(s, i);
    L.kinetic[i] = kinetic_energy(s, i);
  }
  const double dt = g.dt();
  auto G = [&](int i) { return L.kinetic[i] - L.energy[i]; };
  for (int i = 0; i < nt; ++i) {
    double dG;
    if (i == 0)
      dG = (-3 * G(0) + 4 * G(1) - G(2)) / (2 * dt);
    else if (i == nt - 1)
      dG = (3 * G(i) - 4 * G(i - 1) + G(i - 2)) / (2 * dt);
    else
      dG = (G(i + 1) - G(i - 1)) / (2 * dt);
    L.drift[i] = dG - 2 * L.kinetic[i];
  }
  return L;
}

double energy_identity_check(const MapState& s, int i) {
  const CylinderGrid& g = s.grid();
  require(i >= 0 && i < g.n_t(), "energy identity slice out of range");
  const int last = g.n_t() - 1;
  std::vector<double> K(g.n_t());
  for (int k = i; k <= last; ++k) K[k] = kinetic_energy(s, k);
  double integral = 0;
  for (int k = i; k < last; ++k) integral += 0.5 * g.dt() * (2 * K[k] + 2 * K[k + 1]);
  return std::fabs(sphere_energy(s, i) - sphere_energy(s, last) - integral -
                   K[i] + K[last]);
}

LocalEnergyBound local_energy_bound(const MapState& s, double R) {
  const CylinderGrid& g = s.grid();
  require(R > 0 && R < 2, "local energy bound needs 0 < R < 2");
  require(g.t_max() - g.t_min() >= 4.0 - 1e-12,
          "local energy bound needs a t-interval of length >= 4");
  const double c = 0.5 * (g.t_min() + g.t_max());
  const ThetaGeometry geo(g.n_theta());
  const int n = g.n_theta();
  double lambda = 1.0;
  std::vector<double> density(g.n_t(), 0.0);
  for (int i = 0; i < g.n_t(); ++i) {
    const double t = g.t(i);
    if (std::fabs(t - c) <= 2.0)
      for (int j = 0; j < n; ++j) lambda = std::max(lambda, std::fabs(s.phi(i, j)));
    if (std::fabs(t - c) > R + 1e-12) continue;
    double e = 0;
    for (int f = 1; f < n; ++f) {
      const double d = s.phi(i, f) - s.phi(i, f - 1);
      e += geo.sin_face[f] * d * d / geo.h;
    }
    const std::vector<double> F = slice_v_fluxes(s, i);
    for (int f = 0; f <= n; ++f) {
      const double dv = face_dv(s, i, f);
      e += F[f] * dv;
    }
    for (int j = 0; j < n; ++j) {
      const double pt = detail::t_derivs(s.phi, i, j).first;
      const double vt = detail::t_derivs(s.v, i, j).first;
      const double sn = geo.sin_node[j];
      e += geo.h * sn * (pt * pt + std::exp(4 * s.psi(i, j)) / std::pow(sn, 4) * vt * vt);
    }
    density[i] = 2 * M_PI * e;
  }
  double lhs = 0;
  for (int i = 0; i + 1 < g.n_t(); ++i)
    if (std::fabs(g.t(i) - c) <= R + 1e-12 && std::fabs(g.t(i + 1) - c) <= R + 1e-12)
      lhs += 0.5 * g.dt() * (density[i] + density[i + 1]);
  const double rhs = 5000 * lambda * lambda / ((2 - R) * (2 - R));
  return {c, R, lhs, rhs, lambda, lhs <= rhs};
}

}  // namespace singmap
