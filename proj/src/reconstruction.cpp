#include "singmap/reconstruction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "singmap/cylinder_ops.hpp"
#include "singmap/errors.hpp"
#include "singmap/parallel.hpp"
#include "singmap/regression.hpp"

namespace singmap {

namespace {

struct NodeData {
  double psi, psi_t, psi_th, v_t, F;  // F = e^{4 psi} v_theta / sin^3
};

// Node quantities shared by both quadratures. theta derivatives of psi use
// the even reflection across the poles; F averages the two face fluxes.
std::vector<NodeData> node_data(const MapState& s) {
  const CylinderGrid& g = s.grid();
  const int n = g.n_theta(), nt = g.n_t();
  const double h = g.dtheta();
  Field psi(g);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < n; ++j) psi(i, j) = s.psi(i, j);
  std::vector<NodeData> out(std::size_t(nt) * n);
  for (int i = 0; i < nt; ++i) {
    const std::vector<double> F = slice_v_fluxes(s, i);
    for (int j = 0; j < n; ++j) {
      NodeData& d = out[std::size_t(i) * n + j];
      d.psi = psi(i, j);
      d.psi_t = detail::t_derivs(psi, i, j).first;
      d.v_t = detail::t_derivs(s.v, i, j).first;
      const double lo = psi(i, std::max(j - 1, 0)), hi = psi(i, std::min(j + 1, n - 1));
      d.psi_th = (hi - lo) / (2 * h);
      d.F = 0.5 * (F[j] + F[j + 1]);
    }
    // The pole faces carry the ghost-trace coupling, not an accurate flux.
    // F is even across each pole, so the end nodes take the value linear in
    // sin^2 through the two nearest interior faces.
    if (n >= 3) {
      auto ext = [&](int node, int f1, int f2) {
        const double x = std::pow(std::sin(g.theta(node)), 2);
        const double x1 = std::pow(std::sin(f1 * h), 2), x2 = std::pow(std::sin(f2 * h), 2);
        out[std::size_t(i) * n + node].F = F[f1] + (F[f2] - F[f1]) * (x - x1) / (x2 - x1);
      };
      ext(0, 1, 2);
      ext(n - 1, n - 1, n - 2);
    }
  }
  return out;
}

struct OneForm {
  Field ft, fth;
};

Quadrature integrate(const OneForm& f, int jref) {
  const CylinderGrid& g = f.ft.grid();
  const int n = g.n_theta(), nt = g.n_t();
  const int iref = nt - 1;
  const double dt = g.dt(), h = g.dtheta();
  auto sweep_theta = [&](Field& out, int i) {
    for (int j = jref + 1; j < n; ++j)
      out(i, j) = out(i, j - 1) + 0.5 * h * (f.fth(i, j - 1) + f.fth(i, j));
    for (int j = jref - 1; j >= 0; --j)
      out(i, j) = out(i, j + 1) - 0.5 * h * (f.fth(i, j) + f.fth(i, j + 1));
  };
  auto sweep_t = [&](Field& out, int j) {
    for (int i = iref - 1; i >= 0; --i)
      out(i, j) = out(i + 1, j) - 0.5 * dt * (f.ft(i, j) + f.ft(i + 1, j));
  };
  Quadrature q{Field(g), Field(g), 0};
  sweep_t(q.value, jref);
  for (int i = 0; i < nt; ++i) sweep_theta(q.value, i);
  Field swapped(g);
  sweep_theta(swapped, iref);
  for (int j = 0; j < n; ++j) sweep_t(swapped, j);
  for (std::size_t k = 0; k < swapped.values().size(); ++k)
    q.path_defect = std::max(q.path_defect, std::fabs(swapped.values()[k] - q.value.values()[k]));
  for (int i = 0; i + 1 < nt; ++i)
    for (int j = 0; j + 1 < n; ++j) {
      const double dth = 0.5 * (f.fth(i + 1, j) + f.fth(i + 1, j + 1) - f.fth(i, j) - f.fth(i, j + 1)) / dt;
      const double dtt = 0.5 * (f.ft(i, j + 1) + f.ft(i + 1, j + 1) - f.ft(i, j) - f.ft(i + 1, j)) / h;
      q.curl(i, j) = dth - dtt;
    }
  return q;
}

}  // namespace

namespace {

double curl_max(const Field& curl, double th_lo, double th_hi) {
  const CylinderGrid& g = curl.grid();
  const int lo = g.n_t() > 3 ? 1 : 0, hi = g.n_t() > 3 ? g.n_t() - 3 : g.n_t() - 2;
  double m = 0;
  for (int i = lo; i <= hi; ++i)
    for (int j = 0; j + 1 < g.n_theta(); ++j) {
      const double th = 0.5 * (g.theta(j) + g.theta(j + 1));
      if (th >= th_lo && th <= th_hi) m = std::max(m, std::fabs(curl(i, j)));
    }
  return m;
}

}  // namespace

double Quadrature::curl_sup() const { return curl_max(curl, 0, M_PI); }

double Quadrature::curl_window_sup() const { return curl_max(curl, M_PI / 6, 5 * M_PI / 6); }

int reference_theta_index(int n_theta) { return n_theta / 2; }

Quadrature integrate_w(const MapState& s) {
  const CylinderGrid& g = s.grid();
  const ThetaGeometry geo(g.n_theta());
  const int n = g.n_theta();
  const std::vector<NodeData> nd = node_data(s);
  OneForm f{Field(g), Field(g)};
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < n; ++j) {
      const NodeData& d = nd[std::size_t(i) * n + j];
      const double sn = geo.sin_node[j], r = std::exp(-g.t(i));
      f.ft(i, j) = 2 * r * d.F;
      f.fth(i, j) = -2 * r * std::exp(4 * d.psi) * d.v_t / (sn * sn * sn);
    }
  return integrate(f, reference_theta_index(n));
}

Quadrature integrate_alpha(const MapState& s) {
  const CylinderGrid& g = s.grid();
  const ThetaGeometry geo(g.n_theta());
  const int n = g.n_theta();
  const std::vector<NodeData> nd = node_data(s);
  OneForm f{Field(g), Field(g)};
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < n; ++j) {
      const NodeData& d = nd[std::size_t(i) * n + j];
      const double sn = geo.sin_node[j], c = geo.cos_node[j], s2 = sn * sn;
      const double pt = d.psi_t, ph = d.psi_th, F = d.F, vt = d.v_t;
      const double e4 = std::exp(4 * d.psi);
      // twist contributions written through F so the poles stay regular
      const double twist_sq = F * F * s2 * s2 / e4;  // e^{4 psi} v_theta^2 / sin^2
      const double vt_sq = e4 * vt * vt / (s2 * sn);  // e^{4 psi} v_t^2 / sin^3
      f.ft(i, j) = 2 * s2 * pt - s2 - s2 * pt * pt + s2 * ph * ph - 2 * sn * c * ph +
                   2 * sn * c * pt * ph + twist_sq - vt_sq * sn + 2 * c * vt * F;
      f.fth(i, j) = 2 * s2 * ph + sn * c * ph * ph - sn * c - sn * c * pt * pt -
                    2 * s2 * pt * ph + 2 * sn * c * pt + c * twist_sq / sn - c * vt_sq -
                    2 * sn * vt * F;
    }
  return integrate(f, reference_theta_index(n));
}

std::pair<double, double> alpha_pole_limits(const Field& alpha, int i) {
  const CylinderGrid& g = alpha.grid();
  const int n = g.n_theta();
  const ThetaGeometry geo(n);
  std::vector<double> x, yn, ys;
  for (int k = 0; k < 3; ++k) {
    const double sn = geo.sin_node[k];
    x.push_back(sn * sn);
    yn.push_back(alpha(i, k));
    ys.push_back(alpha(i, n - 1 - k));
  }
  return {extrapolate_to_zero(x, yn, {0, 1, 2}), extrapolate_to_zero(x, ys, {0, 1, 2})};
}

MetricFields reconstruct(const MapState& s, AlphaGauge gauge,
                         const std::optional<TangentParams>& tangent) {
  const CylinderGrid& g = s.grid();
  if (gauge == AlphaGauge::NearHorizon && !tangent)
    fail(ErrorCode::Config, "near-horizon gauge needs the tangent parameters");
  Quadrature qw = integrate_w(s);
  Quadrature qa = integrate_alpha(s);
  MetricFields mf{Field(g), std::move(qw.value), std::move(qa.value), Field(g)};
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) {
      mf.U(i, j) = s.psi(i, j) - g.t(i);
      mf.integrability_residual(i, j) = std::max(std::fabs(qw.curl(i, j)), std::fabs(qa.curl(i, j)));
    }
  mf.w_curl = qw.curl_sup();
  mf.alpha_curl = qa.curl_sup();
  mf.w_curl_window = qw.curl_window_sup();
  mf.alpha_curl_window = qa.curl_window_sup();
  mf.w_path_defect = qw.path_defect;
  mf.alpha_path_defect = qa.path_defect;
  mf.gauge = gauge;
  mf.theta_ref = reference_theta_index(g.n_theta());

  const int last = g.n_t() - 1;
  if (gauge == AlphaGauge::NorthRod) {
    // the north limit is constant along the rod; average it over slices
    double north = 0;
    for (int i = 0; i <= last; ++i) north += alpha_pole_limits(mf.alpha, i).first;
    mf.alpha_shift = -north / g.n_t();
  } else {
    const ThetaGeometry geo(g.n_theta());
    double mean = 0;
    for (int j = 0; j < g.n_theta(); ++j)
      mean += mf.alpha(last, j) - std::log(tangent_denominator(tangent->b, geo.cos_node[j]));
    mean /= g.n_theta();
    mf.alpha_shift = -std::log(2.0) - mean;
  }
  for (double& x : mf.alpha.values()) x += mf.alpha_shift;
  if (!mf.w.all_finite() || !mf.alpha.all_finite())
    fail(ErrorCode::InvariantBreach, "metric quadrature produced non-finite values");
  return mf;
}

double rod_force(double b_l) { return 0.25 * std::expm1(-b_l); }

DefectReport angle_defects(const MetricFields& mf, double b_fit) {
  require(std::fabs(b_fit) < 1, "fitted b must lie in (-1, 1)");
  const CylinderGrid& g = mf.alpha.grid();
  require(g.n_theta() >= 6, "angle defects need >= 6 theta nodes");
  // endpoint rows carry one-sided t differences; skip them when possible
  const int lo = g.n_t() > 2 ? 1 : 0, hi = g.n_t() > 2 ? g.n_t() - 2 : g.n_t() - 1;
  DefectReport r;
  double nmin = INFINITY, nmax = -INFINITY, smin = INFINITY, smax = -INFINITY;
  for (int i = lo; i <= hi; ++i) {
    const auto [north, south] = alpha_pole_limits(mf.alpha, i);
    if (!std::isfinite(north) || !std::isfinite(south))
      fail(ErrorCode::FitUnstable, "pole extrapolation of alpha diverged");
    r.b_north += north;
    r.b_south += south;
    nmin = std::min(nmin, north);
    nmax = std::max(nmax, north);
    smin = std::min(smin, south);
    smax = std::max(smax, south);
  }
  const int count = hi - lo + 1;
  r.b_north /= count;
  r.b_south /= count;
  r.rod_variation_north = nmax - nmin;
  r.rod_variation_south = smax - smin;
  r.force_north = rod_force(r.b_north);
  r.force_south = rod_force(r.b_south);
  r.difference = r.b_north - r.b_south;
  r.predicted = std::log1p(b_fit) - std::log1p(-b_fit);
  r.mismatch = std::fabs(r.difference - r.predicted);
  return r;
}

double nhg_distance(const std::vector<NHGComponents>& g, const std::vector<NHGComponents>& ref) {
  require(g.size() == ref.size() && !g.empty(), "profile size mismatch");
  double worst = 0;
  auto comp = [&](double NHGComponents::*m) {
    double num = 0, den = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      num = std::max(num, std::fabs(g[k].*m - ref[k].*m));
      den = std::max(den, std::fabs(ref[k].*m));
    }
    worst = std::max(worst, den > 0 ? num / den : num);
  };
  comp(&NHGComponents::g_tt);
  comp(&NHGComponents::g_tphi);
  comp(&NHGComponents::g_phiphi);
  comp(&NHGComponents::g_rr);
  comp(&NHGComponents::g_thth);
  return worst;
}

namespace {

// 4-point Lagrange interpolation of row values in t
double interp_t(const Field& f, double t, int j) {
  const CylinderGrid& g = f.grid();
  const int nt = g.n_t();
  int i0 = int(std::floor((t - g.t_min()) / g.dt())) - 1;
  i0 = std::clamp(i0, 0, std::max(nt - 4, 0));
  const int m = std::min(4, nt);
  double out = 0;
  for (int a = 0; a < m; ++a) {
    double l = 1;
    for (int b = 0; b < m; ++b)
      if (b != a) l *= (t - g.t(i0 + b)) / (g.t(i0 + a) - g.t(i0 + b));
    out += l * f(i0 + a, j);
  }
  return out;
}

}  // namespace

NHGLimitReport nhg_limit(const MapState& s, const std::vector<double>& eps,
                         const TangentParams& reference, double rbar) {
  const CylinderGrid& g = s.grid();
  require(!eps.empty(), "empty epsilon ladder");
  require(rbar > 0, "rbar must be positive");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    require(eps[k] > 0, "epsilon must be positive");
    if (k > 0) require(eps[k] < eps[k - 1], "epsilon ladder must decrease");
    const double t = -std::log(eps[k] * rbar);
    if (t < g.t_min() || t > g.t_max())
      fail(ErrorCode::Config, "epsilon ladder not resolved by the grid: t = " + std::to_string(t) +
                                  " outside [" + std::to_string(g.t_min()) + ", " +
                                  std::to_string(g.t_max()) + "]");
  }
  require(g.n_t() >= 4, "near-horizon limit needs >= 4 slices");

  const MetricFields north = reconstruct(s, AlphaGauge::NorthRod);
  const MetricFields mf = reconstruct(s, AlphaGauge::NearHorizon, reference);
  const ThetaGeometry geo(g.n_theta());
  const int n = g.n_theta(), last = g.n_t() - 1, jref = mf.theta_ref;

  NHGLimitReport rep;
  rep.eps = eps;
  rep.reference = reference;
  rep.rbar = rbar;
  rep.theta = geo.theta;

  // w0 and dw/dr at r = 0 from the three smallest radii on the reference angle
  {
    Eigen::Matrix3d A;
    Eigen::Vector3d y;
    for (int k = 0; k < 3; ++k) {
      const double r = std::exp(-g.t(last - k));
      A(k, 0) = 1;
      A(k, 1) = r;
      A(k, 2) = r * r;
      y[k] = mf.w(last - k, jref);
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
    rep.w0 = c[0];
    rep.w_slope = c[1];
    rep.omega = -rep.w0;
  }
  for (int j = 0; j < n; ++j)
    rep.alpha0 += north.alpha(last, j) - std::log(tangent_denominator(reference.b, geo.cos_node[j]));
  rep.alpha0 /= n;

  std::vector<NHGComponents> ref(n);
  for (int j = 0; j < n; ++j) ref[j] = nhg_metric(reference, rbar, geo.theta[j]);

  const int m = int(eps.size());
  rep.t.resize(m);
  rep.distance.resize(m);
  rep.profiles.resize(m);
  Field psi(g);
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < n; ++j) psi(i, j) = s.psi(i, j);
  parallel_for(m, [&](int k) {
    const double t = -std::log(eps[k] * rbar);
    rep.t[k] = t;
    std::vector<NHGComponents> prof(n);
    for (int j = 0; j < n; ++j) {
      const double p = interp_t(psi, t, j), al = interp_t(mf.alpha, t, j);
      const double dw = (interp_t(mf.w, t, j) - rep.w0) / eps[k];
      const double sn = geo.sin_node[j];
      const double ephi = std::exp(-2 * p) * sn * sn;
      prof[j].g_tt = -rbar * rbar * std::exp(2 * p) + ephi * dw * dw;
      prof[j].g_tphi = ephi * dw;
      prof[j].g_phiphi = ephi;
      prof[j].g_thth = std::exp(-2 * p + 2 * al);
      prof[j].g_rr = prof[j].g_thth / (rbar * rbar);
    }
    rep.distance[k] = nhg_distance(prof, ref);
    rep.profiles[k] = std::move(prof);
  });
  rep.monotone = true;
  for (int k = 1; k < m; ++k) rep.monotone = rep.monotone && rep.distance[k] < rep.distance[k - 1];
  return rep;
}

}  // namespace singmap
