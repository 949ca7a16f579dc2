#include "singmap/asymptotics.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "singmap/errors.hpp"
#include "singmap/regression.hpp"
#include "singmap/spectral.hpp"

namespace singmap {

namespace {

// 1 - cos and 1 + cos without cancellation
double one_minus_cos(double th) {
  const double s = std::sin(0.5 * th);
  return 2 * s * s;
}
double one_plus_cos(double th) {
  const double c = std::cos(0.5 * th);
  return 2 * c * c;
}

struct SliceView {
  const MapState& s;
  const ThetaGeometry& geo;
  int i;
  double psi(int j) const { return s.psi(i, j); }
  double v(int j) const { return s.v(i, j); }
};

// weighted L^2 misfit of slice i against tangent(a, b), and its b-derivative
std::pair<double, double> misfit(const SliceView& sv, double a, double b,
                                 double center) {
  const TangentParams p(a, b);
  double J = 0, dJ = 0;
  for (int j = 0; j < sv.geo.n; ++j) {
    const double th = sv.geo.theta[j], sn = sv.geo.sin_node[j];
    const double w = sv.geo.h * sn, s4 = sn * sn * sn * sn;
    const double e1 = sv.psi(j) - tangent_phi(p, th);
    const double e2 = sv.v(j) - center - tangent_v(p, th);
    const JacobiFields jf = jacobi_fields(p, th);
    J += w * (e1 * e1 + e2 * e2 / s4);
    dJ -= 2 * w * (e1 * jf.phi_b.first + e2 * jf.phi_b.second / s4);
  }
  return {J, dJ};
}

double slice_distance(const SliceView& sv, const TangentParams& p, double center) {
  double d = 0;
  for (int j = 0; j < sv.geo.n; ++j) {
    const double th = sv.geo.theta[j];
    d = std::max(d, hyperbolic_distance_reg(sv.psi(j), sv.v(j) - center,
                                            tangent_phi(p, th), tangent_v(p, th),
                                            sv.geo.sin_node[j]));
  }
  return d;
}

std::vector<int> window_slices(const CylinderGrid& g,
                               const std::optional<std::pair<double, double>>& w,
                               int exclude) {
  std::vector<int> out;
  for (int i = exclude; i < g.n_t() - exclude; ++i) {
    const double t = g.t(i);
    if (w && (t < w->first - 1e-12 || t > w->second + 1e-12)) continue;
    out.push_back(i);
  }
  return out;
}

ModeExponent log_rate(const std::vector<double>& t, const std::vector<double>& amp,
                      double floor) {
  ModeExponent e;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (std::fabs(amp[k]) > floor) {
      x.push_back(t[k]);
      y.push_back(std::log(std::fabs(amp[k])));
    }
  if (x.size() < 3 || x.size() < t.size() / 2) return e;
  const LinearFit f = ols(x, y);
  e.value = f.slope;
  e.r2 = f.r2;
  e.reported = true;
  return e;
}

void require_linear_growth(const MapState& s) {
  if (s.omega.kind() != RenormalizerKind::LinearGrowth)
    fail(ErrorCode::Config, "expansion at infinity needs the rho renormalizer, got '" +
                                s.omega.name() + "'");
}

// Least squares of f against the columns of B with diagonal weights w, by
// Householder QR of W^{1/2} B. Returns raw coefficients, orthonormal
// amplitudes and the remainder norm.
struct Projection {
  Eigen::VectorXd coef, amp;
  double remainder = 0, norm2 = 0;
};

Projection project(const Eigen::MatrixXd& B, const Eigen::VectorXd& w,
                   const Eigen::VectorXd& f) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd A = sw.asDiagonal() * B;
  const Eigen::VectorXd y = sw.cwiseProduct(f);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  const int k = int(B.cols());
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), k);
  Projection p;
  p.amp = Q.transpose() * y;
  const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  p.coef = R.triangularView<Eigen::Upper>().solve(p.amp);
  p.remainder = (y - Q * p.amp).norm();
  p.norm2 = y.squaredNorm();
  return p;
}

}  // namespace

std::pair<double, double> pole_traces(const MapState& s, int i) {
  const CylinderGrid& g = s.grid();
  const int n = g.n_theta();
  std::vector<double> xn, yn, xs, ys;
  for (int k = 0; k < 3; ++k) {
    xn.push_back(one_minus_cos(g.theta(k)));
    yn.push_back(s.v(i, k));
    xs.push_back(one_plus_cos(g.theta(n - 1 - k)));
    ys.push_back(s.v(i, n - 1 - k));
  }
  return {extrapolate_to_zero(xn, yn, {0, 2, 3}), extrapolate_to_zero(xs, ys, {0, 2, 3})};
}

TangentFit fit_tangent(const MapState& s, const TangentFitOptions& opt) {
  const CylinderGrid& g = s.grid();
  if (!s.omega.t_independent())
    fail(ErrorCode::Config, "tangent fit needs a t-independent renormalizer");
  require(g.t_max() - g.t_min() >= 3 - 1e-12, "tangent fit needs >= 3 e-folds in t");
  require(g.n_t() > 2 * opt.exclude + 2, "too few slices for the tangent fit");
  const ThetaGeometry geo(g.n_theta());

  // pole traces
  double a_sum = 0, c_sum = 0, a_min = INFINITY, a_max = -INFINITY;
  for (int i = 0; i < g.n_t(); ++i) {
    const auto [north, south] = pole_traces(s, i);
    const double a = 0.5 * (north - south);
    a_sum += a;
    c_sum += 0.5 * (north + south);
    a_min = std::min(a_min, a);
    a_max = std::max(a_max, a);
  }
  const double a = a_sum / g.n_t();
  const double center = c_sum / g.n_t();
  if (!(a > 0) || a_max - a_min > 1e-2 * a)
    fail(ErrorCode::FitUnstable, "pole traces inconsistent across slices (a in [" +
                                     std::to_string(a_min) + ", " +
                                     std::to_string(a_max) + "])");

  // b: coarse scan on the final slice in y = atanh b, ordered by |y| so that
  // near-ties resolve toward smaller |b|, then a root of the joint
  // derivative over the last e-fold
  const int last = g.n_t() - 1;
  const SliceView fin{s, geo, last};
  const double ymax = 10.0;
  const int half = 100;
  double best_y = 0, best_J = misfit(fin, a, 0.0, center).first;
  for (int k = 1; k <= half; ++k)
    for (double sgn : {1.0, -1.0}) {
      const double y = sgn * ymax * k / half;
      const double J = misfit(fin, a, std::tanh(y), center).first;
      if (J < best_J * (1 - 1e-12)) {
        best_J = J;
        best_y = y;
      }
    }
  std::vector<int> joint;
  for (int i = 0; i <= last; ++i)
    if (g.t(i) >= g.t_max() - 1 - 1e-12) joint.push_back(i);
  auto joint_dJ = [&](double y) {
    double d = 0;
    for (int i : joint) d += misfit(SliceView{s, geo, i}, a, std::tanh(y), center).second;
    return d;
  };
  double lo = best_y - ymax / half, hi = best_y + ymax / half;
  double y_star = best_y;
  const double flo = joint_dJ(lo), fhi = joint_dJ(hi);
  if (flo == 0) {
    y_star = lo;
  } else if (fhi == 0) {
    y_star = hi;
  } else if ((flo < 0) != (fhi < 0)) {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        joint_dJ, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
    y_star = 0.5 * (r.first + r.second);
  }
  const double b = std::clamp(std::tanh(y_star), -1 + 1e-12, 1 - 1e-12);

  TangentFit fit;
  fit.params = TangentParams(a, b);
  fit.v_center = center;
  for (int i = 0; i < g.n_t(); ++i) {
    fit.slice_t.push_back(g.t(i));
    fit.residuals.push_back(slice_distance(SliceView{s, geo, i}, fit.params, center));
  }

  std::vector<int> use;
  if (opt.window) {
    use = window_slices(g, opt.window, opt.exclude);
  } else {
    double floor = INFINITY;
    for (int i = opt.exclude; i < g.n_t() - opt.exclude; ++i)
      if (g.t(i) >= g.t_max() - 1 - 1e-12) floor = std::min(floor, fit.residuals[i]);
    const double cut = std::max(opt.floor_factor * floor, 1e-13);
    for (int i = opt.exclude; i < g.n_t() - opt.exclude; ++i) {
      if (!(fit.residuals[i] > cut)) break;
      use.push_back(i);
    }
  }
  std::vector<double> x, y;
  for (int i : use)
    if (fit.residuals[i] > 0) {
      x.push_back(g.t(i));
      y.push_back(std::log(fit.residuals[i]));
    }
  fit.slices_used = int(x.size());
  if (!x.empty()) fit.fit_window = {x.front(), x.back()};
  if (fit.slices_used < opt.min_slices) {
    fit.note = "distance to the fitted tangent map is at the noise floor on all but " +
               std::to_string(fit.slices_used) + " slices; rate not reported";
    return fit;
  }
  const LinearFit lf = ols(x, y);
  fit.r2 = lf.r2;
  fit.beta = -lf.slope;
  if (lf.r2 < opt.min_r2)
    fail(ErrorCode::FitUnstable, "log-linear rate fit has r^2 = " + std::to_string(lf.r2));
  fit.beta_reported = true;
  fit.note = "ok";
  return fit;
}

InfinityFit fit_infinity_u(const MapState& s, const InfinityFitOptions& opt) {
  require_linear_growth(s);
  const CylinderGrid& g = s.grid();
  const ThetaGeometry geo(g.n_theta());
  const int n = g.n_theta();
  const std::vector<int> use = window_slices(g, opt.window, 0);
  require(use.size() >= 3, "expansion fit needs >= 3 slices in the window");

  Eigen::MatrixXd B(n, 3);
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    const double x = geo.cos_node[j];
    B(j, 0) = 1;
    B(j, 1) = x;
    B(j, 2) = 0.5 * (3 * x * x - 1);
    w[j] = geo.h * geo.sin_node[j];
  }
  InfinityFit fit;
  std::vector<double> q[3];
  double scale = 0;
  for (int i : use) {
    Eigen::VectorXd f(n);
    for (int j = 0; j < n; ++j) f[j] = s.phi(i, j);
    const Projection p = project(B, w, f);
    for (int k = 0; k < 3; ++k) q[k].push_back(p.coef[k]);
    fit.u_remainder = std::max(fit.u_remainder, p.remainder);
    fit.parseval_defect = std::max(
        fit.parseval_defect,
        std::fabs(p.norm2 - p.amp.squaredNorm() - p.remainder * p.remainder));
    fit.slice_t.push_back(g.t(i));
    scale = std::max(scale, f.cwiseAbs().maxCoeff());
  }
  const int m = int(use.size());
  const std::vector<double>& t = fit.slice_t;
  // each mode is fitted with its leading term plus the next power of e^t,
  // which at moderate radii is not negligible against the leading one
  double* Y[3] = {&fit.Y0, &fit.Y1, &fit.Y2};
  const double floor = 1e-11 * (1 + scale);
  for (int l = 0; l <= 2; ++l) {
    const int cols = l == 0 ? 3 : 2;
    Eigen::MatrixXd A(m, cols);
    Eigen::VectorXd y(m);
    for (int k = 0; k < m; ++k) {
      int c = 0;
      if (l == 0) A(k, c++) = 1;
      A(k, c++) = std::exp((l + 1) * t[k]);
      A(k, c++) = std::exp((l + 2) * t[k]);
      y[k] = q[l][k];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    const int lead = l == 0 ? 1 : 0;
    if (l == 0) fit.c0 = c[0];
    *Y[l] = c[lead];
    fit.mode_fit_residual = std::max(fit.mode_fit_residual, (A * c - y).cwiseAbs().maxCoeff());
    // exponent of what is left once the constant and correction are removed
    std::vector<double> lead_part(m);
    for (int k = 0; k < m; ++k) lead_part[k] = y[k] - (A.row(k) * c - A(k, lead) * c[lead]);
    fit.exponents[l] = log_rate(t, lead_part, floor);
  }
  return fit;
}

InfinityFit fit_infinity_v(const MapState& s, const InfinityFitOptions& opt) {
  require_linear_growth(s);
  require(opt.twist_modes >= 1, "twist projection needs >= 1 mode");
  const CylinderGrid& g = s.grid();
  const ThetaGeometry geo(g.n_theta());
  const int n = g.n_theta();
  const std::vector<int> use = window_slices(g, opt.window, 0);
  require(use.size() >= 3, "expansion fit needs >= 3 slices in the window");

  InfinityFit fit;
  double a_sum = 0;
  for (int i : use) {
    const auto [north, south] = pole_traces(s, i);
    a_sum += 0.5 * (north - south);
  }
  fit.a_twist = a_sum / use.size();

  const int L = opt.twist_modes;
  Eigen::MatrixXd B(n, L);
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    const double sn = geo.sin_node[j];
    for (int l = 1; l <= L; ++l) B(j, l - 1) = sn * sn * legendre_P2(l + 1, geo.cos_node[j]);
    w[j] = geo.h / (sn * sn * sn);
  }
  std::vector<double> amp1;
  double scale = 0;
  for (int i : use) {
    Eigen::VectorXd f(n);
    for (int j = 0; j < n; ++j)
      f[j] = s.v(i, j) - s.v_shift - v0_profile(fit.a_twist, geo.theta[j]);
    const Projection p = project(B, w, f);
    // w_1 = sin^2 P^2_2 = 3 sin^4
    amp1.push_back(3 * p.coef[0]);
    fit.parseval_defect = std::max(
        fit.parseval_defect,
        std::fabs(p.norm2 - p.amp.squaredNorm() - p.remainder * p.remainder));
    fit.slice_t.push_back(g.t(i));
    scale = std::max(scale, std::fabs(fit.a_twist));
  }
  const int m = int(use.size());
  double num = 0, den = 0;
  for (int k = 0; k < m; ++k) {
    const double e = std::exp(fit.slice_t[k]);
    num += e * amp1[k];
    den += e * e;
  }
  fit.c2 = num / den;

  std::vector<double> tail(m);
  for (int k = 0; k < m; ++k) {
    const int i = use[k];
    double r = 0;
    for (int j = 0; j < n; ++j) {
      const double sn = geo.sin_node[j];
      const double model = s.v_shift + v0_profile(fit.a_twist, geo.theta[j]) +
                           fit.c2 * std::exp(g.t(i)) * sn * sn * sn * sn;
      r = std::max(r, std::fabs(s.v(i, j) - model));
    }
    tail[k] = r;
    fit.v_remainder = std::max(fit.v_remainder, r);
  }
  fit.tail = log_rate(fit.slice_t, tail, 1e-11 * (1 + scale));
  fit.beta = fit.tail.reported ? fit.tail.value - 1 : 0;
  return fit;
}

InfinityFit fit_infinity(const MapState& s, const InfinityFitOptions& opt) {
  InfinityFit u = fit_infinity_u(s, opt);
  const InfinityFit v = fit_infinity_v(s, opt);
  u.a_twist = v.a_twist;
  u.c2 = v.c2;
  u.tail = v.tail;
  u.beta = v.beta;
  u.v_remainder = v.v_remainder;
  u.parseval_defect = std::max(u.parseval_defect, v.parseval_defect);
  return u;
}

}  // namespace singmap
