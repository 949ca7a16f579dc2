#include "singmap/closed_forms.hpp"

#include <cmath>
#include <string>

#include "singmap/errors.hpp"

namespace singmap {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double log_cosh(double x) {
  const double ax = std::fabs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - kLn2;
}

// ln(2 sinh^2 x) without overflow; -inf at x = 0.
double log_two_sinh_sq(double x) {
  const double ax = std::fabs(x);
  if (ax == 0.0) return -INFINITY;
  if (ax < 1.0) return std::log(2.0) + 2.0 * std::log(std::sinh(ax));
  return 2.0 * ax + 2.0 * std::log1p(-std::exp(-2.0 * ax)) - kLn2;
}

double log_add(double x, double y) {
  if (x == -INFINITY) return y;
  if (y == -INFINITY) return x;
  const double hi = std::max(x, y), lo = std::min(x, y);
  return hi + std::log1p(std::exp(lo - hi));
}

// w = 1/2 acosh(1 + delta) given ln(delta)
double half_acosh_one_plus(double log_delta) {
  if (log_delta == -INFINITY) return 0.0;
  if (log_delta > 40.0) return 0.5 * (log_delta + kLn2);
  const double d = std::exp(log_delta);
  return 0.5 * std::log1p(d + std::sqrt(d * (2.0 + d)));
}

void check_open_theta(double theta) {
  if (!(theta > 0.0 && theta < M_PI))
    fail(ErrorCode::Config,
         "raw height requested at theta=" + std::to_string(theta) +
             " outside (0, pi)");
}

}  // namespace

KerrParams::KerrParams(double mass) : m(mass) {
  require(std::isfinite(m) && m > 0.0, "Kerr mass must be positive");
}

TangentParams::TangentParams(double a_, double b_) : a(a_), b(b_) {
  require(std::isfinite(a) && a > 0.0, "tangent parameter a must be positive");
  require(std::isfinite(b) && std::fabs(b) <= 1.0 - 1e-12,
          "tangent parameter b must satisfy |b| <= 1 - 1e-12");
}

double TangentParams::atanh_b() const {
  return 0.5 * std::log1p(2.0 * b / (1.0 - b));
}

double kerr_phi(const KerrParams& p, double r, double theta) {
  require(r >= 0.0, "Kerr radius must be nonnegative");
  const double m = p.m, c = std::cos(theta), s = std::sin(theta);
  const double rm = r + m;
  const double sigma = rm * rm + m * m * c * c;
  const double q = rm * rm + m * m + 2.0 * m * m * m * rm * s * s / sigma;
  return -0.5 * std::log(q);
}

double kerr_v(const KerrParams& p, double r, double theta) {
  require(r >= 0.0, "Kerr radius must be nonnegative");
  const double m = p.m, c = std::cos(theta), s = std::sin(theta);
  const double rm = r + m;
  const double sigma = rm * rm + m * m * c * c;
  const double s2 = s * s;
  return m * m * c * (3.0 - c * c) + m * m * m * m * s2 * s2 * c / sigma;
}

HyperbolicPoint kerr_map(const KerrParams& p, double r, double theta) {
  check_open_theta(theta);
  return {kerr_phi(p, r, theta) - std::log(std::sin(theta)),
          kerr_v(p, r, theta)};
}

double tangent_phi(const TangentParams& p, double theta) {
  const double c = std::cos(theta);
  const double D = tangent_denominator(p.b, c);
  return -0.5 * std::log(2.0 * p.a * std::sqrt(1.0 - p.b * p.b) / D);
}

double tangent_v(const TangentParams& p, double theta) {
  const double c = std::cos(theta);
  const double D = tangent_denominator(p.b, c);
  return p.a * (p.b * (1.0 + c * c) + 2.0 * c) / D;
}

double tangent_phi_dtheta(const TangentParams& p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return -s * (c + p.b) / tangent_denominator(p.b, c);
}

double tangent_v_dtheta(const TangentParams& p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta), b = p.b;
  const double D = tangent_denominator(b, c);
  const double N = b * (1.0 + c * c) + 2.0 * c;
  const double dN = -2.0 * s * (b * c + 1.0);
  const double dD = -2.0 * s * (c + b);
  return p.a * (dN * D - N * dD) / (D * D);
}

HyperbolicPoint tangent_map(const TangentParams& p, double theta) {
  check_open_theta(theta);
  return {tangent_phi(p, theta) - std::log(std::sin(theta)),
          tangent_v(p, theta)};
}

double arclength_of(double theta) { return std::log(std::tan(0.5 * theta)); }

HyperbolicPoint tangent_map_arclength(const TangentParams& p, double s) {
  const double x = -2.0 * s + p.atanh_b();
  return {0.5 * (log_cosh(x) - std::log(2.0 * p.a)), p.a * std::tanh(x)};
}

double hyperbolic_distance(const HyperbolicPoint& P, const HyperbolicPoint& Q) {
  const double dv = std::fabs(P.v - Q.v);
  double log_delta = log_two_sinh_sq(P.u - Q.u);
  if (dv > 0.0)
    log_delta = log_add(log_delta,
                        kLn2 + 2.0 * (P.u + Q.u) + 2.0 * std::log(dv));
  return half_acosh_one_plus(log_delta);
}

double hyperbolic_distance_reg(double phi1, double v1, double phi2, double v2,
                               double sin_theta) {
  const double dv = std::fabs(v1 - v2);
  double log_delta = log_two_sinh_sq(phi1 - phi2);
  if (dv > 0.0)
    log_delta = log_add(log_delta, kLn2 + 2.0 * (phi1 + phi2) -
                                       4.0 * std::log(sin_theta) +
                                       2.0 * std::log(dv));
  return half_acosh_one_plus(log_delta);
}

double v0_profile(double a, double theta) {
  const double c = std::cos(theta);
  return 0.5 * a * c * (3.0 - c * c);
}

NHGComponents nhg_metric(const TangentParams& p, double rbar, double theta) {
  require(rbar > 0.0, "near-horizon radius must be positive");
  const double c = std::cos(theta), s = std::sin(theta);
  const double D = tangent_denominator(p.b, c);
  const double k = p.a * std::sqrt(1.0 - p.b * p.b);
  const double gpp = 2.0 * k * s * s / D;
  const double frame = rbar / p.a;  // dphi + (rbar/a) dtau
  NHGComponents g;
  g.g_phiphi = gpp;
  g.g_tphi = gpp * frame;
  g.g_tt = -rbar * rbar * D / (2.0 * k) + gpp * frame * frame;
  g.g_rr = 0.5 * k * D / (rbar * rbar);
  g.g_thth = 0.5 * k * D;
  return g;
}

JacobiFields jacobi_fields(const TangentParams& p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta), b = p.b;
  const double D = tangent_denominator(b, c);
  const double s2 = s * s;
  JacobiFields j;
  j.phi_b = {0.5 * b / (1.0 - b * b) + c / D, p.a * s2 * s2 / (D * D)};
  j.phi_a = {-0.5 / p.a, (b * (1.0 + c * c) + 2.0 * c) / D};
  return j;
}

}  // namespace singmap
