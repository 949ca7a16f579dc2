#pragma once

// Closed-form solutions of the axisymmetric harmonic map problem into H^2
// with metric du^2 + e^{4u} dv^2: extreme Kerr, the tangent-map family,
// its Jacobi fields and the associated near-horizon metric.
//
// Every "phi" evaluator returns the regularized height u + ln(sin theta),
// which stays finite up to the poles; the raw u is obtained by subtracting
// ln(sin theta) and is only available on the open interval.

#include <utility>

namespace singmap {

struct KerrParams {
  double m;
  explicit KerrParams(double mass);
};

struct TangentParams {
  double a;
  double b;
  TangentParams(double a_, double b_);
  // atanh(b), with the guard |b| <= 1 - 1e-12 enforced at construction
  double atanh_b() const;
};

struct HyperbolicPoint {
  double u;
  double v;
};

struct NHGComponents {
  double g_tt, g_tphi, g_phiphi, g_rr, g_thth;
};

using Pair = std::pair<double, double>;

// ---- extreme Kerr
double kerr_phi(const KerrParams& p, double r, double theta);
double kerr_v(const KerrParams& p, double r, double theta);
HyperbolicPoint kerr_map(const KerrParams& p, double r, double theta);

// ---- tangent maps
double tangent_phi(const TangentParams& p, double theta);
double tangent_v(const TangentParams& p, double theta);
double tangent_phi_dtheta(const TangentParams& p, double theta);
double tangent_v_dtheta(const TangentParams& p, double theta);
HyperbolicPoint tangent_map(const TangentParams& p, double theta);

// s(theta) = ln tan(theta/2) = 1/2 ln((1 - cos)/(1 + cos))
double arclength_of(double theta);
HyperbolicPoint tangent_map_arclength(const TangentParams& p, double s);

// Geodesic distance for du^2 + e^{4u} dv^2:
//   cosh(2w) = cosh(2(u - u')) + 2 e^{2(u + u')} (v - v')^2.
double hyperbolic_distance(const HyperbolicPoint& P, const HyperbolicPoint& Q);

// Same distance written for regularized heights at a common angle, so that
// points on the axis can be compared without forming ln(sin theta).
double hyperbolic_distance_reg(double phi1, double v1, double phi2, double v2,
                               double sin_theta);

double v0_profile(double a, double theta);

NHGComponents nhg_metric(const TangentParams& p, double rbar, double theta);

struct JacobiFields {
  Pair phi_b;  // (d_b u, d_b v)
  Pair phi_a;  // (d_a u, d_a v)
};
JacobiFields jacobi_fields(const TangentParams& p, double theta);

// 1 + cos^2 + 2 b cos, the profile shared by the tangent map, alpha and g_NH
inline double tangent_denominator(double b, double c) {
  return 1.0 + c * c + 2.0 * b * c;
}

}  // namespace singmap
