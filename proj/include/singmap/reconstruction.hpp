#pragma once

#include <optional>
#include <string>
#include <vector>

#include "singmap/closed_forms.hpp"
#include "singmap/map_state.hpp"

namespace singmap {

// Path integral of a 1-form (f_t, f_theta) on the cylinder grid. Integration
// runs first in t along the reference angle, then in theta (trapezoid rule);
// the swapped order gives a second value whose sup difference is reported.
struct Quadrature {
  Field value;
  Field curl;  // d_t f_theta - d_theta f_t per cell, stored at the cell's lower corner
  double path_defect = 0;
  // sup over cells away from the t ends, where the one-sided t differences
  // leave an O(dt) curl
  double curl_sup() const;
  // same, restricted to cells with theta in [pi/6, 5 pi/6]; the face-flux
  // pattern next to the poles leaves an O(h) curl in the first two cells
  double curl_window_sup() const;
};

// Reference point of both quadratures: t_max and the node nearest pi/2.
int reference_theta_index(int n_theta);

// w with d_t w = 2 e^{-t} e^{4 psi} v_theta / sin^3 and
// d_theta w = -2 e^{-t} e^{4 psi} v_t / sin^3, w = 0 at the reference point.
Quadrature integrate_w(const MapState& s);

// alpha from the polar form of its quadrature equations, alpha = 0 at the
// reference point (no gauge applied yet).
Quadrature integrate_alpha(const MapState& s);

enum class AlphaGauge {
  NorthRod,     // north rod free of conical singularity
  NearHorizon,  // alpha -> ln(1 + cos^2 + 2 b cos) - ln 2 as r -> 0
};

struct MetricFields {
  Field U;  // psi - t, so that e^{2U} = r^2 e^{2 psi}
  Field w;
  Field alpha;
  Field integrability_residual;  // max of the two curls, cellwise
  double w_curl = 0, alpha_curl = 0;
  double w_curl_window = 0, alpha_curl_window = 0;
  double w_path_defect = 0, alpha_path_defect = 0;
  AlphaGauge gauge = AlphaGauge::NorthRod;
  double alpha_shift = 0;  // constant added to the raw quadrature
  int theta_ref = 0;
};

// tangent is needed for the NearHorizon gauge (only b is used).
MetricFields reconstruct(const MapState& s, AlphaGauge gauge = AlphaGauge::NorthRod,
                         const std::optional<TangentParams>& tangent = std::nullopt);

// Limit of alpha at each pole on slice i, extrapolated in sin^2 theta from
// the three nearest rings.
std::pair<double, double> alpha_pole_limits(const Field& alpha, int i);

struct DefectReport {
  double b_north = 0, b_south = 0;
  double force_north = 0, force_south = 0;
  double difference = 0;
  double predicted = 0;  // ln((1 + b)/(1 - b)) for the fitted b
  double mismatch = 0;   // |difference - predicted|
  // spread of the per-slice pole limits; zero for an exact solution
  double rod_variation_north = 0, rod_variation_south = 0;
};

double rod_force(double b_l);

// Pole limits averaged over the interior slices; throws FitUnstable when
// the extrapolated limits are not finite.
DefectReport angle_defects(const MetricFields& mf, double b_fit);

struct NHGLimitReport {
  std::vector<double> eps;       // decreasing
  std::vector<double> t;         // -ln(eps r_bar)
  std::vector<double> distance;  // normalized sup distance to the closed form
  std::vector<std::vector<NHGComponents>> profiles;  // per eps, per theta node
  std::vector<double> theta;
  TangentParams reference{1.0, 0.0};
  double rbar = 1.0;
  double omega = 0;     // -w0
  double w0 = 0;
  double w_slope = 0;   // d w / d r at r = 0 on the reference angle, ~1/a
  double alpha0 = 0;    // in the north-rod gauge, mean of alpha - ln D at t_max
  bool monotone = false;
};

// Near-horizon limit: metric coefficients at r = eps rbar, scaled, compared
// with nhg_metric(reference). The reference tangent fixes the alpha gauge.
NHGLimitReport nhg_limit(const MapState& s, const std::vector<double>& eps,
                         const TangentParams& reference, double rbar = 1.0);

// max over components of sup_theta |g - g_ref| / sup_theta |g_ref|
double nhg_distance(const std::vector<NHGComponents>& g,
                    const std::vector<NHGComponents>& ref);

}  // namespace singmap
