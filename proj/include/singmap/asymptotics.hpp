#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "singmap/closed_forms.hpp"
#include "singmap/map_state.hpp"

namespace singmap {

// Pole traces of v on slice i, extrapolated from the three nearest rings
// with v - trace = c2 x^2 + c3 x^3, x = 1 -+ cos(theta).
std::pair<double, double> pole_traces(const MapState& s, int i);

struct TangentFitOptions {
  // explicit t-window for the rate regression; otherwise chosen as the
  // leading run of slices whose distance exceeds floor_factor times the
  // smallest distance seen over the last e-fold
  std::optional<std::pair<double, double>> window;
  double floor_factor = 10.0;
  int exclude = 2;  // slices dropped next to each t-boundary
  double min_r2 = 0.99;
  int min_slices = 10;
};

struct TangentFit {
  TangentParams params{1.0, 0.0};
  double v_center = 0;  // (north + south trace) / 2
  double beta = 0;
  bool beta_reported = false;
  double r2 = 0;
  std::pair<double, double> fit_window{0, 0};
  int slices_used = 0;
  std::vector<double> slice_t, residuals;  // per-slice sup distance
  std::string note;
};

// Fits the tangent map approached as t -> +infinity and the exponential
// rate of approach. Throws FitUnstable for inconsistent pole traces or a
// rate regression below min_r2.
TangentFit fit_tangent(const MapState& s, const TangentFitOptions& opt = {});

struct ModeExponent {
  double value = 0;  // fitted exponent of |amplitude| ~ e^{p t}
  double r2 = 0;
  bool reported = false;
};

struct InfinityFit {
  // Phi ~ c0 + Y0 e^t + Y1 e^{2t} P1 + Y2 e^{3t} P2 as t -> -infinity, each
  // mode fitted with one further power of e^t
  double c0 = 0, Y0 = 0, Y1 = 0, Y2 = 0;
  ModeExponent exponents[3];
  double u_remainder = 0;        // largest weighted remainder over slices
  double parseval_defect = 0;    // largest |norm^2 - sum amp^2 - rem^2|
  double mode_fit_residual = 0;  // sup misfit of the t-fits
  // v ~ v0(a_twist) + c2 e^t sin^4 + O(e^{(1+beta) t})
  double a_twist = 0, c2 = 0;
  ModeExponent tail;  // exponent of the remainder, 1 + beta
  double beta = 0;
  double v_remainder = 0;
  std::vector<double> slice_t;
};

struct InfinityFitOptions {
  std::optional<std::pair<double, double>> window;
  int twist_modes = 4;
};

// Both fits need the LinearGrowth renormalizer (omega = rho).
InfinityFit fit_infinity_u(const MapState& s, const InfinityFitOptions& opt = {});
InfinityFit fit_infinity_v(const MapState& s, const InfinityFitOptions& opt = {});
InfinityFit fit_infinity(const MapState& s, const InfinityFitOptions& opt = {});

}  // namespace singmap
