#pragma once

#include <vector>

namespace singmap {

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
  int count = 0;
};

// Ordinary least squares y = intercept + slope x.
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

// Polynomial through the points (x_k, y_k) with prescribed monomial powers,
// evaluated at x = 0 (requires a power-0 term). Square system.
double extrapolate_to_zero(const std::vector<double>& x,
                           const std::vector<double>& y,
                           const std::vector<int>& powers);

}  // namespace singmap
