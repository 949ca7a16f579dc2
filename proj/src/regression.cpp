#include "singmap/regression.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "singmap/errors.hpp"

namespace singmap {

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "regression needs >= 2 points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  require(sxx > 0, "regression abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  f.count = int(x.size());
  return f;
}

double extrapolate_to_zero(const std::vector<double>& x,
                           const std::vector<double>& y,
                           const std::vector<int>& powers) {
  const int n = int(powers.size());
  require(int(x.size()) == n && int(y.size()) == n,
          "extrapolation needs one point per monomial");
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b(n);
  int const_col = -1;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) A(r, c) = std::pow(x[r], powers[c]);
    b[r] = y[r];
  }
  for (int c = 0; c < n; ++c)
    if (powers[c] == 0) const_col = c;
  require(const_col >= 0, "extrapolation needs a constant term");
  return A.colPivHouseholderQr().solve(b)[const_col];
}

}  // namespace singmap
