#include "singmap/grid.hpp"

#include <cmath>

#include "singmap/errors.hpp"

namespace singmap {

CylinderGrid::CylinderGrid(double t_min, double t_max, int n_t, int n_theta)
    : t_min_(t_min), t_max_(t_max), n_t_(n_t), n_theta_(n_theta) {
  require(std::isfinite(t_min) && std::isfinite(t_max) && t_min < t_max,
          "grid needs t_min < t_max");
  require(n_t >= 3, "grid needs n_t >= 3");
  require(n_theta >= 4, "grid needs n_theta >= 4");
}

double CylinderGrid::dtheta() const { return M_PI / n_theta_; }

double integral_sin3(double lo, double hi) {
  // F(x) = -cos x + cos^3 x / 3, so F(hi) - F(lo) =
  //   (cos lo - cos hi) * (sin^2 hi + sin^2 lo + 1 - cos hi cos lo) / 3
  const double half_sum = 0.5 * (hi + lo), half_diff = 0.5 * (hi - lo);
  const double dcos = 2.0 * std::sin(half_sum) * std::sin(half_diff);
  const double sh = std::sin(hi), sl = std::sin(lo);
  const double a = std::sin(half_diff), b = std::sin(half_sum);
  const double one_minus_cc = a * a + b * b;
  return dcos * (sh * sh + sl * sl + one_minus_cc) / 3.0;
}

ThetaGeometry::ThetaGeometry(int n_theta) : n(n_theta), h(M_PI / n_theta) {
  theta.resize(n);
  sin_node.resize(n);
  cos_node.resize(n);
  for (int j = 0; j < n; ++j) {
    theta[j] = (j + 0.5) * h;
    sin_node[j] = std::sin(theta[j]);
    cos_node[j] = std::cos(theta[j]);
  }
  sin_face.assign(n + 1, 0.0);
  s3_face.assign(n + 1, 0.0);
  for (int f = 0; f <= n; ++f) {
    if (f > 0 && f < n) sin_face[f] = std::sin(f * h);
    const double lo = f == 0 ? 0.0 : theta[f - 1];
    const double hi = f == n ? M_PI : theta[f];
    s3_face[f] = integral_sin3(lo, hi);
  }
}

Field::Field(const CylinderGrid& g, double fill)
    : grid_(g), values_(g.size(), fill) {}

Field::Field(const CylinderGrid& g, std::vector<double> values)
    : grid_(g), values_(std::move(values)) {
  require(values_.size() == g.size(), "field size does not match grid");
}

Field Field::from_function(const CylinderGrid& g,
                           const std::function<double(double, double)>& f) {
  Field out(g);
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) out(i, j) = f(g.t(i), g.theta(j));
  return out;
}

std::vector<double> Field::slice(int i) const {
  auto first = values_.begin() + grid_.index(i, 0);
  return std::vector<double>(first, first + grid_.n_theta());
}

bool Field::all_finite() const {
  for (double x : values_)
    if (!std::isfinite(x)) return false;
  return true;
}

double Field::sup_norm() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace singmap
