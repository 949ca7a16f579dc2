#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace singmap {

// [t_min, t_max] x [0, pi], t nodes inclusive, theta nodes offset from the
// poles: theta_j = (j + 1/2) pi / n_theta.
class CylinderGrid {
 public:
  CylinderGrid(double t_min, double t_max, int n_t, int n_theta);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int n_t() const { return n_t_; }
  int n_theta() const { return n_theta_; }
  double dt() const { return (t_max_ - t_min_) / (n_t_ - 1); }
  double dtheta() const;
  double t(int i) const { return t_min_ + i * dt(); }
  double theta(int j) const { return (j + 0.5) * dtheta(); }
  std::size_t size() const { return std::size_t(n_t_) * n_theta_; }
  std::size_t index(int i, int j) const {
    return std::size_t(i) * n_theta_ + j;
  }

  bool operator==(const CylinderGrid& o) const {
    return t_min_ == o.t_min_ && t_max_ == o.t_max_ && n_t_ == o.n_t_ &&
           n_theta_ == o.n_theta_;
  }

 private:
  double t_min_, t_max_;
  int n_t_, n_theta_;
};

// Per-resolution trigonometric tables for the pole-offset theta grid.
// Face f sits between node f-1 and node f; faces 0 and n are the poles.
struct ThetaGeometry {
  explicit ThetaGeometry(int n_theta);

  int n;
  double h;
  std::vector<double> theta, sin_node, cos_node;
  std::vector<double> sin_face;  // exactly 0 on the pole faces
  // integral of sin^3 over the face cell: [theta_{f-1}, theta_f], with the
  // pole faces running from the pole to the first/last node
  std::vector<double> s3_face;
};

// Integral of sin^3 over [lo, hi], free of cancellation for short cells.
double integral_sin3(double lo, double hi);

class Field {
 public:
  explicit Field(const CylinderGrid& g, double fill = 0.0);
  Field(const CylinderGrid& g, std::vector<double> values);
  static Field from_function(const CylinderGrid& g,
                             const std::function<double(double, double)>& f);

  const CylinderGrid& grid() const { return grid_; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  std::vector<double> slice(int i) const;

  bool all_finite() const;
  double sup_norm() const;

 private:
  CylinderGrid grid_;
  std::vector<double> values_;
};

}  // namespace singmap
