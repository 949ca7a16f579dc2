#pragma once

#include <Eigen/Sparse>
#include <string>
#include <utility>
#include <vector>

#include "singmap/closed_forms.hpp"
#include "singmap/grid.hpp"

namespace singmap {

struct SphereProfile {
  std::vector<double> values;  // at the pole-offset theta nodes
  double north = 0.0, south = 0.0;
};

struct EigenReport {
  std::string operator_name;
  int n_theta = 0;
  std::vector<double> eigenvalues;  // ascending
  // one profile per component (1 for the twist operator, 2 for L_{a,b})
  std::vector<std::vector<SphereProfile>> eigenfunctions;
  std::vector<double> residual_norms;  // |(A - mu) x| / |x|, symmetrized form
};

// Associated Legendre function of order 2 without the Condon-Shortley phase,
// P^2_2(x) = 3 (1 - x^2), by upward recurrence in the degree.
double legendre_P2(int n, double x);

// -(sin^{-3} w')' = mu sin^{-3} w with w = 0 at the poles, the axisymmetric
// form of omega^4 div(omega^{-4} grad w) = -mu w. Eigenfunctions are
// normalized in L^2(S^2, sin^{-4}) (per unit 2 pi).
EigenReport twist_spectrum(int n_theta, int k);

// Discrete linearized harmonic-map operator at the tangent map (a, b),
// axisymmetric, unknowns (phi1, phi2) interleaved per theta node, phi2 = 0
// on the poles. K is the stiffness of the quadratic form B (per unit 2 pi),
// mass the weights h sin (1, e^{4u}); the operator is M^{-1} K.
class LinearizedOperator {
 public:
  LinearizedOperator(const TangentParams& p, int n_theta, int m_penalty = 0);

  const TangentParams& params() const { return p_; }
  int n_theta() const { return n_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return K_; }
  const Eigen::VectorXd& mass() const { return M_; }

  // interleave (phi1, phi2) profiles into one vector and back
  Eigen::VectorXd pack(const std::vector<double>& f1,
                       const std::vector<double>& f2) const;
  std::pair<std::vector<double>, std::vector<double>> unpack(
      const Eigen::VectorXd& x) const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;  // M^{-1} K x
  double weighted_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  // max |K - K^T| / max |K|
  double symmetry_defect() const;

 private:
  TangentParams p_;
  int n_;
  Eigen::SparseMatrix<double> K_;
  Eigen::VectorXd M_;
};

LinearizedOperator assemble_linearized(const TangentParams& p, int n_theta,
                                       int m_penalty = 0);

// B[phi, psi] (full sphere measure, 2 pi included). phi2, psi2 are taken to
// vanish on the poles.
double bilinear_form(const TangentParams& p,
                     const std::pair<std::vector<double>, std::vector<double>>& phi,
                     const std::pair<std::vector<double>, std::vector<double>>& psi);

struct KernelReport {
  EigenReport spectrum;
  double alignment = 0;  // |cos| between e_1 and the Jacobi field d/db
  // decay exponent (sqrt(1 + 4 mu_2) - 1)/2 of the first non-kernel mode of
  // the cylinder operator, reported alongside mu_2
  double beta_from_mu2 = 0;
};

KernelReport kernel_spectrum(const TangentParams& p, int n_theta, int k,
                             int m_penalty = 0);

}  // namespace singmap
