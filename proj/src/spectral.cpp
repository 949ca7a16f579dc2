#include "singmap/spectral.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "singmap/errors.hpp"

namespace singmap {

namespace {

std::vector<SphereProfile> profiles_from(const Eigen::VectorXd& x, int n,
                                         int comps) {
  std::vector<SphereProfile> out(comps);
  for (int c = 0; c < comps; ++c) {
    out[c].values.resize(n);
    for (int j = 0; j < n; ++j) out[c].values[j] = x[j * comps + c];
  }
  return out;
}

// Solves K x = mu M x through A = M^{-1/2} K M^{-1/2}; returns the k
// smallest pairs with x normalized in the M-norm.
void symmetric_eigs(const Eigen::MatrixXd& A, const Eigen::VectorXd& M, int k,
                    int comps, int n, EigenReport& rep) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::InvariantBreach, "eigensolver breakdown");
  const Eigen::VectorXd isq = M.cwiseSqrt().cwiseInverse();
  for (int q = 0; q < k; ++q) {
    const double mu = es.eigenvalues()[q];
    const Eigen::VectorXd y = es.eigenvectors().col(q);
    rep.eigenvalues.push_back(mu);
    rep.residual_norms.push_back((A * y - mu * y).norm() / y.norm());
    rep.eigenfunctions.push_back(profiles_from(isq.cwiseProduct(y), n, comps));
  }
}

}  // namespace

double legendre_P2(int n, double x) {
  require(n >= 2, "legendre_P2 needs degree >= 2");
  require(x >= -1 && x <= 1, "legendre_P2 needs x in [-1, 1]");
  const double w = 1 - x * x;
  double pm2 = 3 * w;  // P^2_2
  if (n == 2) return pm2;
  double pm1 = 5 * x * pm2;  // P^2_3
  for (int l = 4; l <= n; ++l) {
    const double p = (x * (2 * l - 1) * pm1 - (l + 1) * pm2) / (l - 2);
    pm2 = pm1;
    pm1 = p;
  }
  return pm1;
}

EigenReport twist_spectrum(int n_theta, int k) {
  require(n_theta >= 4, "twist spectrum needs n_theta >= 4");
  require(k >= 1 && k <= n_theta, "twist spectrum needs 1 <= k <= n_theta");
  const ThetaGeometry geo(n_theta);
  const int n = n_theta;
  Eigen::VectorXd M(n), diag(n), sub(n - 1);
  for (int j = 0; j < n; ++j) M[j] = geo.h / std::pow(geo.sin_node[j], 3);
  for (int j = 0; j < n; ++j)
    diag[j] = (1 / geo.s3_face[j] + 1 / geo.s3_face[j + 1]) / M[j];
  for (int j = 0; j + 1 < n; ++j)
    sub[j] = -1 / geo.s3_face[j + 1] / std::sqrt(M[j] * M[j + 1]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::InvariantBreach, "tridiagonal eigensolver breakdown");
  EigenReport rep;
  rep.operator_name = "twist";
  rep.n_theta = n;
  for (int q = 0; q < k; ++q) {
    const double mu = es.eigenvalues()[q];
    const Eigen::VectorXd y = es.eigenvectors().col(q);
    Eigen::VectorXd Ay = diag.cwiseProduct(y);
    Ay.head(n - 1) += sub.cwiseProduct(y.tail(n - 1));
    Ay.tail(n - 1) += sub.cwiseProduct(y.head(n - 1));
    rep.eigenvalues.push_back(mu);
    rep.residual_norms.push_back((Ay - mu * y).norm() / y.norm());
    Eigen::VectorXd w = y.cwiseQuotient(M.cwiseSqrt());
    // fix the sign so the profile is positive near the north pole
    if (w[0] < 0) w = -w;
    rep.eigenfunctions.push_back(profiles_from(w, n, 1));
  }
  return rep;
}

LinearizedOperator::LinearizedOperator(const TangentParams& p, int n_theta,
                                       int m_penalty)
    : p_(p), n_(n_theta) {
  require(n_theta >= 4, "linearized operator needs n_theta >= 4");
  require(m_penalty >= 0, "angular penalty index must be nonnegative");
  const ThetaGeometry geo(n_theta);
  const int n = n_theta;
  const double a = p.a, b = p.b, h = geo.h;
  auto em4 = [&](double th) {  // e^{-4 Phi}
    const double D = tangent_denominator(b, std::cos(th));
    return 4 * a * a * (1 - b * b) / (D * D);
  };
  auto i1 = [](int j) { return 2 * j; };
  auto i2 = [](int j) { return 2 * j + 1; };
  std::vector<Eigen::Triplet<double>> t;

  for (int f = 1; f < n; ++f) {  // |phi1'|^2 sin
    const double c = geo.sin_face[f] / h;
    t.emplace_back(i1(f - 1), i1(f - 1), c);
    t.emplace_back(i1(f), i1(f), c);
    t.emplace_back(i1(f - 1), i1(f), -c);
    t.emplace_back(i1(f), i1(f - 1), -c);
  }
  for (int f = 0; f <= n; ++f) {  // e^{4u} |phi2'|^2 sin, exact-cell conductance
    const double lo = f == 0 ? 0.0 : geo.theta[f - 1];
    const double hi = f == n ? M_PI : geo.theta[f];
    const double cell = boost::math::quadrature::gauss<double, 10>::integrate(
        [&](double x) { return std::pow(std::sin(x), 3) * em4(x); }, lo, hi);
    const double c = 1 / cell;
    if (f > 0) t.emplace_back(i2(f - 1), i2(f - 1), c);
    if (f < n) t.emplace_back(i2(f), i2(f), c);
    if (f > 0 && f < n) {
      t.emplace_back(i2(f - 1), i2(f), -c);
      t.emplace_back(i2(f), i2(f - 1), -c);
    }
  }
  for (int j = 0; j < n; ++j) {  // 8 e^{4u} |v'|^2 phi1^2 sin
    const double s = geo.sin_node[j];
    t.emplace_back(i1(j), i1(j), h * 8 * s * s * s * em4(geo.theta[j]) / (4 * a * a));
  }
  // cross term: 4 e^{4u} sin v' = -2/a, integrated by parts into
  // (2/a) int (phi1' psi2 + psi1' phi2), face difference times face average
  for (int f = 1; f < n; ++f) {
    const int l = f - 1, r = f;
    for (auto [j1, sg] : {std::pair{l, -1.0 / h}, {r, 1.0 / h}})
      for (int j2 : {l, r}) {
        const double c = (2 / a) * h * sg * 0.5;
        t.emplace_back(i1(j1), i2(j2), c);
        t.emplace_back(i2(j2), i1(j1), c);
      }
  }
  M_.resize(2 * n);
  for (int j = 0; j < n; ++j) {
    const double s = geo.sin_node[j];
    const double e4u = 1 / (em4(geo.theta[j]) * s * s * s * s);
    M_[i1(j)] = h * s;
    M_[i2(j)] = h * s * e4u;
    if (m_penalty > 0) {
      const double m2 = double(m_penalty) * m_penalty;
      t.emplace_back(i1(j), i1(j), m2 * h / s);
      t.emplace_back(i2(j), i2(j), m2 * h * e4u / s);
    }
  }
  K_.resize(2 * n, 2 * n);
  K_.setFromTriplets(t.begin(), t.end());
}

Eigen::VectorXd LinearizedOperator::pack(const std::vector<double>& f1,
                                         const std::vector<double>& f2) const {
  require(int(f1.size()) == n_ && int(f2.size()) == n_,
          "profile length does not match the operator");
  Eigen::VectorXd x(2 * n_);
  for (int j = 0; j < n_; ++j) {
    x[2 * j] = f1[j];
    x[2 * j + 1] = f2[j];
  }
  return x;
}

std::pair<std::vector<double>, std::vector<double>> LinearizedOperator::unpack(
    const Eigen::VectorXd& x) const {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (int j = 0; j < n_; ++j) {
    out.first.push_back(x[2 * j]);
    out.second.push_back(x[2 * j + 1]);
  }
  return out;
}

Eigen::VectorXd LinearizedOperator::apply(const Eigen::VectorXd& x) const {
  return (K_ * x).cwiseQuotient(M_);
}

double LinearizedOperator::weighted_inner(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y) const {
  return x.dot(M_.cwiseProduct(y));
}

double LinearizedOperator::symmetry_defect() const {
  const Eigen::MatrixXd D(K_);
  return (D - D.transpose()).cwiseAbs().maxCoeff() / D.cwiseAbs().maxCoeff();
}

LinearizedOperator assemble_linearized(const TangentParams& p, int n_theta,
                                       int m_penalty) {
  return LinearizedOperator(p, n_theta, m_penalty);
}

double bilinear_form(const TangentParams& p,
                     const std::pair<std::vector<double>, std::vector<double>>& phi,
                     const std::pair<std::vector<double>, std::vector<double>>& psi) {
  const LinearizedOperator L(p, int(phi.first.size()));
  const Eigen::VectorXd x = L.pack(phi.first, phi.second);
  const Eigen::VectorXd y = L.pack(psi.first, psi.second);
  return 2 * M_PI * x.dot(L.stiffness() * y);
}

KernelReport kernel_spectrum(const TangentParams& p, int n_theta, int k,
                             int m_penalty) {
  require(k >= 2 && k <= 2 * n_theta, "kernel spectrum needs 2 <= k <= 2 n_theta");
  const LinearizedOperator L(p, n_theta, m_penalty);
  const Eigen::VectorXd isq = L.mass().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd A =
      isq.asDiagonal() * Eigen::MatrixXd(L.stiffness()) * isq.asDiagonal();
  KernelReport rep;
  rep.spectrum.operator_name = "linearized";
  rep.spectrum.n_theta = n_theta;
  symmetric_eigs(0.5 * (A + A.transpose()), L.mass(), k, 2, n_theta, rep.spectrum);

  const ThetaGeometry geo(n_theta);
  std::vector<double> b1, b2;
  for (double th : geo.theta) {
    const JacobiFields J = jacobi_fields(p, th);
    b1.push_back(J.phi_b.first);
    b2.push_back(J.phi_b.second);
  }
  const Eigen::VectorXd jb = L.pack(b1, b2);
  const auto& e = rep.spectrum.eigenfunctions[0];
  const Eigen::VectorXd e1 = L.pack(e[0].values, e[1].values);
  rep.alignment = std::fabs(L.weighted_inner(e1, jb)) /
                  std::sqrt(L.weighted_inner(e1, e1) * L.weighted_inner(jb, jb));
  rep.beta_from_mu2 = 0.5 * (std::sqrt(1 + 4 * rep.spectrum.eigenvalues[1]) - 1);
  return rep;
}

}  // namespace singmap
