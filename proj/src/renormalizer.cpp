#include "singmap/renormalizer.hpp"

#include <cmath>

#include "singmap/errors.hpp"

namespace singmap {

Renormalizer Renormalizer::translation_invariant() {
  return Renormalizer(RenormalizerKind::TranslationInvariant, "sin", 0.0, true);
}

Renormalizer Renormalizer::linear_growth() {
  return Renormalizer(RenormalizerKind::LinearGrowth, "rho", 0.0, false);
}

Renormalizer Renormalizer::custom(Fn log_ratio, double a1, bool t_independent,
                                  std::string label) {
  require(bool(log_ratio), "custom renormalizer needs a callable");
  require(std::isfinite(a1) && a1 >= 0.0,
          "custom renormalizer bound A1 must be finite");
  Renormalizer r(RenormalizerKind::Custom, std::move(label), a1, t_independent);
  r.g_ = std::make_shared<const Fn>(std::move(log_ratio));
  return r;
}

double Renormalizer::log_ratio(double t, double theta) const {
  switch (kind_) {
    case RenormalizerKind::TranslationInvariant: return 0.0;
    case RenormalizerKind::LinearGrowth: return -t;
    case RenormalizerKind::Custom: return (*g_)(t, theta);
  }
  return 0.0;
}

double Renormalizer::lap_log_omega(double t, double theta) const {
  switch (kind_) {
    case RenormalizerKind::TranslationInvariant: return -1.0;
    case RenormalizerKind::LinearGrowth: return 0.0;
    case RenormalizerKind::Custom: break;
  }
  // L(ln sin) = -1 plus L g by central differences
  const double e = 1e-4;
  const Fn& g = *g_;
  const double g0 = g(t, theta);
  const double gt = (g(t + e, theta) - g(t - e, theta)) / (2 * e);
  const double gtt = (g(t + e, theta) - 2 * g0 + g(t - e, theta)) / (e * e);
  const double gq = (g(t, theta + e) - g(t, theta - e)) / (2 * e);
  const double gqq = (g(t, theta + e) - 2 * g0 + g(t, theta - e)) / (e * e);
  return -1.0 + gtt - gt + gqq + std::cos(theta) / std::sin(theta) * gq;
}

Renormalizer renormalizer_from_name(const std::string& name) {
  if (name == "sin" || name == "translation_invariant")
    return Renormalizer::translation_invariant();
  if (name == "rho" || name == "linear_growth")
    return Renormalizer::linear_growth();
  fail(ErrorCode::Config, "unknown renormalizer '" + name +
                              "' (expected sin or rho)");
}

}  // namespace singmap
