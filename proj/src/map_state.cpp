#include "singmap/map_state.hpp"

#include <cmath>

#include "singmap/errors.hpp"

namespace singmap {

double MapState::psi(int i, int j) const {
  const auto& g = grid();
  return phi(i, j) - omega.log_ratio(g.t(i), g.theta(j));
}

double MapState::lambda() const { return std::max(1.0, phi.sup_norm()); }

MapState make_state(Field phi, Field v, Renormalizer omega, double a,
                    double v_shift) {
  require(phi.grid() == v.grid(), "Phi and v live on different grids");
  require(std::isfinite(a) && a > 0.0, "pole trace a must be positive");
  if (!phi.all_finite() || !v.all_finite())
    fail(ErrorCode::InvariantBreach, "state has non-finite values");
  require(std::isfinite(v_shift), "trace shift must be finite");
  return MapState{std::move(phi), std::move(v), std::move(omega), a, v_shift};
}

MapState lift_tangent(const CylinderGrid& g, const TangentParams& p,
                      const Renormalizer& omega) {
  Field phi = Field::from_function(g, [&](double t, double th) {
    return tangent_phi(p, th) + omega.log_ratio(t, th);
  });
  Field v = Field::from_function(
      g, [&](double, double th) { return tangent_v(p, th); });
  return make_state(std::move(phi), std::move(v), omega, p.a);
}

MapState sample_kerr(const CylinderGrid& g, const KerrParams& p,
                     const Renormalizer& omega) {
  Field phi = Field::from_function(g, [&](double t, double th) {
    return kerr_phi(p, std::exp(-t), th) + omega.log_ratio(t, th);
  });
  Field v = Field::from_function(
      g, [&](double t, double th) { return kerr_v(p, std::exp(-t), th); });
  return make_state(std::move(phi), std::move(v), omega, 2.0 * p.m * p.m);
}

}  // namespace singmap
