#pragma once

#include <vector>

#include "singmap/grid.hpp"
#include "singmap/map_state.hpp"

namespace singmap {

// L f = f_tt - f_t + (1/sin) (sin f_theta)_theta. Central differences in the
// interior, one-sided second order at the t ends, flux form in theta with a
// zero-flux pole closure.
Field op_L(const Field& f);

struct Residual {
  Field phi;  // L Phi - 2 e^{4u} |grad v|^2 - L ln omega
  Field v;    // e^{-4u} div(e^{4u} grad v), cylinder form
  double sup() const;
  double sup_interior() const;  // excludes the two t-boundary rows
};

Residual residual(const MapState& s);

// Fluxes s e^{4u} v_theta through the n+1 theta faces of slice i,
// pole faces using the ghost traces +a (north) and -a (south).
std::vector<double> slice_v_fluxes(const MapState& s, int i);

// Solves L xi = L ln omega with xi = 0 at both t ends.
Field homogenize_renormalizer(const Renormalizer& omega, const CylinderGrid& g);

double sphere_energy(const MapState& s, int i);
// K(t) = 1/2 int (Phi_t^2 + e^{4u} v_t^2)
double kinetic_energy(const MapState& s, int i);

struct EnergyLedger {
  std::vector<double> t, energy, kinetic;
  // d/dt (K - E) - 2K; endpoints use one-sided differences
  std::vector<double> drift;
  double max_interior_drift() const;
};

EnergyLedger monotonicity_check(const MapState& s);

// |E(t) - E(t_max) - int_t^{t_max} 2K - K(t) + K(t_max)|, trapezoid in t
double energy_identity_check(const MapState& s, int i);

struct LocalEnergyBound {
  double center, radius, lhs, rhs, lambda;
  bool holds;
};

// Integral of the energy density over (c - R, c + R) x S^2, against
// 5000 Lambda^2 / (2 - R)^2 with Lambda taken on the window (c - 2, c + 2).
// The window is the length-4 interval centred in the grid.
LocalEnergyBound local_energy_bound(const MapState& s, double R);

namespace detail {
// (f_t, f_tt) at node (i, j), one-sided at the t ends
std::pair<double, double> t_derivs(const Field& f, int i, int j);
}  // namespace detail

}  // namespace singmap
