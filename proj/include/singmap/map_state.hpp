#pragma once

#include "singmap/closed_forms.hpp"
#include "singmap/grid.hpp"
#include "singmap/renormalizer.hpp"

namespace singmap {

// Renormalized map Phi = u + ln(omega) and twist potential v on a cylinder
// grid. v tends to v_shift + a on the north rod and to v_shift - a on the
// south rod.
struct MapState {
  Field phi;
  Field v;
  Renormalizer omega;
  double a;
  double v_shift = 0.0;

  double north_trace() const { return v_shift + a; }
  double south_trace() const { return v_shift - a; }

  const CylinderGrid& grid() const { return phi.grid(); }
  // psi = u + ln sin theta = Phi - g, the regular part shared by all omega
  double psi(int i, int j) const;
  // max(1, sup |Phi|)
  double lambda() const;
};

MapState make_state(Field phi, Field v, Renormalizer omega, double a,
                    double v_shift = 0.0);

// t-independent lift of a tangent map
MapState lift_tangent(const CylinderGrid& g, const TangentParams& p,
                      const Renormalizer& omega =
                          Renormalizer::translation_invariant());

// extreme Kerr sampled at r = e^{-t}; its pole trace is a = 2 m^2
MapState sample_kerr(const CylinderGrid& g, const KerrParams& p,
                     const Renormalizer& omega =
                         Renormalizer::translation_invariant());

}  // namespace singmap
