#pragma once

// Node-level discretization of the renormalized system, templated so the
// same code yields residuals (double) and Jacobian rows (Dual).

#include <cmath>

#include "singmap/dual.hpp"
#include "singmap/grid.hpp"
#include "singmap/map_state.hpp"

namespace singmap::detail {

using std::exp;

// Fixed data of the five-point stencil at node (i, j).
struct NodeGeom {
  double dt, h;
  double sin_c, sin_fm, sin_fp;  // node and the two face sines
  double s3m, s3p;               // sin^3 integrals of the two face cells
  bool north, south;             // first / last theta row
  double v_north, v_south;       // pole traces
  double llnw;                   // L ln omega at the node
  double g_c, g_tm, g_tp, g_jm, g_jp;  // ln omega - ln sin at stencil points
};

template <class S>
struct Stencil {
  S c, tm, tp, jm, jp;
};

template <class S>
struct NodeResidual {
  S phi;  // R_Phi
  S dv;   // div-form v operator, R_v = dv / E_c
  S e_c;  // e^{4u} at the node
};

template <class S>
struct ThetaFluxes {
  S fm, fp;  // s e^{4u} v_theta through the two faces
};

template <class S>
ThetaFluxes<S> theta_fluxes(const NodeGeom& g, const S& psi_c, const S& psi_jm,
                            const S& psi_jp, const S& v_c, const S& v_jm,
                            const S& v_jp) {
  ThetaFluxes<S> f;
  if (g.north) {
    f.fm = exp(4.0 * psi_c) / g.s3m * (v_c - g.v_north);
  } else {
    f.fm = exp(2.0 * (psi_c + psi_jm)) / g.s3m * (v_c - v_jm);
  }
  if (g.south) {
    f.fp = exp(4.0 * psi_c) / g.s3p * (g.v_south - v_c);
  } else {
    f.fp = exp(2.0 * (psi_c + psi_jp)) / g.s3p * (v_jp - v_c);
  }
  return f;
}

// Residual at a node whose two t-neighbours exist (central differences).
template <class S>
NodeResidual<S> interior_residual(const NodeGeom& g, const Stencil<S>& phi,
                                  const Stencil<S>& v) {
  const double s = g.sin_c, s2 = s * s, s4 = s2 * s2;
  const S psi_c = phi.c - g.g_c;
  const S psi_tm = phi.tm - g.g_tm, psi_tp = phi.tp - g.g_tp;
  const S psi_jm = phi.jm - g.g_jm, psi_jp = phi.jp - g.g_jp;

  const S e4 = exp(4.0 * psi_c);
  const S e_c = e4 / s4;
  const S e_tm = exp(2.0 * (psi_c + psi_tm)) / s4;
  const S e_tp = exp(2.0 * (psi_c + psi_tp)) / s4;

  const ThetaFluxes<S> f = theta_fluxes(g, psi_c, psi_jm, psi_jp, v.c, v.jm, v.jp);
  const S f_node = 0.5 * (f.fm + f.fp);

  const double dt2 = g.dt * g.dt;
  const S phi_tt = (phi.tp - 2.0 * phi.c + phi.tm) / dt2;
  const S phi_t = (phi.tp - phi.tm) / (2.0 * g.dt);
  const S lap_q = (g.sin_fp * (phi.jp - phi.c) - g.sin_fm * (phi.c - phi.jm)) /
                  (s * g.h * g.h);
  const S v_t = (v.tp - v.tm) / (2.0 * g.dt);

  NodeResidual<S> r;
  r.phi = phi_tt - phi_t + lap_q -
          2.0 * (e_c * v_t * v_t + f_node * f_node * s2 / e4) - g.llnw;
  r.dv = (e_tp * (v.tp - v.c) - e_tm * (v.c - v.tm)) / dt2 - e_c * v_t +
         (f.fp - f.fm) / (s * g.h);
  r.e_c = e_c;
  return r;
}

// theta-direction geometry at node (i, j) of a grid
inline NodeGeom node_geom(const MapState& st, const ThetaGeometry& geo, int i,
                          int j) {
  const CylinderGrid& gr = st.grid();
  const int n = geo.n;
  NodeGeom g;
  g.dt = gr.dt();
  g.h = geo.h;
  g.sin_c = geo.sin_node[j];
  g.sin_fm = geo.sin_face[j];
  g.sin_fp = geo.sin_face[j + 1];
  g.s3m = geo.s3_face[j];
  g.s3p = geo.s3_face[j + 1];
  g.north = j == 0;
  g.south = j == n - 1;
  g.v_north = st.north_trace();
  g.v_south = st.south_trace();
  const double t = gr.t(i), th = geo.theta[j];
  g.llnw = st.omega.lap_log_omega(t, th);
  const auto& om = st.omega;
  g.g_c = om.log_ratio(t, th);
  g.g_tm = i > 0 ? om.log_ratio(gr.t(i - 1), th) : g.g_c;
  g.g_tp = i + 1 < gr.n_t() ? om.log_ratio(gr.t(i + 1), th) : g.g_c;
  g.g_jm = j > 0 ? om.log_ratio(t, geo.theta[j - 1]) : g.g_c;
  g.g_jp = j + 1 < n ? om.log_ratio(t, geo.theta[j + 1]) : g.g_c;
  return g;
}

// Gathers the stencil of a field; missing theta neighbours on the pole rows
// repeat the centre value (their coefficients vanish).
inline Stencil<double> gather(const Field& f, int i, int j) {
  const int n = f.grid().n_theta();
  const int nt = f.grid().n_t();
  Stencil<double> s;
  s.c = f(i, j);
  s.tm = i > 0 ? f(i - 1, j) : s.c;
  s.tp = i + 1 < nt ? f(i + 1, j) : s.c;
  s.jm = j > 0 ? f(i, j - 1) : s.c;
  s.jp = j + 1 < n ? f(i, j + 1) : s.c;
  return s;
}

}  // namespace singmap::detail
