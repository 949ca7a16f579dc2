#pragma once

#include <optional>
#include <string>
#include <vector>

#include "singmap/errors.hpp"
#include "singmap/map_state.hpp"

namespace singmap {

struct SolveConfig {
  int max_newton_iters = 30;
  double residual_tol = 1e-10;  // relative: |R| <= tol (1 + |R_init|)
  double damping = 0.5;         // backtracking factor
  double min_step = 1e-8;
  int continuation_steps = 1;
  double lambda_guard = 100.0;  // BoundBreach when sup|Phi| exceeds this
  double armijo = 1e-4;
  void validate() const;
};

// Dirichlet data on one t-end: Phi and v at the theta nodes.
struct SphereData {
  std::vector<double> phi, v;
};

SphereData profile_of(const MapState& s, int i);

// Closed-form slices as boundary data on an n_theta pole-offset grid.
SphereData tangent_profile(int n_theta, const TangentParams& p);
SphereData kerr_profile(int n_theta, const KerrParams& p, double t,
                        const Renormalizer& omega);

// Tangent data plus eps times a smooth bump: P_2(cos) in Phi and
// a sin^4 (1 + cos) in v, with the Jacobi direction d/db projected out in
// the weighted product (1, e^{4u}). A nonzero seed mixes in P_3 and
// a sin^4 cos^2 components with random amplitudes.
SphereData perturbed_tangent_profile(int n_theta, const TangentParams& p,
                                     double eps, unsigned seed = 0);

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // interior sup-norm, one per iterate
  std::vector<double> step_lengths;      // accepted line-search lengths
  bool converged = false;
  std::string message;
  int continuation_step = -1;
  std::optional<MapState> final_state;
};

class SolveError : public Error {
 public:
  SolveError(ErrorCode c, const std::string& what, SolveReport r)
      : Error(c, what), report(std::move(r)) {}
  SolveReport report;
};

// Phi interpolated in t by the harmonic profile A + B e^t (the t-only
// solutions of L f = 0), v blended linearly.
MapState default_initial_guess(const CylinderGrid& g, const Renormalizer& omega,
                               double a, const SphereData& lo,
                               const SphereData& hi, double v_shift = 0.0);

// Damped Newton for the renormalized system with Dirichlet data at both
// t-ends and pole traces v = v_shift + a (north), v_shift - a (south).
SolveReport solve_dirichlet(const CylinderGrid& g, const Renormalizer& omega,
                            double a, const SphereData& lo, const SphereData& hi,
                            const std::optional<MapState>& init,
                            const SolveConfig& cfg, double v_shift = 0.0);

struct ContinuationReport {
  std::vector<double> parameters;  // homotopy parameter of each step
  std::vector<SolveReport> steps;
  const SolveReport& last() const { return steps.back(); }
};

// Linear homotopy of pole trace and boundary profiles from base to target,
// warm-starting each Newton solve from the previous step.
ContinuationReport continuation_solve(const CylinderGrid& g,
                                      const Renormalizer& omega, double a_base,
                                      const SphereData& base_lo,
                                      const SphereData& base_hi, double a_target,
                                      const SphereData& target_lo,
                                      const SphereData& target_hi, int steps,
                                      const std::optional<MapState>& init,
                                      const SolveConfig& cfg);

}  // namespace singmap
