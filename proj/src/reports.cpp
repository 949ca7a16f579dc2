#include "singmap/reports.hpp"

namespace singmap {

using nlohmann::json;

namespace {

json mode(const ModeExponent& e) {
  return {{"value", e.value}, {"r2", e.r2}, {"reported", e.reported}};
}

json nhg_components(const NHGComponents& g) {
  return {{"g_tt", g.g_tt}, {"g_tphi", g.g_tphi}, {"g_phiphi", g.g_phiphi},
          {"g_rr", g.g_rr}, {"g_thth", g.g_thth}};
}

}  // namespace

json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"residual_history", r.residual_history},
          {"step_lengths", r.step_lengths},
          {"converged", r.converged},
          {"message", r.message},
          {"continuation_step", r.continuation_step}};
}

json to_json(const EigenReport& r, bool with_functions) {
  json j{{"operator", r.operator_name},
         {"n_theta", r.n_theta},
         {"eigenvalues", r.eigenvalues},
         {"residual_norms", r.residual_norms}};
  if (with_functions) {
    json fs = json::array();
    for (const auto& comps : r.eigenfunctions) {
      json c = json::array();
      for (const SphereProfile& p : comps)
        c.push_back({{"values", p.values}, {"north", p.north}, {"south", p.south}});
      fs.push_back(c);
    }
    j["eigenfunctions"] = fs;
  }
  return j;
}

json to_json(const KernelReport& r) {
  return {{"spectrum", to_json(r.spectrum)},
          {"alignment", r.alignment},
          {"beta_from_mu2", r.beta_from_mu2}};
}

json to_json(const TangentFit& f) {
  return {{"a", f.params.a},
          {"b", f.params.b},
          {"v_center", f.v_center},
          {"beta", f.beta},
          {"beta_reported", f.beta_reported},
          {"r2", f.r2},
          {"fit_window", {f.fit_window.first, f.fit_window.second}},
          {"slices_used", f.slices_used},
          {"note", f.note}};
}

json to_json(const InfinityFit& f) {
  return {{"c0", f.c0},
          {"Y0", f.Y0},
          {"Y1", f.Y1},
          {"Y2", f.Y2},
          {"exponents", {mode(f.exponents[0]), mode(f.exponents[1]), mode(f.exponents[2])}},
          {"u_remainder", f.u_remainder},
          {"parseval_defect", f.parseval_defect},
          {"mode_fit_residual", f.mode_fit_residual},
          {"a_twist", f.a_twist},
          {"c2", f.c2},
          {"tail", mode(f.tail)},
          {"beta", f.beta},
          {"v_remainder", f.v_remainder},
          {"slices", f.slice_t.size()}};
}

json to_json(const DefectReport& d) {
  return {{"b_north", d.b_north},
          {"b_south", d.b_south},
          {"force_north", d.force_north},
          {"force_south", d.force_south},
          {"difference", d.difference},
          {"predicted", d.predicted},
          {"mismatch", d.mismatch},
          {"rod_variation_north", d.rod_variation_north},
          {"rod_variation_south", d.rod_variation_south}};
}

json to_json(const NHGLimitReport& r) {
  json profiles = json::array();
  for (const auto& p : r.profiles) {
    json row = json::array();
    for (const NHGComponents& g : p) row.push_back(nhg_components(g));
    profiles.push_back(row);
  }
  return {{"eps", r.eps},
          {"t", r.t},
          {"distance", r.distance},
          {"monotone", r.monotone},
          {"reference", {{"a", r.reference.a}, {"b", r.reference.b}}},
          {"rbar", r.rbar},
          {"omega", r.omega},
          {"w0", r.w0},
          {"w_slope", r.w_slope},
          {"alpha0", r.alpha0},
          {"theta", r.theta},
          {"profiles", profiles}};
}

json metric_summary(const MetricFields& mf) {
  return {{"gauge", mf.gauge == AlphaGauge::NorthRod ? "north-rod" : "near-horizon"},
          {"alpha_shift", mf.alpha_shift},
          {"theta_ref_index", mf.theta_ref},
          {"w_curl", mf.w_curl},
          {"w_curl_window", mf.w_curl_window},
          {"alpha_curl", mf.alpha_curl},
          {"alpha_curl_window", mf.alpha_curl_window},
          {"w_path_defect", mf.w_path_defect},
          {"alpha_path_defect", mf.alpha_path_defect}};
}

SolveConfig solve_config_from_json(const json& j) {
  SolveConfig c;
  if (!j.is_object()) return c;
  c.max_newton_iters = j.value("max_newton_iters", c.max_newton_iters);
  c.residual_tol = j.value("residual_tol", c.residual_tol);
  c.damping = j.value("damping", c.damping);
  c.min_step = j.value("min_step", c.min_step);
  c.continuation_steps = j.value("continuation_steps", c.continuation_steps);
  c.lambda_guard = j.value("lambda_guard", c.lambda_guard);
  c.armijo = j.value("armijo", c.armijo);
  c.validate();
  return c;
}

json to_json(const SolveConfig& c) {
  return {{"max_newton_iters", c.max_newton_iters}, {"residual_tol", c.residual_tol},
          {"damping", c.damping},                   {"min_step", c.min_step},
          {"continuation_steps", c.continuation_steps}, {"lambda_guard", c.lambda_guard},
          {"armijo", c.armijo}};
}

}  // namespace singmap
