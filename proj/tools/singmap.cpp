// singmap: command-line driver for the harmonic-map pipeline.
//
//   singmap <command> [--config FILE] [overrides] --out DIR
//
// Every run writes DIR/report.json, DIR/fields/*.csv and DIR/manifest.json.
// report.json carries no timing data so identical runs are byte-identical;
// wall-clock time and SHA-256 digests live in manifest.json.

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "singmap/asymptotics.hpp"
#include "singmap/cylinder_ops.hpp"
#include "singmap/errors.hpp"
#include "singmap/field_io.hpp"
#include "singmap/reconstruction.hpp"
#include "singmap/regression.hpp"
#include "singmap/reports.hpp"
#include "singmap/solver.hpp"
#include "singmap/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace singmap;

namespace {

json default_grid(double t_min, double t_max, int n_t, int n_theta) {
  return {{"t_min", t_min}, {"t_max", t_max}, {"n_t", n_t}, {"n_theta", n_theta}};
}

std::vector<double> default_ladder() {
  std::vector<double> e;
  for (int k = 2; k <= 6; ++k) e.push_back(std::ldexp(1.0, -k));
  return e;
}

json defaults(const std::string& cmd) {
  json base{{"source", "kerr"}, {"m", 1.0}, {"a", 1.0}, {"b", 0.0},
            {"renormalizer", "sin"}, {"state", ""}};
  if (cmd == "residual") {
    base["grids"] = {64, 128, 256};
    base["t_min"] = 0.0;
    base["t_max"] = 4.0;
  } else if (cmd == "solve") {
    base["grid"] = default_grid(2, 8, 97, 32);
    base["eps"] = 0.0;
    base["seed"] = 0;
    base["solver"] = to_json(SolveConfig{});
  } else if (cmd == "spectrum") {
    base = {{"operator", "twist"}, {"k", 5}, {"n_theta", 512}, {"a", 1.0}, {"b", 0.0},
            {"penalty", 0}};
  } else if (cmd == "tangent-fit") {
    base["grid"] = default_grid(2, 10, 161, 64);
    base["window"] = nullptr;
  } else if (cmd == "infinity-fit") {
    base["renormalizer"] = "rho";
    base["grid"] = default_grid(-std::log(1e3), -std::log(10.0), 201, 128);
    base["window"] = nullptr;
  } else if (cmd == "reconstruct") {
    base["grid"] = default_grid(2, 10, 161, 64);
    base["gauge"] = "north-rod";
  } else if (cmd == "nhg") {
    base["grid"] = default_grid(0, 10, 321, 128);
    base["eps_ladder"] = default_ladder();
    base["rbar"] = 1.0;
  }
  return base;
}

void set_path(json& cfg, const std::string& dotted, const json& value) {
  json* node = &cfg;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  require(!parts.empty(), "empty --set key");
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    if (!(*node)[parts[k]].is_object()) (*node)[parts[k]] = json::object();
    node = &(*node)[parts[k]];
  }
  (*node)[parts.back()] = value;
}

CylinderGrid grid_of(const json& g) {
  return CylinderGrid(g.at("t_min").get<double>(), g.at("t_max").get<double>(),
                      g.at("n_t").get<int>(), g.at("n_theta").get<int>());
}

// the input map state of a command: a closed form sampled on the grid, or
// a state container written by an earlier solve
MapState source_state(const json& cfg, std::vector<std::string>& inputs) {
  const std::string src = cfg.at("source");
  if (src == "state" || !cfg.at("state").get<std::string>().empty()) {
    const std::string path = cfg.at("state");
    require(!path.empty(), "source 'state' needs --state FILE");
    inputs.push_back(path);
    try {
      return state_from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
      fail(ErrorCode::Config, "cannot parse state file " + path + ": " + e.what());
    }
  }
  const CylinderGrid g = grid_of(cfg.at("grid"));
  const Renormalizer w = renormalizer_from_name(cfg.at("renormalizer"));
  if (src == "kerr") return sample_kerr(g, KerrParams(cfg.at("m").get<double>()), w);
  if (src == "tangent")
    return lift_tangent(g, TangentParams(cfg.at("a").get<double>(), cfg.at("b").get<double>()), w);
  fail(ErrorCode::Config, "unknown source '" + src + "' (kerr, tangent, state)");
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::InvariantBreach, "SHA-256 failed");
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k)
    os << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
  return os.str();
}

struct Run {
  std::string command;
  json config;
  fs::path out;
  json result = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;  // relative to out

  void write(const std::string& rel, const std::string& text) {
    const fs::path p = out / rel;
    fs::create_directories(p.parent_path());
    write_text_file(p.string(), text);
    outputs.push_back(rel);
  }
  void field(const std::string& name, const Field& f) { write("fields/" + name + ".csv", field_to_csv(f)); }
};

std::string profile_csv(const std::vector<std::string>& header,
                        const std::vector<std::vector<double>>& cols) {
  std::string s;
  for (std::size_t c = 0; c < header.size(); ++c) s += (c ? "," : "") + header[c];
  s += "\n";
  for (std::size_t r = 0; r < cols.front().size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) s += (c ? "," : "") + format_double(cols[c][r]);
    s += "\n";
  }
  return s;
}

// ---- commands

int cmd_residual(Run& run) {
  const json& cfg = run.config;
  const std::string src = cfg.at("source");
  const double t0 = cfg.at("t_min"), t1 = cfg.at("t_max");
  json rows = json::array();
  std::vector<double> hs, sups;
  for (int n : cfg.at("grids").get<std::vector<int>>()) {
    const CylinderGrid g(t0, t1, n + 1, n);
    MapState s = [&]() -> MapState {
      if (src == "constant")
        return MapState{Field(g), Field(g), Renormalizer::translation_invariant(), 0.0, 0.0};
      json c = cfg;
      c["grid"] = grid_to_json(g);
      return source_state(c, run.inputs);
    }();
    const Residual r = residual(s);
    const double h = g.dtheta();
    hs.push_back(h);
    sups.push_back(src == "constant" ? r.phi.sup_norm() : r.sup());
    rows.push_back({{"n", n}, {"h", h}, {"sup_phi", r.phi.sup_norm()}, {"sup_v", r.v.sup_norm()},
                    {"sup", r.sup()}, {"sup_interior", r.sup_interior()}});
  }
  run.result["table"] = rows;
  std::vector<std::vector<double>> cols{hs, sups};
  run.write("fields/residual_table.csv", profile_csv({"h", "sup"}, cols));
  if (src == "constant") {
    run.result["order"] = nullptr;
    run.result["note"] = "constant state: R_Phi = 1 on every grid, no order check";
    return 0;
  }
  require(sups.size() >= 2, "residual ladder needs >= 2 grids");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    lx.push_back(std::log(hs[k]));
    ly.push_back(std::log(sups[k]));
  }
  const LinearFit f = ols(lx, ly);
  run.result["order"] = f.slope;
  run.result["order_r2"] = f.r2;
  if (!(f.slope >= 1.8))
    fail(ErrorCode::InvariantBreach, "residual order " + std::to_string(f.slope) + " < 1.8");
  return 0;
}

int cmd_solve(Run& run) {
  const json& cfg = run.config;
  const CylinderGrid g = grid_of(cfg.at("grid"));
  const Renormalizer w = renormalizer_from_name(cfg.at("renormalizer"));
  const SolveConfig sc = solve_config_from_json(cfg.at("solver"));
  const std::string src = cfg.at("source");
  const int n = g.n_theta();
  SphereData lo, hi;
  double a = 0;
  std::optional<MapState> exact;
  if (src == "kerr") {
    const KerrParams k(cfg.at("m").get<double>());
    lo = kerr_profile(n, k, g.t_min(), w);
    hi = kerr_profile(n, k, g.t_max(), w);
    a = 2 * k.m * k.m;
    exact = sample_kerr(g, k, w);
  } else if (src == "tangent") {
    require(w.t_independent(), "tangent data needs a t-independent renormalizer");
    const TangentParams p(cfg.at("a").get<double>(), cfg.at("b").get<double>());
    const double eps = cfg.at("eps");
    lo = eps != 0 ? perturbed_tangent_profile(n, p, eps, cfg.at("seed").get<unsigned>())
                  : tangent_profile(n, p);
    hi = tangent_profile(n, p);
    a = p.a;
    if (eps == 0) exact = lift_tangent(g, p, w);
  } else {
    fail(ErrorCode::Config, "solve needs source kerr or tangent");
  }
  SolveReport rep;
  try {
    if (sc.continuation_steps > 1) {
      // homotopy from the harmonic interpolation of the data scaled to a
      // single trace, ending at the requested data
      rep = continuation_solve(g, w, a, lo, hi, a, lo, hi, sc.continuation_steps, std::nullopt, sc).last();
    } else {
      rep = solve_dirichlet(g, w, a, lo, hi, std::nullopt, sc);
    }
  } catch (const SolveError& e) {
    run.result["solve"] = to_json(e.report);
    throw;
  }
  run.result["solve"] = to_json(rep);
  const MapState& s = *rep.final_state;
  run.field("phi", s.phi);
  run.field("v", s.v);
  run.write("state.json", state_to_json(s).dump(1) + "\n");
  const Residual r = residual(s);
  run.result["residual_sup_interior"] = r.sup_interior();
  if (exact) {
    double err = 0;
    for (std::size_t k = 0; k < s.phi.values().size(); ++k)
      err = std::max({err, std::fabs(s.phi.values()[k] - exact->phi.values()[k]),
                      std::fabs(s.v.values()[k] - exact->v.values()[k])});
    run.result["sup_error_vs_closed_form"] = err;
    run.result["closed_form_residual_sup_interior"] = residual(*exact).sup_interior();
  }
  return 0;
}

int cmd_spectrum(Run& run) {
  const json& cfg = run.config;
  const std::string op = cfg.at("operator");
  const int n = cfg.at("n_theta"), k = cfg.at("k");
  const ThetaGeometry geo(n);
  if (op == "twist") {
    const EigenReport r = twist_spectrum(n, k);
    run.result["spectrum"] = to_json(r);
    std::vector<std::vector<double>> cols{geo.theta};
    std::vector<std::string> head{"theta"};
    for (int l = 0; l < k; ++l) {
      cols.push_back(r.eigenfunctions[l][0].values);
      head.push_back("w" + std::to_string(l + 1));
    }
    run.write("fields/eigenfunctions.csv", profile_csv(head, cols));
  } else if (op == "linearized") {
    const TangentParams p(cfg.at("a").get<double>(), cfg.at("b").get<double>());
    const KernelReport r = kernel_spectrum(p, n, k, cfg.at("penalty").get<int>());
    run.result["kernel"] = to_json(r);
    std::vector<std::vector<double>> cols{geo.theta};
    std::vector<std::string> head{"theta"};
    for (int l = 0; l < k; ++l)
      for (int c = 0; c < 2; ++c) {
        cols.push_back(r.spectrum.eigenfunctions[l][c].values);
        head.push_back("e" + std::to_string(l + 1) + "_" + std::to_string(c + 1));
      }
    run.write("fields/eigenfunctions.csv", profile_csv(head, cols));
  } else {
    fail(ErrorCode::Config, "operator must be twist or linearized");
  }
  return 0;
}

std::optional<std::pair<double, double>> window_of(const json& cfg) {
  const json& w = cfg.at("window");
  if (w.is_null()) return std::nullopt;
  require(w.is_array() && w.size() == 2, "window must be [lo, hi]");
  return std::make_pair(w[0].get<double>(), w[1].get<double>());
}

int cmd_tangent_fit(Run& run) {
  const MapState s = source_state(run.config, run.inputs);
  TangentFitOptions opt;
  opt.window = window_of(run.config);
  const TangentFit f = fit_tangent(s, opt);
  run.result["fit"] = to_json(f);
  run.write("fields/tangent_distance.csv", profile_csv({"t", "distance"}, {f.slice_t, f.residuals}));
  return 0;
}

int cmd_infinity_fit(Run& run) {
  const MapState s = source_state(run.config, run.inputs);
  InfinityFitOptions opt;
  opt.window = window_of(run.config);
  run.result["fit"] = to_json(fit_infinity(s, opt));
  return 0;
}

// b for the defect prediction: the configured value for tangent sources,
// otherwise the fitted tangent map when one can be fitted
std::optional<TangentParams> tangent_of(const Run& run, const MapState& s, json& note) {
  const json& cfg = run.config;
  if (cfg.at("source") == "tangent" && cfg.at("state").get<std::string>().empty())
    return TangentParams(cfg.at("a").get<double>(), cfg.at("b").get<double>());
  try {
    const TangentFit f = fit_tangent(s);
    note = to_json(f);
    return f.params;
  } catch (const Error& e) {
    note = std::string("no tangent fit: ") + e.what();
    return std::nullopt;
  }
}

int cmd_reconstruct(Run& run) {
  const MapState s = source_state(run.config, run.inputs);
  json note;
  const auto tp = tangent_of(run, s, note);
  run.result["tangent"] = note.is_null() ? json("configured") : note;
  const std::string gauge = run.config.at("gauge");
  require(gauge == "north-rod" || gauge == "near-horizon", "gauge must be north-rod or near-horizon");
  const MetricFields mf =
      reconstruct(s, gauge == "north-rod" ? AlphaGauge::NorthRod : AlphaGauge::NearHorizon, tp);
  run.result["metric"] = metric_summary(mf);
  if (tp) run.result["defects"] = to_json(angle_defects(mf, tp->b));
  run.field("U", mf.U);
  run.field("w", mf.w);
  run.field("alpha", mf.alpha);
  run.field("integrability_residual", mf.integrability_residual);
  return 0;
}

int cmd_nhg(Run& run) {
  const MapState s = source_state(run.config, run.inputs);
  json note;
  const auto tp = tangent_of(run, s, note);
  if (!tp) fail(ErrorCode::FitUnstable, note.get<std::string>());
  run.result["tangent"] = note.is_null() ? json("configured") : note;
  const NHGLimitReport r = nhg_limit(s, run.config.at("eps_ladder").get<std::vector<double>>(), *tp,
                                     run.config.at("rbar").get<double>());
  run.result["nhg"] = to_json(r);
  run.result["defects"] = to_json(angle_defects(reconstruct(s), tp->b));
  run.write("fields/nhg_distance.csv", profile_csv({"eps", "distance"}, {r.eps, r.distance}));
  return 0;
}

void finish(Run& run, int code, const std::string& error_kind, const std::string& message,
            double seconds) {
  json report{{"tool", "singmap"},
              {"version", SINGMAP_VERSION},
              {"command", run.command},
              {"config", run.config},
              {"status", code == 0 ? "ok" : "error"},
              {"exit_code", code},
              {"result", run.result}};
  if (code != 0) report["error"] = {{"kind", error_kind}, {"message", message}};
  run.write("report.json", report.dump(1) + "\n");
  json files = json::array(), ins = json::array();
  for (const std::string& rel : run.outputs)
    files.push_back({{"path", rel}, {"sha256", sha256_hex(read_text_file((run.out / rel).string()))}});
  for (const std::string& p : run.inputs)
    ins.push_back({{"path", fs::absolute(p).string()}, {"sha256", sha256_hex(read_text_file(p))}});
  json manifest{{"tool", "singmap"},
                {"version", SINGMAP_VERSION},
                {"command", run.command},
                {"config", run.config},
                {"wall_clock_seconds", seconds},
                {"threads", std::getenv("SINGMAP_THREADS") ? std::getenv("SINGMAP_THREADS") : "1"},
                {"inputs", ins},
                {"outputs", files}};
  write_text_file((run.out / "manifest.json").string(), manifest.dump(1) + "\n");
}

int verify(const std::string& dir) {
  const fs::path root(dir);
  const json m = json::parse(read_text_file((root / "manifest.json").string()));
  int bad = 0;
  auto check = [&](const std::string& path, const std::string& digest) {
    std::string actual;
    try {
      actual = sha256_hex(read_text_file(path));
    } catch (const Error&) {
      actual = "missing";
    }
    const bool ok = actual == digest;
    bad += !ok;
    std::cout << (ok ? "ok       " : "MISMATCH ") << path << "\n";
  };
  for (const json& f : m.at("outputs")) check((root / f.at("path").get<std::string>()).string(), f.at("sha256"));
  for (const json& f : m.at("inputs")) check(f.at("path"), f.at("sha256"));
  if (bad) fail(ErrorCode::InvariantBreach, std::to_string(bad) + " digest(s) do not match");
  return 0;
}

struct Flags {
  std::string config_file, out, source, state, renormalizer, op, gauge;
  std::optional<double> m, a, b, eps, t_min, t_max, rbar;
  std::optional<int> n_theta, n_t, k, seed, penalty;
  std::vector<int> grids;
  std::vector<double> window, ladder;
  std::vector<std::string> sets;
  bool twist = false, linearized = false;
};

void add_common(CLI::App* c, Flags& f) {
  c->add_option("--config", f.config_file, "JSON config file");
  c->add_option("--out", f.out, "output directory")->required();
  c->add_option("--set", f.sets, "override key=value (dotted keys, JSON values)");
}

void add_source(CLI::App* c, Flags& f) {
  c->add_option("--source", f.source, "kerr, tangent or state");
  c->add_option("--state", f.state, "state container from an earlier solve");
  c->add_option("--m", f.m, "Kerr mass");
  c->add_option("--a", f.a, "tangent parameter a");
  c->add_option("--b", f.b, "tangent parameter b");
  c->add_option("--renormalizer", f.renormalizer, "sin or rho");
  c->add_option("--n-theta", f.n_theta);
  c->add_option("--n-t", f.n_t);
  c->add_option("--t-min", f.t_min);
  c->add_option("--t-max", f.t_max);
}

json build_config(const std::string& cmd, const Flags& f) {
  json cfg = defaults(cmd);
  if (!f.config_file.empty()) {
    json file;
    try {
      file = json::parse(read_text_file(f.config_file));
    } catch (const json::exception& e) {
      fail(ErrorCode::Config, "cannot parse config " + f.config_file + ": " + e.what());
    }
    require(file.is_object(), "config file must hold a JSON object");
    cfg.merge_patch(file);
  }
  auto put = [&](const std::string& k, const auto& v) { set_path(cfg, k, v); };
  const bool has_grid = cfg.contains("grid");
  if (!f.source.empty()) put("source", f.source);
  if (!f.state.empty()) {
    put("state", f.state);
    put("source", "state");
  }
  if (!f.renormalizer.empty()) put("renormalizer", f.renormalizer);
  if (f.m) put("m", *f.m);
  if (f.a) put("a", *f.a);
  if (f.b) put("b", *f.b);
  if (f.eps) put("eps", *f.eps);
  if (f.seed) put("seed", *f.seed);
  if (f.k) put("k", *f.k);
  if (f.penalty) put("penalty", *f.penalty);
  if (f.rbar) put("rbar", *f.rbar);
  if (!f.gauge.empty()) put("gauge", f.gauge);
  if (f.twist) put("operator", "twist");
  if (f.linearized) put("operator", "linearized");
  if (!f.op.empty()) put("operator", f.op);
  if (!f.grids.empty()) put("grids", f.grids);
  if (!f.ladder.empty()) put("eps_ladder", f.ladder);
  if (!f.window.empty()) put("window", f.window);
  const std::string gp = has_grid ? "grid." : "";
  if (f.n_theta) put(gp + "n_theta", *f.n_theta);
  if (f.n_t && has_grid) put("grid.n_t", *f.n_t);
  if (f.t_min) put(gp + "t_min", *f.t_min);
  if (f.t_max) put(gp + "t_max", *f.t_max);
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos, "--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json v = json::parse(val, nullptr, false);
    put(key, v.is_discarded() ? json(val) : v);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singmap: harmonic maps near extreme horizons"};
  app.set_version_flag("--version", std::string(SINGMAP_VERSION));
  app.require_subcommand(1);
  Flags f;
  std::string verify_dir;

  auto* residual_c = app.add_subcommand("residual", "PDE residual of a closed form on a grid ladder");
  add_common(residual_c, f);
  add_source(residual_c, f);
  residual_c->add_option("--grids", f.grids, "n for the n x n grids");

  auto* solve_c = app.add_subcommand("solve", "Dirichlet problem on a cylinder segment");
  add_common(solve_c, f);
  add_source(solve_c, f);
  solve_c->add_option("--eps", f.eps, "perturbation of the tangent data at t_min");
  solve_c->add_option("--seed", f.seed);

  auto* spectrum_c = app.add_subcommand("spectrum", "twist or linearized spectrum");
  add_common(spectrum_c, f);
  spectrum_c->add_flag("--twist", f.twist);
  spectrum_c->add_flag("--linearized", f.linearized);
  spectrum_c->add_option("-k", f.k, "number of eigenvalues");
  spectrum_c->add_option("--n-theta", f.n_theta);
  spectrum_c->add_option("--a", f.a);
  spectrum_c->add_option("--b", f.b);
  spectrum_c->add_option("--penalty", f.penalty, "azimuthal mode m of the penalty term");

  auto* tfit_c = app.add_subcommand("tangent-fit", "tangent map and rate at t -> +infinity");
  add_common(tfit_c, f);
  add_source(tfit_c, f);
  tfit_c->add_option("--window", f.window, "t window for the rate fit")->expected(2);

  auto* ifit_c = app.add_subcommand("infinity-fit", "expansion at t -> -infinity");
  add_common(ifit_c, f);
  add_source(ifit_c, f);
  ifit_c->add_option("--window", f.window, "t window")->expected(2);

  auto* rec_c = app.add_subcommand("reconstruct", "metric functions w, alpha and angle defects");
  add_common(rec_c, f);
  add_source(rec_c, f);
  rec_c->add_option("--gauge", f.gauge, "north-rod or near-horizon");

  auto* nhg_c = app.add_subcommand("nhg", "near-horizon limit along an eps ladder");
  add_common(nhg_c, f);
  add_source(nhg_c, f);
  nhg_c->add_option("--eps-ladder", f.ladder, "decreasing eps values");
  nhg_c->add_option("--rbar", f.rbar);

  auto* verify_c = app.add_subcommand("verify", "re-check manifest digests of a run directory");
  verify_c->add_option("dir", verify_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_status(ErrorCode::Config);
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub == verify_c) {
    try {
      return verify(verify_dir);
    } catch (const Error& e) {
      std::cerr << "singmap: " << e.what() << "\n";
      return exit_status(e.code());
    } catch (const std::exception& e) {
      std::cerr << "singmap: " << e.what() << "\n";
      return exit_status(ErrorCode::Config);
    }
  }

  Run run;
  run.command = sub->get_name();
  run.out = f.out;
  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  std::string kind, message;
  try {
    run.config = build_config(run.command, f);
    fs::create_directories(run.out);
    if (run.command == "residual") code = cmd_residual(run);
    else if (run.command == "solve") code = cmd_solve(run);
    else if (run.command == "spectrum") code = cmd_spectrum(run);
    else if (run.command == "tangent-fit") code = cmd_tangent_fit(run);
    else if (run.command == "infinity-fit") code = cmd_infinity_fit(run);
    else if (run.command == "reconstruct") code = cmd_reconstruct(run);
    else if (run.command == "nhg") code = cmd_nhg(run);
  } catch (const Error& e) {
    code = exit_status(e.code());
    kind = to_string(e.code());
    message = e.what();
  } catch (const json::exception& e) {
    code = exit_status(ErrorCode::Config);
    kind = to_string(ErrorCode::Config);
    message = e.what();
  } catch (const fs::filesystem_error& e) {
    code = exit_status(ErrorCode::Config);
    kind = to_string(ErrorCode::Config);
    message = e.what();
  }
  if (code != 0) std::cerr << "singmap " << run.command << ": " << kind << ": " << message << "\n";
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    fs::create_directories(run.out);
    finish(run, code, kind, message, seconds);
  } catch (const std::exception& e) {
    std::cerr << "singmap: cannot write outputs: " << e.what() << "\n";
    return code ? code : exit_status(ErrorCode::Config);
  }
  return code;
}
