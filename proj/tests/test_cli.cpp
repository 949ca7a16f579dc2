#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "singmap/field_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("singmap_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SINGMAP_EXE) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string out(const std::string& name) { return (scratch() / name).string(); }

json report(const std::string& name) {
  return json::parse(singmap::read_text_file(out(name) + "/report.json"));
}

}  // namespace

TEST_CASE("residual command") {
  REQUIRE(run("residual --out " + out("res")) == 0);
  const json r = report("res");
  CHECK(r["status"] == "ok");
  CHECK(r["result"]["order"].get<double>() == doctest::Approx(2.0).epsilon(0.1));
  REQUIRE(run("residual --source tangent --a 1 --b 0.5 --out " + out("res_t")) == 0);
  CHECK(report("res_t")["result"]["order"].get<double>() == doctest::Approx(2.0).epsilon(0.1));
  REQUIRE(run("residual --source constant --grids 16 32 64 --out " + out("res_c")) == 0);
  for (const json& row : report("res_c")["result"]["table"])
    CHECK(row["sup_phi"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum command") {
  REQUIRE(run("spectrum --twist -k 5 --out " + out("spec")) == 0);
  const auto ev = report("spec")["result"]["spectrum"]["eigenvalues"].get<std::vector<double>>();
  const double expect[] = {4, 10, 18, 28, 40};
  REQUIRE(ev.size() == 5);
  for (int l = 0; l < 5; ++l) CHECK(std::fabs(ev[l] / expect[l] - 1) < 5e-3);
  CHECK(fs::exists(out("spec") + "/fields/eigenfunctions.csv"));
}

TEST_CASE("solve, tangent-fit and verify pipeline") {
  REQUIRE(run("solve --out " + out("solve")) == 0);
  const json s = report("solve");
  CHECK(s["result"]["solve"]["converged"] == true);
  CHECK(s["result"]["sup_error_vs_closed_form"].get<double>() <
        5 * s["result"]["closed_form_residual_sup_interior"].get<double>());
  REQUIRE(run("tangent-fit --out " + out("tfit")) == 0);
  const json f = report("tfit")["result"]["fit"];
  CHECK(std::fabs(f["a"].get<double>() - 2) < 1e-3);
  CHECK(std::fabs(f["b"].get<double>()) < 1e-3);
  // tangent fit of the solver output, read back from its state container
  REQUIRE(run("tangent-fit --state " + out("solve") + "/state.json --out " + out("tfit_state")) == 0);
  CHECK(std::fabs(report("tfit_state")["result"]["fit"]["a"].get<double>() - 2) < 1e-3);
  CHECK(run("verify " + out("tfit_state")) == 0);
  CHECK(run("verify " + out("solve")) == 0);
  singmap::write_text_file(out("solve") + "/fields/v.csv", "t,theta,value\n");
  CHECK(run("verify " + out("solve")) == 5);
}

TEST_CASE("nhg command reports the defect difference") {
  REQUIRE(run("nhg --source tangent --a 1 --b 0.6 --set grid.n_t=241 --out " + out("nhg")) == 0);
  const json r = report("nhg")["result"];
  CHECK(r["defects"]["difference"].get<double>() == doctest::Approx(std::log(4.0)).epsilon(1e-3));
  for (const json& d : r["nhg"]["distance"]) CHECK(d.get<double>() < 1e-3);
}

TEST_CASE("infinity-fit and reconstruct") {
  REQUIRE(run("infinity-fit --out " + out("inf")) == 0);
  const json f = report("inf")["result"]["fit"];
  CHECK(std::fabs(f["c0"].get<double>()) < 1e-3);
  CHECK(std::fabs(f["Y0"].get<double>() + 1) < 1e-3);
  CHECK(std::fabs(f["a_twist"].get<double>() - 2) < 1e-3);
  REQUIRE(run("reconstruct --out " + out("rec")) == 0);
  for (const char* name : {"U", "w", "alpha", "integrability_residual"})
    CHECK(fs::exists(out("rec") + "/fields/" + name + ".csv"));
  CHECK(std::fabs(report("rec")["result"]["defects"]["difference"].get<double>()) < 1e-3);
}

TEST_CASE("reports are deterministic") {
  REQUIRE(run("nhg --out " + out("det1")) == 0);
  REQUIRE(run("nhg --out " + out("det2")) == 0);
  CHECK(singmap::read_text_file(out("det1") + "/report.json") ==
        singmap::read_text_file(out("det2") + "/report.json"));
  REQUIRE(std::system(("SINGMAP_THREADS=3 " + std::string(SINGMAP_EXE) + " nhg --out " + out("det3") +
                       " >/dev/null 2>&1").c_str()) == 0);
  CHECK(singmap::read_text_file(out("det1") + "/report.json") ==
        singmap::read_text_file(out("det3") + "/report.json"));
}

TEST_CASE("exit codes") {
  CHECK(run("solve --set solver.max_newton_iters=1 --out " + out("nonconv")) == 3);
  CHECK(report("nonconv")["error"]["kind"] == "non_convergence");
  CHECK(report("nonconv")["result"]["solve"]["iterations"].get<int>() == 1);
  CHECK(run("residual --set grids=3 --out " + out("badcfg")) == 2);
  CHECK(run("infinity-fit --renormalizer sin --out " + out("badren")) == 2);
  CHECK(run("tangent-fit --set grid.t_max=3 --out " + out("short")) == 2);
  CHECK(run("solve") == 2);
  // config file plus a flag override; the flag wins
  singmap::write_text_file(out("cfg.json"), R"({"k": 3, "n_theta": 64})");
  REQUIRE(run("spectrum --config " + out("cfg.json") + " -k 2 --out " + out("cfgrun")) == 0);
  const json r = report("cfgrun");
  CHECK(r["config"]["k"] == 2);
  CHECK(r["config"]["n_theta"] == 64);
  CHECK(r["result"]["spectrum"]["eigenvalues"].size() == 2);
}
