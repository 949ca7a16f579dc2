#include "singmap/field_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "singmap/errors.hpp"

namespace singmap {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string field_to_csv(const Field& f) {
  const CylinderGrid& g = f.grid();
  std::string out = "t,theta,value\n";
  out.reserve(out.size() + g.size() * 72);
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_theta(); ++j) {
      out += format_double(g.t(i));
      out += ',';
      out += format_double(g.theta(j));
      out += ',';
      out += format_double(f(i, j));
      out += '\n';
    }
  return out;
}

Field field_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,theta,value", 0) != 0)
    fail(ErrorCode::Config, "field CSV must start with the header t,theta,value");
  std::vector<double> ts, ths, vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.c_str();
    char* end = nullptr;
    double x[3];
    for (int k = 0; k < 3; ++k) {
      x[k] = std::strtod(p, &end);
      if (end == p) fail(ErrorCode::Config, "malformed field CSV row: " + line);
      p = end;
      if (k < 2) {
        if (*p != ',') fail(ErrorCode::Config, "malformed field CSV row: " + line);
        ++p;
      }
    }
    ts.push_back(x[0]);
    ths.push_back(x[1]);
    vals.push_back(x[2]);
  }
  require(!vals.empty(), "field CSV has no rows");
  int n_theta = 1;
  while (n_theta < int(ts.size()) && ts[n_theta] == ts[0]) ++n_theta;
  require(ts.size() % n_theta == 0, "field CSV rows do not form a grid");
  const int n_t = int(ts.size()) / n_theta;
  const CylinderGrid g(ts.front(), ts.back(), n_t, n_theta);
  return Field(g, std::move(vals));
}

nlohmann::json grid_to_json(const CylinderGrid& g) {
  return {{"t_min", g.t_min()}, {"t_max", g.t_max()}, {"n_t", g.n_t()},
          {"n_theta", g.n_theta()}};
}

CylinderGrid grid_from_json(const nlohmann::json& j) {
  try {
    return CylinderGrid(j.at("t_min").get<double>(), j.at("t_max").get<double>(),
                        j.at("n_t").get<int>(), j.at("n_theta").get<int>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, std::string("bad grid record: ") + e.what());
  }
}

nlohmann::json fields_to_json(const CylinderGrid& g,
                              const std::map<std::string, const Field*>& fields) {
  nlohmann::json out;
  out["grid"] = grid_to_json(g);
  out["fields"] = nlohmann::json::object();
  for (const auto& [name, f] : fields) {
    require(f->grid() == g, "field '" + name + "' is on a different grid");
    out["fields"][name] = f->values();
  }
  return out;
}

std::map<std::string, Field> fields_from_json(const nlohmann::json& j) {
  const CylinderGrid g = grid_from_json(j.at("grid"));
  std::map<std::string, Field> out;
  try {
    for (const auto& [name, arr] : j.at("fields").items())
      out.emplace(name, Field(g, arr.get<std::vector<double>>()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, std::string("bad field container: ") + e.what());
  }
  return out;
}

nlohmann::json state_to_json(const MapState& s) {
  require(s.omega.kind() != RenormalizerKind::Custom,
          "custom renormalizers cannot be serialized");
  nlohmann::json j = fields_to_json(s.grid(), {{"phi", &s.phi}, {"v", &s.v}});
  j["a"] = s.a;
  j["v_shift"] = s.v_shift;
  j["renormalizer"] = s.omega.name();
  return j;
}

MapState state_from_json(const nlohmann::json& j) {
  auto fields = fields_from_json(j);
  require(fields.count("phi") && fields.count("v"),
          "state container needs fields phi and v");
  try {
    return make_state(fields.at("phi"), fields.at("v"),
                      renormalizer_from_name(j.at("renormalizer").get<std::string>()),
                      j.at("a").get<double>(), j.value("v_shift", 0.0));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, std::string("bad state container: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Config, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Config, "cannot write " + path);
  out << text;
}

}  // namespace singmap
