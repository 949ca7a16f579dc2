#include <cstring>
#include <random>

#include "doctest.h"
#include "singmap/errors.hpp"
#include "singmap/field_io.hpp"

using namespace singmap;

namespace {
bool bit_equal(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }
}  // namespace

TEST_CASE("CSV round trip is bit exact") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  const CylinderGrid g(-1.3, 2.7, 7, 9);
  Field f(g);
  for (auto& x : f.values()) x = U(rng) * std::exp(U(rng) / 50);
  f(0, 0) = 1e-310;  // subnormal
  f(1, 1) = -0.0;
  const Field back = field_from_csv(field_to_csv(f));
  CHECK(back.grid() == g);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(bit_equal(back.values()[k], f.values()[k]));
}

TEST_CASE("JSON container round trip is bit exact") {
  const CylinderGrid g(0, 1, 5, 6);
  Field a(g), b(g);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  for (auto& x : a.values()) x = N(rng);
  for (auto& x : b.values()) x = N(rng) * 1e-200;
  const auto j = fields_to_json(g, {{"a", &a}, {"b", &b}});
  const auto back = fields_from_json(nlohmann::json::parse(j.dump()));
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(bit_equal(back.at("a").values()[k], a.values()[k]));
    CHECK(bit_equal(back.at("b").values()[k], b.values()[k]));
  }
}

TEST_CASE("state container") {
  const MapState s = sample_kerr(CylinderGrid(1, 3, 5, 8), KerrParams(1.1));
  const MapState r = state_from_json(nlohmann::json::parse(state_to_json(s).dump()));
  CHECK(r.a == s.a);
  CHECK(r.omega.kind() == s.omega.kind());
  CHECK(r.phi.values() == s.phi.values());
}

TEST_CASE("malformed input is a config error") {
  CHECK_THROWS_AS(field_from_csv("x,y,z\n1,2,3\n"), Error);
  CHECK_THROWS_AS(field_from_csv("t,theta,value\n1,2\n"), Error);
}
