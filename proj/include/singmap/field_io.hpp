#pragma once

#include <map>
#include <string>

#include "json.hpp"

#include "singmap/grid.hpp"
#include "singmap/map_state.hpp"

namespace singmap {

// Decimal with 17 significant digits; parses back to the same double.
std::string format_double(double x);

// CSV with header "t,theta,value", one row per node, t outer.
std::string field_to_csv(const Field& f);
Field field_from_csv(const std::string& text);

nlohmann::json grid_to_json(const CylinderGrid& g);
CylinderGrid grid_from_json(const nlohmann::json& j);

// {"grid": {...}, "fields": {name: [values...]}}
nlohmann::json fields_to_json(const CylinderGrid& g,
                              const std::map<std::string, const Field*>& fields);
std::map<std::string, Field> fields_from_json(const nlohmann::json& j);

// A map state as a field container plus "a" and "renormalizer".
nlohmann::json state_to_json(const MapState& s);
MapState state_from_json(const nlohmann::json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace singmap
