#pragma once

// JSON forms of the module reports, used by the CLI and kept free of
// wall-clock data so that identical runs serialize identically.

#include "json.hpp"

#include "singmap/asymptotics.hpp"
#include "singmap/reconstruction.hpp"
#include "singmap/solver.hpp"
#include "singmap/spectral.hpp"

namespace singmap {

nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const EigenReport& r, bool with_functions = false);
nlohmann::json to_json(const KernelReport& r);
nlohmann::json to_json(const TangentFit& f);
nlohmann::json to_json(const InfinityFit& f);
nlohmann::json to_json(const DefectReport& d);
nlohmann::json to_json(const NHGLimitReport& r);
// scalar summary of the reconstruction; the fields themselves go to CSV
nlohmann::json metric_summary(const MetricFields& mf);

SolveConfig solve_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SolveConfig& c);

}  // namespace singmap
