#pragma once

#include "monolab/asymptotics.hpp"
#include "monolab/prevalence.hpp"
#include "monolab/report.hpp"
#include "monolab/symmetry.hpp"
#include "monolab/systems.hpp"

#include <json.hpp>

#include <string>

namespace monolab {

using Json = nlohmann::ordered_json;

Json to_json(const StateVector& x);
Json to_json(const PropertyReport& report);
Json to_json(const ClassifyBudget& budget);
Json to_json(const SamplerSpec& sampler);
Json to_json(const CycleRecord& cycle);
Json to_json(const Classification& c);
Json to_json(const ProbeReport& report);
Json to_json(const SeparationReport& report);
Json to_json(const SymmetryVerdict& verdict);
Json to_json(const SymmetryReport& report);
Json to_json(const LineReport& report);
Json to_json(const std::vector<LineRefinementLevel>& levels);
Json to_json(const PrevalenceReport& report);
Json describe(const SystemSpec& system);

ClassifyBudget budget_from_json(const Json& j);
SamplerSpec sampler_from_json(const Json& j);
PrevalenceReport prevalence_from_json(const Json& j);

/// Pretty JSON with a trailing newline; field order is fixed by construction.
std::string dump(const Json& j);

/// One row per verdict category, then total / wilson_low / wilson_high.
std::string prevalence_csv(const PrevalenceReport& report);

/// iter,node_0,…,node_{n−1}
std::string orbit_csv(const OrbitRecord& orbit, int dimension);
/// "iter sup_norm" per line, for external plotting.
std::string orbit_sup_norm_dat(const OrbitRecord& orbit);

}  // namespace monolab
