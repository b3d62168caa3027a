#pragma once

#include "ecdc/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ecdc::cli {

struct SimulationOptions {
    double horizon = 1e5;
    std::uint64_t seed = 1;
    int reps = 1;
};

struct SweepOptions {
    std::string param = "R";
    double from = 0.0;
    double to = 1.0;
    int steps = 11;
};

struct ScopeOptions {
    std::string kind = "full"; ///< "full" or "sampled"
    std::uint64_t k = 100;
    std::uint64_t seed = 1;
};

struct OutputOptions {
    std::string format = "json"; ///< "json" or "csv"
    std::string path;            ///< empty means stdout
    bool format_set = false;     ///< format given explicitly
};

/// One experiment: model parameters plus command-specific options.
struct ExperimentConfig {
    ModelParams model;
    std::optional<Policy> policy;
    std::optional<std::pair<int, int>> theta;
    std::uint64_t cap = kDefaultEnumerationCap;
    SimulationOptions simulation;
    SweepOptions sweep;
    ScopeOptions scope;
    OutputOptions output;
    std::string regime; ///< "high", "low", "mid" or empty for automatic
};

/// Names accepted under "model", in declaration order.
const std::vector<std::string>& model_field_names();

/// Pointer to the named field, or nullptr for ints and unknown names.
double* model_double_field(ModelParams& p, const std::string& name);
int* model_int_field(ModelParams& p, const std::string& name);

/// Throws ValidationError on unknown keys, wrong types or invalid values.
ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& p);

/// {"setup": [...], "sleep": [[...], ...]}
Policy policy_from_json(const nlohmann::json& j);
nlohmann::json policy_to_json(const Policy& d);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Reads and parses a config file; parse errors become ValidationError.
ExperimentConfig load_config(const std::string& path);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double v);

} // namespace ecdc::cli
