#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evkws/codec.hpp"
#include "evkws/event.hpp"
#include "evkws/filtration.hpp"
#include "evkws/graph.hpp"
#include "evkws/hw_model.hpp"

namespace evkws {

// section -> key -> raw value, as read from an INI file.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_map(const std::filesystem::path& path);
// Applies "section.key=value" overrides.
void apply_overrides(ConfigMap& map, const std::vector<std::string>& overrides);
std::string to_ini(const ConfigMap& map);

// Expands comma-separated value lists into their Cartesian product. Keys are
// iterated in sorted order, the last key varying fastest.
std::vector<ConfigMap> expand_sweep(const ConfigMap& map);

// Per-sensor defaults for the graph: 32 -> 5/1, 64 -> 10/1, 128 -> 20/2, time radii 0/5000.
GraphParams default_graph_params(unsigned channels);

struct RunConfig {
    SensorConfig sensor;
    bool filtration_enabled = true;
    std::uint32_t div_factor = 8;
    std::uint32_t weight = 32;
    ThresholdSchedule schedule{ScheduleKind::exponential, 64, 32};
    GraphParams graph = default_graph_params(64);
    std::optional<std::filesystem::path> weights_path;
    std::uint64_t random_seed = 0;
    int class_count = 11;
    HwParams hw;
    std::optional<StreamFormat> format;  // unset: pick by file extension
    std::optional<std::filesystem::path> output;

    std::optional<FiltrationParams> filtration() const;
    // Throws ConfigError on any cross-field inconsistency.
    void validate() const;
};

// Unknown sections or keys are rejected. Relative paths resolve against `base_dir`.
RunConfig resolve_config(const ConfigMap& map, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const RunConfig& config);

}  // namespace evkws
