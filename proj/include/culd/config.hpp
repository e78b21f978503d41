#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "culd/experiment.hpp"

namespace culd {

// One CLI invocation. The document fields (spec, name) come from the config
// text; the rest come from command-line flags.
struct RunConfig {
    ExperimentSpec spec;
    std::string name;  // experiment.name, used in provenance lines
    std::filesystem::path out_dir = ".";
    bool emit_waveforms = false;
    std::optional<std::uint64_t> seed_override;
    std::string config_path;  // file path or "preset:<name>"
    unsigned threads = 1;

    bool operator==(const RunConfig&) const = default;
};

// Parses the sectioned key-value format:
//
//   [experiment]
//   kind = mac_sweep
//   [readout]
//   c_p = 3pF
//
// Quantities take an optional SI prefix and unit (3pF, 10uA, 50kOhm, 25ns).
// Omitted keys take defaults; experiment.kind is required; unknown sections
// and keys are rejected.
RunConfig parse_config(std::string_view text);

// Emits every document key in base SI units at full precision.
std::string serialize_config(const RunConfig& cfg);

// Parses a quantity such as "3pF" into base units. `unit` is the expected
// symbol ("F", "A", "Ohm", ...); an empty unit accepts bare numbers only.
double parse_quantity(std::string_view text, std::string_view unit, const std::string& key_path);

struct Preset {
    std::string_view name;
    std::string_view figure;
    std::string_view summary;
    std::string_view text;
};

std::span<const Preset> presets();
const Preset* find_preset(std::string_view name);
std::string list_presets();

// Reads a config file, or a bundled preset when no such file exists.
RunConfig load_config(const std::string& path_or_preset);

}  // namespace culd
