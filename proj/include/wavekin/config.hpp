#pragma once

// Scenario files: YAML documents in natural units (hbar = c = 1).
//
// A file either describes a scenario completely or names a built-in preset
// under `base:` and overrides some of its keys. Unknown keys are rejected;
// errors carry the 1-based line and the dotted field path.

#include "wavekin/scenarios.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace wavekin::config {

scenarios::Scenario parse_scenario(std::string_view text);
scenarios::Scenario load_scenario_file(const std::filesystem::path& path);

// Serializes a scenario; parse_scenario(to_yaml(s)) reproduces s exactly.
std::string to_yaml(const scenarios::Scenario& scenario);

// Applies "dotted.key=value" (value in YAML syntax), e.g. "kinetics.tau=2"
// or "thresholds.visibility.min=0.98".
void apply_override(scenarios::Scenario& scenario, std::string_view assignment);

// Commented template listing every key, printed by `list --template`.
std::string template_text();

} // namespace wavekin::config
