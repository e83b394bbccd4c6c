#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twt/simkit.hpp"

namespace twt::scenario {

/// Pass/fail thresholds a finished run is judged against. Only declared
/// fields participate; completion is always required unless waived.
struct VerdictThresholds {
    bool require_completion = true;
    std::optional<double> psi_error_max;
    std::optional<double> omega_error_rel_max;
    std::optional<double> id_max;
    std::optional<double> ih_max;
    std::optional<double> phase_sum_max;
};

struct Verdict {
    bool pass = true;
    std::vector<std::string> reasons;
};

Verdict judge(const sim::RunMetrics& metrics, const VerdictThresholds& thresholds);

/// A scenario plus its output controls, as read from a config file.
struct ScenarioConfig {
    sim::Scenario scenario;
    VerdictThresholds verdict;
    std::string out_dir = "out";
    bool write_csv = true;
    int csv_stride = 1;
    bool write_plots = false;
};

/// Baseline healthy scenario with the documented default parameter set.
ScenarioConfig default_config();

/// Parses the TOML-style config text. Every diagnostic names the offending
/// key or line; unknown keys are rejected.
ScenarioConfig load_string(const std::string& text, const std::string& origin = "<string>");
ScenarioConfig load_file(const std::string& path);

/// Reference config text matching default_config(), with comments.
std::string example_config_text();

}  // namespace twt::scenario
