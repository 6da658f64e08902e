#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hnoma/analytic.hpp"
#include "hnoma/montecarlo.hpp"

namespace hnoma {

// One experiment description: which schemes to run, over which scenario.
// The first scheme is the baseline in comparisons.
struct RunConfig {
  std::string label;
  std::vector<Scheme> schemes;
  double target_ber = 1e-2;
  ScenarioConfig scenario;         // scheme field mirrors schemes.front()
  bool halved_tail_average = true; // closed-form averaging variant
};

// Parses the sectioned key-value format documented in the README. Overrides
// are (dotted key, value) pairs applied after the file's own keys; they may
// replace file values but unknown keys are rejected just like in the file.
// Every structural, parse, and semantic problem is collected and reported in
// one std::invalid_argument.
RunConfig parse_run_config(
    const std::string& text,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

RunConfig load_run_config(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Canonical echo: parse_run_config(serialize_run_config(c)) reproduces c
// bit-exactly (doubles are printed with round-trip precision).
std::string serialize_run_config(const RunConfig& cfg);

// Closed-form counterpart of a two-user layered scenario.
AnalyticConfig analytic_from_run(const RunConfig& cfg);

}  // namespace hnoma
