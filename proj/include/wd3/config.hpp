#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wd3/agent.hpp"

namespace wd3 {

// One experiment: environment, agent configuration, schedule and outputs.
// Defaults are the desk-scale settings; the full-scale values are one config
// away (agent.hidden_dim=256, agent.warmup_steps=25000, total_steps=1000000,
// eval_every=5000, 10 seeds, probe 50 x 1000).
struct RunConfig {
    std::string env_name;
    AgentConfig agent;
    long total_steps = 30000;
    long eval_every = 1000;
    int eval_episodes = 10;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string output_dir = "out";
    bool probe_enabled = false;
    long probe_every = 1000;
    int probe_trajectories = 10;
    int probe_transitions = 200;
    int probe_horizon = 1000;  // true-return rollout length; gamma^h must be small

    bool operator==(const RunConfig&) const = default;
};

// Flat key=value text, '#' comments, section-dotted keys (agent.beta=0.45).
// env_name and variant are required; everything else has a documented
// default. Unknown keys, malformed values and out-of-range values raise
// ConfigError with the line number.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Emits every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace wd3
