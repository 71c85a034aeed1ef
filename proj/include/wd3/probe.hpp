#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wd3/agent.hpp"
#include "wd3/env.hpp"

namespace wd3 {

// One point of the estimation-bias curve: the critic's mean value over
// visited state-action pairs against the Monte Carlo mean true return from
// the trajectory starts.
struct BiasRecord {
    long env_step = 0;
    double mean_estimated_q = 0.0;
    double std_estimated_q = 0.0;
    double mean_true_return = 0.0;
    double std_true_return = 0.0;
    int trajectory_count = 0;
    int transitions_per_trajectory = 0;

    double bias() const { return mean_estimated_q - mean_true_return; }
};

// (state, action) pairs visited by the deterministic policy, grouped by
// trajectory, plus the reset seed that reproduces each trajectory start.
struct ProbeSet {
    std::vector<std::vector<std::pair<std::vector<double>, std::vector<double>>>> trajectories;
    std::vector<std::uint64_t> reset_seeds;

    std::size_t pair_count() const {
        std::size_t n = 0;
        for (const auto& t : trajectories) n += t.size();
        return n;
    }
};

// Rolls out the current deterministic policy (no exploration noise) on a
// clone of `env` with the step limit lifted; the training env and the
// training RNG stream are untouched.
ProbeSet collect_probe_set(Agent& agent, const Env& env, int trajectory_count,
                           int transitions_per_trajectory, std::uint64_t rng_seed);

// Mean and std of critic-1 outputs over all pairs (critic 1 drives the
// actor, so it is the value the policy optimizes).
std::pair<double, double> mean_estimated_q(const Agent& agent, const ProbeSet& probe);

// Discounted return of the deterministic policy from each trajectory start,
// re-rolled over `horizon` steps; truncation error is bounded by
// |r|_max * gamma^horizon / (1 - gamma).
std::pair<double, double> mean_true_return(Agent& agent, const Env& env, const ProbeSet& probe,
                                           double gamma, int horizon);

// collect + estimate + true return in one call.
BiasRecord probe_bias(Agent& agent, const Env& env, long env_step, int trajectory_count,
                      int transitions_per_trajectory, double gamma, int horizon,
                      std::uint64_t rng_seed);

}  // namespace wd3
