#include "wd3/probe.hpp"

#include <cmath>
#include <stdexcept>

#include "wd3/rng.hpp"

namespace wd3 {

namespace {

std::pair<double, double> mean_and_std(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

ProbeSet collect_probe_set(Agent& agent, const Env& env, int trajectory_count,
                           int transitions_per_trajectory, std::uint64_t rng_seed) {
    if (trajectory_count < 1 || transitions_per_trajectory < 1)
        throw std::invalid_argument("collect_probe_set: counts must be positive");

    std::unique_ptr<Env> probe_env = env.clone();
    if (probe_env->spec().max_episode_steps < transitions_per_trajectory)
        probe_env->set_step_limit(transitions_per_trajectory);

    ProbeSet probe;
    probe.trajectories.resize(trajectory_count);
    probe.reset_seeds.resize(trajectory_count);
    Rng dummy(0);
    for (int j = 0; j < trajectory_count; ++j) {
        const std::uint64_t seed = derive_seed(rng_seed, streams::kProbe, static_cast<std::uint64_t>(j));
        probe.reset_seeds[j] = seed;
        std::vector<double> obs = probe_env->reset(seed);
        auto& pairs = probe.trajectories[j];
        pairs.reserve(transitions_per_trajectory);
        for (int t = 0; t < transitions_per_trajectory; ++t) {
            std::vector<double> action = agent.select_action(obs, /*explore=*/false, dummy);
            const StepResult r = probe_env->step(action);
            pairs.emplace_back(std::move(obs), std::move(action));
            obs = r.observation;
            if (r.done) break;
        }
    }
    return probe;
}

std::pair<double, double> mean_estimated_q(const Agent& agent, const ProbeSet& probe) {
    if (probe.pair_count() == 0) throw std::invalid_argument("mean_estimated_q: empty probe set");
    std::vector<double> values;
    values.reserve(probe.pair_count());
    for (const auto& trajectory : probe.trajectories)
        for (const auto& [state, action] : trajectory)
            values.push_back(agent.critic_value(0, state, action));
    return mean_and_std(values);
}

std::pair<double, double> mean_true_return(Agent& agent, const Env& env, const ProbeSet& probe,
                                           double gamma, int horizon) {
    if (probe.reset_seeds.empty()) throw std::invalid_argument("mean_true_return: empty probe set");
    std::unique_ptr<Env> rollout_env = env.clone();
    if (rollout_env->spec().max_episode_steps < horizon) rollout_env->set_step_limit(horizon);

    Rng dummy(0);
    const Policy policy = [&](const std::vector<double>& obs) {
        return agent.select_action(obs, /*explore=*/false, dummy);
    };
    std::vector<double> returns;
    returns.reserve(probe.reset_seeds.size());
    for (std::uint64_t seed : probe.reset_seeds)
        returns.push_back(true_discounted_return(*rollout_env, policy, gamma, horizon, seed));
    return mean_and_std(returns);
}

BiasRecord probe_bias(Agent& agent, const Env& env, long env_step, int trajectory_count,
                      int transitions_per_trajectory, double gamma, int horizon,
                      std::uint64_t rng_seed) {
    const ProbeSet probe =
        collect_probe_set(agent, env, trajectory_count, transitions_per_trajectory, rng_seed);
    const auto [mean_q, std_q] = mean_estimated_q(agent, probe);
    const auto [mean_ret, std_ret] = mean_true_return(agent, env, probe, gamma, horizon);

    BiasRecord record;
    record.env_step = env_step;
    record.mean_estimated_q = mean_q;
    record.std_estimated_q = std_q;
    record.mean_true_return = mean_ret;
    record.std_true_return = std_ret;
    record.trajectory_count = trajectory_count;
    record.transitions_per_trajectory = transitions_per_trajectory;
    return record;
}

}  // namespace wd3
