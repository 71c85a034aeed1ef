#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wd3/env.hpp"
#include "wd3/mlp.hpp"
#include "wd3/replay.hpp"
#include "wd3/rng.hpp"

namespace wd3 {

enum class Variant { kDdpg, kTd3, kWd3 };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct AgentConfig {
    Variant variant = Variant::kWd3;
    double beta = 0.45;                  // weight on the pairwise minimum
    double gamma = 0.99;                 // discount
    int policy_delay = 2;                // critic updates per actor/target update
    double soft_update_rate = 0.005;     // Polyak rate
    double exploration_noise_std = 0.1;  // behaviour noise, raw action units
    double target_noise_std = 0.2;       // target-policy smoothing noise
    double target_noise_clip = 0.5;      // smoothing noise clip
    double learning_rate = 3e-4;
    int batch_size = 100;
    int warmup_steps = 1000;             // uniform-random action phase
    int hidden_dim = 64;

    bool operator==(const AgentConfig&) const = default;
};

// Target bracket: beta * min(q1, q2) + (1 - beta) / 2 * (q1 + q2).
// A convex combination, so min <= bracket <= mean pointwise; beta = 1 is the
// clipped-double-Q (TD3) target, beta = 0 the plain critic average.
inline double weighted_target_bracket(double q1, double q2, double beta) {
    const double mn = q1 < q2 ? q1 : q2;
    return beta * mn + (1.0 - beta) * 0.5 * (q1 + q2);
}

struct StepDiagnostics {
    bool updated = false;
    bool actor_updated = false;
    double critic_loss = 0.0;  // pre-update MSE, averaged over critics
    double mean_target = 0.0;
    bool episode_ended = false;
    double episode_return = 0.0;  // undiscounted, valid when episode_ended
};

// One deterministic-policy-gradient learner. DDPG keeps a single critic and
// updates actor and targets every step; TD3 and WD3 keep a twin pair, smooth
// the target action, and delay actor/target updates. TD3 is WD3 evaluated at
// beta = 1, sharing the exact code path, so the two produce bit-identical
// trajectories for equal seeds.
class Agent {
public:
    Agent(const AgentConfig& config, const EnvSpec& env_spec, std::uint64_t seed,
          std::size_t replay_capacity = 1000000);

    const AgentConfig& config() const { return config_; }
    const EnvSpec& env_spec() const { return env_spec_; }
    int critic_count() const { return static_cast<int>(critics_.size()); }

    // Deterministic actor output, plus clipped Gaussian noise when exploring.
    // During the warmup phase exploration draws uniformly from the action box.
    // Consumes rng only when explore is true.
    std::vector<double> select_action(const std::vector<double>& state, bool explore, Rng& rng);

    // Target-actor action plus clip(N(0, sigma~^2), -c, c), clipped to bounds.
    // Twin-critic variants only.
    std::vector<double> smoothed_target_action(const std::vector<double>& next_state, Rng& rng);

    // y = r + (1 - done) * gamma * bracket, evaluated on the target networks.
    std::vector<double> compute_target(const std::vector<const Transition*>& batch, Rng& rng);

    // One Adam step per critic on the MSE against shared fixed targets.
    // Returns the pre-update loss averaged over critics.
    double critic_update(const std::vector<const Transition*>& batch,
                         const std::vector<double>& targets);

    // One Adam ascent step on mean Q1(s, pi(s)); the gradient reaches the
    // actor through the critic's action-input gradient.
    void actor_update(const std::vector<const Transition*>& batch);

    // One environment interaction plus, past warmup, one learning step.
    StepDiagnostics train_step(Env& env, Rng& rng);

    double critic_value(int index, const std::vector<double>& state,
                        const std::vector<double>& action) const;

    const MlpParams& actor() const { return actor_; }
    const MlpParams& actor_target() const { return actor_target_; }
    const MlpParams& critic(int index) const { return critics_.at(index); }
    const MlpParams& critic_target(int index) const { return critic_targets_.at(index); }
    MlpParams& mutable_critic(int index) { return critics_.at(index); }
    MlpParams& mutable_critic_target(int index) { return critic_targets_.at(index); }
    MlpParams& mutable_actor() { return actor_; }

    ReplayBuffer& replay() { return replay_; }
    long env_step_count() const { return env_step_count_; }
    long update_count() const { return update_count_; }
    long actor_update_count() const { return actor_update_count_; }

    void save_checkpoint(std::ostream& os) const;
    void load_checkpoint(std::istream& is);

private:
    double effective_beta() const { return config_.variant == Variant::kTd3 ? 1.0 : config_.beta; }
    std::vector<double> critic_input(const std::vector<double>& state,
                                     const std::vector<double>& action) const;

    AgentConfig config_;
    EnvSpec env_spec_;

    MlpParams actor_, actor_target_;
    std::vector<MlpParams> critics_, critic_targets_;
    AdamState actor_opt_;
    std::vector<AdamState> critic_opts_;

    ReplayBuffer replay_;
    long env_step_count_ = 0;
    long update_count_ = 0;
    long actor_update_count_ = 0;

    // episode bookkeeping for train_step
    std::vector<double> current_obs_;
    bool episode_active_ = false;
    double episode_return_ = 0.0;

    // scratch
    MlpWorkspace actor_ws_, critic_ws_, aux_ws_;
    GradBundle actor_grads_;
    std::vector<GradBundle> critic_grads_;
};

}  // namespace wd3
