#include "wd3/agent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "wd3/errors.hpp"

namespace wd3 {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::kDdpg: return "ddpg";
        case Variant::kTd3: return "td3";
        case Variant::kWd3: return "wd3";
    }
    return "wd3";
}

Variant variant_from_string(const std::string& name) {
    if (name == "ddpg") return Variant::kDdpg;
    if (name == "td3") return Variant::kTd3;
    if (name == "wd3") return Variant::kWd3;
    throw std::invalid_argument("unknown variant '" + name + "'");
}

Agent::Agent(const AgentConfig& config, const EnvSpec& env_spec, std::uint64_t seed,
             std::size_t replay_capacity)
    : config_(config), env_spec_(env_spec), replay_(replay_capacity) {
    if (config.beta < 0.0 || config.beta > 1.0)
        throw std::invalid_argument("agent: beta must be in [0, 1]");
    if (config.gamma < 0.0 || config.gamma >= 1.0)
        throw std::invalid_argument("agent: gamma must be in [0, 1)");
    if (config.policy_delay < 1) throw std::invalid_argument("agent: policy_delay must be >= 1");
    if (config.soft_update_rate <= 0.0 || config.soft_update_rate > 1.0)
        throw std::invalid_argument("agent: soft_update_rate must be in (0, 1]");
    if (config.batch_size < 1) throw std::invalid_argument("agent: batch_size must be >= 1");
    if (config.warmup_steps < 0) throw std::invalid_argument("agent: warmup_steps must be >= 0");

    const int critic_in = env_spec.state_dim + env_spec.action_dim;
    actor_ = init_params(env_spec.state_dim, config.hidden_dim, env_spec.action_dim,
                         OutputActivation::kTanhScaled, env_spec.action_bound,
                         derive_seed(seed, streams::kInit, 0));
    actor_target_ = actor_;
    actor_opt_ = make_adam_state(actor_);
    actor_grads_ = make_grad_bundle(actor_);

    const int n_critics = config.variant == Variant::kDdpg ? 1 : 2;
    for (int i = 0; i < n_critics; ++i) {
        critics_.push_back(init_params(critic_in, config.hidden_dim, 1,
                                       OutputActivation::kIdentity, 0.0,
                                       derive_seed(seed, streams::kInit, 1 + i)));
        critic_targets_.push_back(critics_.back());
        critic_opts_.push_back(make_adam_state(critics_.back()));
        critic_grads_.push_back(make_grad_bundle(critics_.back()));
    }
}

std::vector<double> Agent::critic_input(const std::vector<double>& state,
                                        const std::vector<double>& action) const {
    std::vector<double> x;
    x.reserve(state.size() + action.size());
    x.insert(x.end(), state.begin(), state.end());
    x.insert(x.end(), action.begin(), action.end());
    return x;
}

double Agent::critic_value(int index, const std::vector<double>& state,
                           const std::vector<double>& action) const {
    return forward(critics_.at(index), critic_input(state, action))[0];
}

std::vector<double> Agent::select_action(const std::vector<double>& state, bool explore, Rng& rng) {
    const double bound = env_spec_.action_bound;
    if (explore && env_step_count_ < config_.warmup_steps) {
        std::vector<double> a(env_spec_.action_dim);
        for (double& v : a) v = rng.uniform(-bound, bound);
        return a;
    }
    forward(actor_, state, actor_ws_);
    std::vector<double> a = actor_ws_.post.back();
    if (explore) {
        for (double& v : a)
            v = std::clamp(v + rng.normal(0.0, config_.exploration_noise_std), -bound, bound);
    }
    return a;
}

std::vector<double> Agent::smoothed_target_action(const std::vector<double>& next_state, Rng& rng) {
    if (config_.variant == Variant::kDdpg)
        throw std::invalid_argument("smoothed_target_action: ddpg has no target smoothing");
    const double bound = env_spec_.action_bound;
    const double clip = config_.target_noise_clip;
    forward(actor_target_, next_state, aux_ws_);
    std::vector<double> a = aux_ws_.post.back();
    for (double& v : a) {
        const double eps = std::clamp(rng.normal(0.0, config_.target_noise_std), -clip, clip);
        v = std::clamp(v + eps, -bound, bound);
    }
    return a;
}

std::vector<double> Agent::compute_target(const std::vector<const Transition*>& batch, Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("compute_target: empty batch");
    const double gamma = config_.gamma;
    std::vector<double> targets(batch.size());

    if (config_.variant == Variant::kDdpg) {
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const Transition& t = *batch[i];
            forward(actor_target_, t.next_state, aux_ws_);
            const std::vector<double> x = critic_input(t.next_state, aux_ws_.post.back());
            forward(critic_targets_[0], x, critic_ws_);
            targets[i] = t.reward + (1.0 - t.done_mask) * gamma * critic_ws_.post.back()[0];
        }
        return targets;
    }

    const double beta = effective_beta();
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = *batch[i];
        const std::vector<double> next_action = smoothed_target_action(t.next_state, rng);
        const std::vector<double> x = critic_input(t.next_state, next_action);
        forward(critic_targets_[0], x, critic_ws_);
        const double q1 = critic_ws_.post.back()[0];
        forward(critic_targets_[1], x, critic_ws_);
        const double q2 = critic_ws_.post.back()[0];
        targets[i] = t.reward + (1.0 - t.done_mask) * gamma * weighted_target_bracket(q1, q2, beta);
    }
    return targets;
}

double Agent::critic_update(const std::vector<const Transition*>& batch,
                            const std::vector<double>& targets) {
    if (batch.empty() || targets.size() != batch.size())
        throw std::invalid_argument("critic_update: batch/target size mismatch");
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    double loss_sum = 0.0;
    std::vector<double> upstream(1);
    for (std::size_t c = 0; c < critics_.size(); ++c) {
        zero_grads(critic_grads_[c]);
        double loss = 0.0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const Transition& t = *batch[i];
            const std::vector<double> x = critic_input(t.state, t.action);
            forward(critics_[c], x, critic_ws_);
            const double q = critic_ws_.post.back()[0];
            const double residual = q - targets[i];
            loss += residual * residual * inv_n;
            upstream[0] = 2.0 * residual * inv_n;
            backward_accumulate(critics_[c], x, upstream, critic_ws_, critic_grads_[c]);
        }
        if (!std::isfinite(loss))
            throw NumericalError("critic_update: non-finite loss, step rejected");
        adam_step(critics_[c], critic_grads_[c], critic_opts_[c], config_.learning_rate);
        loss_sum += loss;
    }
    return loss_sum / static_cast<double>(critics_.size());
}

void Agent::actor_update(const std::vector<const Transition*>& batch) {
    if (batch.empty()) throw std::invalid_argument("actor_update: empty batch");
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const int state_dim = env_spec_.state_dim;

    zero_grads(actor_grads_);
    const std::vector<double> critic_upstream{1.0};
    std::vector<double> input_grad;
    std::vector<double> action_grad(env_spec_.action_dim);
    for (const Transition* t : batch) {
        forward(actor_, t->state, actor_ws_);
        const std::vector<double> x = critic_input(t->state, actor_ws_.post.back());

        forward(critics_[0], x, aux_ws_);
        backward_input(critics_[0], critic_upstream, aux_ws_, input_grad);
        for (int j = 0; j < env_spec_.action_dim; ++j)
            action_grad[j] = input_grad[state_dim + j];

        backward_accumulate(actor_, t->state, action_grad, actor_ws_, actor_grads_);
    }
    // Ascent on mean Q1: adam_step descends on the supplied gradient.
    scale_grads(actor_grads_, -inv_n);
    adam_step(actor_, actor_grads_, actor_opt_, config_.learning_rate);
}

StepDiagnostics Agent::train_step(Env& env, Rng& rng) {
    StepDiagnostics diag;
    if (!episode_active_) {
        current_obs_ = env.reset(rng.next_u64());
        episode_active_ = true;
        episode_return_ = 0.0;
    }

    const std::vector<double> action = select_action(current_obs_, /*explore=*/true, rng);
    const StepResult sr = env.step(action);
    replay_.push({current_obs_, action, sr.reward, sr.observation, sr.done ? 1.0 : 0.0});
    episode_return_ += sr.reward;
    env_step_count_ += 1;

    if (sr.done || sr.truncated) {
        episode_active_ = false;
        diag.episode_ended = true;
        diag.episode_return = episode_return_;
    } else {
        current_obs_ = sr.observation;
    }

    if (env_step_count_ > config_.warmup_steps &&
        replay_.size() >= static_cast<std::size_t>(config_.batch_size)) {
        const auto batch = replay_.sample(static_cast<std::size_t>(config_.batch_size), rng);
        const std::vector<double> targets = compute_target(batch, rng);
        diag.critic_loss = critic_update(batch, targets);
        double target_sum = 0.0;
        for (double y : targets) target_sum += y;
        diag.mean_target = target_sum / static_cast<double>(targets.size());
        diag.updated = true;
        update_count_ += 1;

        const int delay = config_.variant == Variant::kDdpg ? 1 : config_.policy_delay;
        if (update_count_ % delay == 0) {
            actor_update(batch);
            soft_update(actor_target_, actor_, config_.soft_update_rate);
            for (std::size_t c = 0; c < critics_.size(); ++c)
                soft_update(critic_targets_[c], critics_[c], config_.soft_update_rate);
            actor_update_count_ += 1;
            diag.actor_updated = true;
        }
    }
    return diag;
}

void Agent::save_checkpoint(std::ostream& os) const {
    const int n = 2 + 2 * critic_count();
    os << "wd3lab-snapshot v1\n";
    os << "nets " << n << "\n";
    os << "net actor\n";
    save_params(os, actor_);
    os << "net actor_target\n";
    save_params(os, actor_target_);
    for (int i = 0; i < critic_count(); ++i) {
        os << "net critic" << (i + 1) << "\n";
        save_params(os, critics_[i]);
        os << "net critic" << (i + 1) << "_target\n";
        save_params(os, critic_targets_[i]);
    }
}

void Agent::load_checkpoint(std::istream& is) {
    std::string word, version;
    if (!(is >> word >> version) || word != "wd3lab-snapshot" || version != "v1")
        throw std::invalid_argument("checkpoint: bad header");
    int n = 0;
    if (!(is >> word >> n) || word != "nets")
        throw std::invalid_argument("checkpoint: missing net count");
    if (n != 2 + 2 * critic_count())
        throw std::invalid_argument("checkpoint: net count does not match the agent variant");
    for (int k = 0; k < n; ++k) {
        std::string name;
        if (!(is >> word >> name) || word != "net")
            throw std::invalid_argument("checkpoint: missing net entry");
        MlpParams p = load_params(is);
        if (name == "actor")
            actor_ = std::move(p);
        else if (name == "actor_target")
            actor_target_ = std::move(p);
        else if (name == "critic1")
            critics_.at(0) = std::move(p);
        else if (name == "critic1_target")
            critic_targets_.at(0) = std::move(p);
        else if (name == "critic2")
            critics_.at(1) = std::move(p);
        else if (name == "critic2_target")
            critic_targets_.at(1) = std::move(p);
        else
            throw std::invalid_argument("checkpoint: unknown net '" + name + "'");
    }
}

}  // namespace wd3
