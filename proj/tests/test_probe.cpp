#include <doctest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "wd3/probe.hpp"
#include "wd3/rng.hpp"

using namespace wd3;

namespace {

const EnvSpec kSpec{3, 1, 2.0, 200, 0.99};

class ConstRewardEnv final : public Env {
public:
    explicit ConstRewardEnv(double reward) : reward_(reward) {}
    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(std::uint64_t) override {
        state_.step_index = 0;
        return {0.0};
    }
    StepResult step(const std::vector<double>&) override {
        state_.step_index += 1;
        return {{0.0}, reward_, false, state_.step_index >= spec_.max_episode_steps};
    }
    std::unique_ptr<Env> clone() const override { return std::make_unique<ConstRewardEnv>(*this); }
    EnvState state() const override { return state_; }
    void set_state(const EnvState& s) override { state_ = s; }
    void set_step_limit(int n) override { spec_.max_episode_steps = n; }

private:
    EnvSpec spec_{1, 1, 1.0, 2000000, 0.99};
    EnvState state_{{0.0}, 0};
    double reward_;
};

std::string checkpoint_string(const Agent& agent) {
    std::ostringstream os;
    agent.save_checkpoint(os);
    return os.str();
}

void zero_net(MlpParams& p) {
    for (auto& w : p.weights)
        for (double& v : w.a) v = 0.0;
    for (auto& b : p.biases)
        for (double& v : b) v = 0.0;
}

}  // namespace

TEST_SUITE_BEGIN("probe");

TEST_CASE("probe sets have exactly trajectory_count x transitions pairs") {
    Agent agent({}, kSpec, 1);
    PendulumSwingup env;
    const ProbeSet probe = collect_probe_set(agent, env, 2, 3, 99);
    CHECK(probe.trajectories.size() == 2);
    CHECK(probe.pair_count() == 6);
    CHECK(probe.reset_seeds.size() == 2);
}

TEST_CASE("probe collection is deterministic and longer than the training horizon") {
    Agent agent({}, kSpec, 2);
    PendulumSwingup env;
    const ProbeSet a = collect_probe_set(agent, env, 2, 350, 7);  // beyond the 200-step horizon
    const ProbeSet b = collect_probe_set(agent, env, 2, 350, 7);
    CHECK(a.pair_count() == 700);
    REQUIRE(a.trajectories.size() == b.trajectories.size());
    for (std::size_t j = 0; j < a.trajectories.size(); ++j)
        CHECK(a.trajectories[j] == b.trajectories[j]);
}

TEST_CASE("zero critic gives zero mean and zero spread") {
    Agent agent({}, kSpec, 3);
    zero_net(agent.mutable_critic(0));
    PendulumSwingup env;
    const ProbeSet probe = collect_probe_set(agent, env, 3, 5, 11);
    const auto [mean, sd] = mean_estimated_q(agent, probe);
    CHECK(mean == 0.0);
    CHECK(sd == 0.0);
}

TEST_CASE("a single pair has zero std and the critic's own value") {
    Agent agent({}, kSpec, 4);
    PendulumSwingup env;
    const ProbeSet probe = collect_probe_set(agent, env, 1, 1, 13);
    const auto [mean, sd] = mean_estimated_q(agent, probe);
    CHECK(sd == 0.0);
    const auto& [state, action] = probe.trajectories[0][0];
    CHECK(mean == agent.critic_value(0, state, action));
}

TEST_CASE("estimated-Q statistics match an independent fold-left accumulation") {
    Agent agent({}, kSpec, 5);
    PendulumSwingup env;
    const ProbeSet probe = collect_probe_set(agent, env, 4, 25, 17);
    const auto [mean, sd] = mean_estimated_q(agent, probe);

    double sum = 0.0;
    long n = 0;
    for (const auto& traj : probe.trajectories)
        for (const auto& [s, a] : traj) {
            sum += agent.critic_value(0, s, a);
            n += 1;
        }
    const double mean2 = sum / n;
    double ss = 0.0;
    for (const auto& traj : probe.trajectories)
        for (const auto& [s, a] : traj) {
            const double d = agent.critic_value(0, s, a) - mean2;
            ss += d * d;
        }
    const double sd2 = std::sqrt(ss / (n - 1));
    CHECK(mean == doctest::Approx(mean2).epsilon(1e-12));
    CHECK(sd == doctest::Approx(sd2).epsilon(1e-12));
    CHECK_THROWS_AS(mean_estimated_q(agent, ProbeSet{}), std::invalid_argument);
}

TEST_CASE("true returns reproduce the geometric series on a constant-reward env") {
    const EnvSpec const_spec{1, 1, 1.0, 2000000, 0.99};
    Agent agent({}, const_spec, 6);
    ConstRewardEnv env(-1.0);
    const ProbeSet probe = collect_probe_set(agent, env, 3, 4, 19);
    const auto [mean, sd] = mean_true_return(agent, env, probe, 0.99, 1000);
    CHECK(mean == doctest::Approx(-99.9957).epsilon(1e-6));
    CHECK(sd == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("true returns agree with direct rollouts from the recorded seeds") {
    Agent agent({}, kSpec, 7);
    PendulumSwingup env;
    const ProbeSet probe = collect_probe_set(agent, env, 3, 10, 23);
    const double horizon = 300;
    const auto [mean, sd] = mean_true_return(agent, env, probe, 0.99, horizon);

    Rng dummy(0);
    double sum = 0.0;
    for (std::uint64_t seed : probe.reset_seeds) {
        auto rollout = env.clone();
        rollout->set_step_limit(horizon);
        sum += true_discounted_return(
            *rollout,
            [&](const std::vector<double>& s) { return agent.select_action(s, false, dummy); },
            0.99, horizon, seed);
    }
    CHECK(mean == doctest::Approx(sum / 3.0).epsilon(1e-12));
}

TEST_CASE("doubling the horizon moves the true return less than the tail bound") {
    Agent agent({}, kSpec, 8);
    PendulumSwingup env;
    const ProbeSet probe = collect_probe_set(agent, env, 3, 5, 29);
    const double gamma = 0.99;
    const auto [r1000, sd1] = mean_true_return(agent, env, probe, gamma, 1000);
    const auto [r2000, sd2] = mean_true_return(agent, env, probe, gamma, 2000);
    // |r|_max for the pendulum: pi^2 + 0.1 * 8^2 + 0.001 * 2^2
    const double r_max = 9.8696044 + 6.4 + 0.004;
    const double bound = r_max * std::pow(gamma, 1000) / (1.0 - gamma);
    CHECK(std::abs(r2000 - r1000) <= bound);
}

TEST_CASE("probe records carry the counts and derive the bias") {
    Agent agent({}, kSpec, 9);
    PendulumSwingup env;
    const BiasRecord rec = probe_bias(agent, env, 1234, 2, 6, 0.99, 300, 31);
    CHECK(rec.env_step == 1234);
    CHECK(rec.trajectory_count == 2);
    CHECK(rec.transitions_per_trajectory == 6);
    CHECK(rec.bias() == rec.mean_estimated_q - rec.mean_true_return);
}

TEST_CASE("a 50 x 1000 probe set is collected in seconds, not minutes") {
    Agent agent({}, kSpec, 10);
    PendulumSwingup env;
    const auto t0 = std::chrono::steady_clock::now();
    const ProbeSet probe = collect_probe_set(agent, env, 50, 1000, 33);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(probe.pair_count() == 50000);
    CHECK(elapsed < 60.0);
}

TEST_CASE("probing never perturbs training") {
    AgentConfig cfg;
    cfg.warmup_steps = 20;
    cfg.batch_size = 10;

    auto run = [&](bool with_probe) {
        Agent agent(cfg, kSpec, 40);
        PendulumSwingup env;
        Rng rng(derive_seed(40, streams::kTrain, 0));
        for (int t = 1; t <= 150; ++t) {
            agent.train_step(env, rng);
            if (with_probe && t % 50 == 0)
                probe_bias(agent, env, t, 2, 10, 0.99, 50, derive_seed(40, streams::kProbe, t));
        }
        return checkpoint_string(agent);
    };
    CHECK(run(false) == run(true));
}

TEST_SUITE_END();
