#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wd3 {

struct EnvSpec {
    int state_dim = 0;
    int action_dim = 0;
    double action_bound = 0.0;  // actions live in [-bound, +bound]^action_dim
    int max_episode_steps = 0;
    double discount_hint = 0.99;
};

struct EnvState {
    std::vector<double> internals;
    int step_index = 0;
};

struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;       // true termination (none of the native tasks terminate)
    bool truncated = false;  // step limit reached
};

// Continuous-control environment with exact closed-form dynamics. One step
// advances the state by semi-implicit Euler; the reward is evaluated at the
// pre-step state and the applied action. Instances are plain values: clone()
// copies the full internal state.
class Env {
public:
    virtual ~Env() = default;
    virtual const EnvSpec& spec() const = 0;
    virtual std::vector<double> reset(std::uint64_t rng_seed) = 0;
    virtual StepResult step(const std::vector<double>& action) = 0;
    virtual std::unique_ptr<Env> clone() const = 0;
    virtual EnvState state() const = 0;
    virtual void set_state(const EnvState& s) = 0;
    // Horizon override; probing lifts the training step limit.
    virtual void set_step_limit(int max_episode_steps) = 0;
};

// Torque-limited swing-up. Internals (theta, theta_dot), theta = 0 upright.
// Observation (cos theta, sin theta, theta_dot). dt = 0.05, g = 10, m = 1,
// l = 1, theta_dot clipped to [-8, 8], torque bound 2. Acceleration
// 3 g / (2 l) sin(theta) + 3 / (m l^2) * torque. Reward
// -(wrap(theta)^2 + 0.1 theta_dot^2 + 0.001 a^2) with wrap into (-pi, pi].
// Reset: theta ~ U[-pi, pi], theta_dot ~ U[-1, 1]. Horizon 200, never done.
class PendulumSwingup final : public Env {
public:
    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(std::uint64_t rng_seed) override;
    StepResult step(const std::vector<double>& action) override;
    std::unique_ptr<Env> clone() const override { return std::make_unique<PendulumSwingup>(*this); }
    EnvState state() const override { return state_; }
    void set_state(const EnvState& s) override;
    void set_step_limit(int max_episode_steps) override { spec_.max_episode_steps = max_episode_steps; }

private:
    std::vector<double> observe() const;

    EnvSpec spec_{3, 1, 2.0, 200, 0.99};
    EnvState state_{{0.0, 0.0}, 0};
    bool finished_ = true;
};

// Point mass on a line. Internals = observation = (x, v). dt = 0.05,
// acceleration bound 1. v' = v + a dt, x' = x + v' dt. Reward
// -(x^2 + 0.1 v^2 + 0.001 a^2). Reset: x ~ U[-1, 1], v = 0. Horizon 200.
class DoubleIntegrator final : public Env {
public:
    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(std::uint64_t rng_seed) override;
    StepResult step(const std::vector<double>& action) override;
    std::unique_ptr<Env> clone() const override { return std::make_unique<DoubleIntegrator>(*this); }
    EnvState state() const override { return state_; }
    void set_state(const EnvState& s) override;
    void set_step_limit(int max_episode_steps) override { spec_.max_episode_steps = max_episode_steps; }

private:
    EnvSpec spec_{2, 1, 1.0, 200, 0.99};
    EnvState state_{{0.0, 0.0}, 0};
    bool finished_ = true;
};

// Force-controlled point mass chasing a goal in the plane. Internals =
// observation = (x, y, vx, vy, gx, gy). Unit mass, dt = 0.05, force bound 1,
// velocity damping 0.95 applied as v' = 0.95 (v + a dt), p' = p + v' dt.
// Reward -dist((x, y), goal) - 0.001 |a|^2. Reset: position and velocity
// zero, goal ~ U[-1, 1]^2. Horizon 200.
class PlanarReacher final : public Env {
public:
    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(std::uint64_t rng_seed) override;
    StepResult step(const std::vector<double>& action) override;
    std::unique_ptr<Env> clone() const override { return std::make_unique<PlanarReacher>(*this); }
    EnvState state() const override { return state_; }
    void set_state(const EnvState& s) override;
    void set_step_limit(int max_episode_steps) override { spec_.max_episode_steps = max_episode_steps; }

private:
    EnvSpec spec_{6, 2, 1.0, 200, 0.99};
    EnvState state_{{0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, 0};
    bool finished_ = true;
};

// Names accepted in configs and on the CLI: "pendulum", "double-integrator",
// "reacher".
std::unique_ptr<Env> make_env(const std::string& name);

using Policy = std::function<std::vector<double>(const std::vector<double>&)>;

// Deterministic rollout of `policy` (no exploration noise) from a fresh
// reset; returns sum of gamma^t r_t over `horizon` steps. Requires
// horizon <= max_episode_steps; probing clones the env and lifts the limit.
double true_discounted_return(Env& env, const Policy& policy, double gamma, int horizon,
                              std::uint64_t rng_seed);

// Angle into (-pi, pi].
double wrap_angle(double theta);

}  // namespace wd3
