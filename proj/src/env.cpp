#include "wd3/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wd3/rng.hpp"

namespace wd3 {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDt = 0.05;

void check_action(const std::vector<double>& action, const EnvSpec& spec, bool finished) {
    if (finished) throw std::invalid_argument("env: step on a finished episode");
    if (static_cast<int>(action.size()) != spec.action_dim)
        throw std::invalid_argument("env: action dimension mismatch");
}

}  // namespace

double wrap_angle(double theta) {
    double w = std::remainder(theta, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

// ---- PendulumSwingup ----

std::vector<double> PendulumSwingup::observe() const {
    return {std::cos(state_.internals[0]), std::sin(state_.internals[0]), state_.internals[1]};
}

std::vector<double> PendulumSwingup::reset(std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    state_.internals[0] = rng.uniform(-kPi, kPi);
    state_.internals[1] = rng.uniform(-1.0, 1.0);
    state_.step_index = 0;
    finished_ = false;
    return observe();
}

StepResult PendulumSwingup::step(const std::vector<double>& action) {
    check_action(action, spec_, finished_);
    const double g = 10.0, m = 1.0, l = 1.0;
    const double theta = state_.internals[0];
    const double theta_dot = state_.internals[1];
    const double torque = action[0];

    const double w = wrap_angle(theta);
    const double reward = -(w * w + 0.1 * theta_dot * theta_dot + 0.001 * torque * torque);

    const double accel = 3.0 * g / (2.0 * l) * std::sin(theta) + 3.0 / (m * l * l) * torque;
    double new_theta_dot = theta_dot + accel * kDt;
    new_theta_dot = std::clamp(new_theta_dot, -8.0, 8.0);
    state_.internals[0] = theta + new_theta_dot * kDt;
    state_.internals[1] = new_theta_dot;
    state_.step_index += 1;

    StepResult r;
    r.observation = observe();
    r.reward = reward;
    r.truncated = state_.step_index >= spec_.max_episode_steps;
    finished_ = r.done || r.truncated;
    return r;
}

void PendulumSwingup::set_state(const EnvState& s) {
    if (s.internals.size() != 2) throw std::invalid_argument("pendulum: internals are (theta, theta_dot)");
    state_ = s;
    finished_ = false;
}

// ---- DoubleIntegrator ----

std::vector<double> DoubleIntegrator::reset(std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    state_.internals[0] = rng.uniform(-1.0, 1.0);
    state_.internals[1] = 0.0;
    state_.step_index = 0;
    finished_ = false;
    return state_.internals;
}

StepResult DoubleIntegrator::step(const std::vector<double>& action) {
    check_action(action, spec_, finished_);
    const double x = state_.internals[0];
    const double v = state_.internals[1];
    const double a = action[0];

    const double reward = -(x * x + 0.1 * v * v + 0.001 * a * a);

    const double new_v = v + a * kDt;
    state_.internals[0] = x + new_v * kDt;
    state_.internals[1] = new_v;
    state_.step_index += 1;

    StepResult r;
    r.observation = state_.internals;
    r.reward = reward;
    r.truncated = state_.step_index >= spec_.max_episode_steps;
    finished_ = r.done || r.truncated;
    return r;
}

void DoubleIntegrator::set_state(const EnvState& s) {
    if (s.internals.size() != 2) throw std::invalid_argument("double-integrator: internals are (x, v)");
    state_ = s;
    finished_ = false;
}

// ---- PlanarReacher ----

std::vector<double> PlanarReacher::reset(std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    state_.internals.assign(6, 0.0);
    state_.internals[4] = rng.uniform(-1.0, 1.0);
    state_.internals[5] = rng.uniform(-1.0, 1.0);
    state_.step_index = 0;
    finished_ = false;
    return state_.internals;
}

StepResult PlanarReacher::step(const std::vector<double>& action) {
    check_action(action, spec_, finished_);
    const double damping = 0.95;
    const double dx = state_.internals[0] - state_.internals[4];
    const double dy = state_.internals[1] - state_.internals[5];
    const double reward =
        -std::sqrt(dx * dx + dy * dy) - 0.001 * (action[0] * action[0] + action[1] * action[1]);

    for (int i = 0; i < 2; ++i) {
        const double new_v = damping * (state_.internals[2 + i] + action[i] * kDt);
        state_.internals[i] += new_v * kDt;
        state_.internals[2 + i] = new_v;
    }
    state_.step_index += 1;

    StepResult r;
    r.observation = state_.internals;
    r.reward = reward;
    r.truncated = state_.step_index >= spec_.max_episode_steps;
    finished_ = r.done || r.truncated;
    return r;
}

void PlanarReacher::set_state(const EnvState& s) {
    if (s.internals.size() != 6)
        throw std::invalid_argument("reacher: internals are (x, y, vx, vy, gx, gy)");
    state_ = s;
    finished_ = false;
}

// ---- factory & rollout ----

std::unique_ptr<Env> make_env(const std::string& name) {
    if (name == "pendulum") return std::make_unique<PendulumSwingup>();
    if (name == "double-integrator") return std::make_unique<DoubleIntegrator>();
    if (name == "reacher") return std::make_unique<PlanarReacher>();
    throw std::invalid_argument("unknown environment '" + name + "'");
}

double true_discounted_return(Env& env, const Policy& policy, double gamma, int horizon,
                              std::uint64_t rng_seed) {
    if (horizon > env.spec().max_episode_steps)
        throw std::invalid_argument("true_discounted_return: horizon exceeds the step limit");
    std::vector<double> obs = env.reset(rng_seed);
    double total = 0.0;
    double discount = 1.0;
    for (int t = 0; t < horizon; ++t) {
        const StepResult r = env.step(policy(obs));
        total += discount * r.reward;
        discount *= gamma;
        obs = r.observation;
        if (r.done) break;
    }
    return total;
}

}  // namespace wd3
