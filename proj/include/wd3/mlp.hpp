#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wd3 {

// Dense row-major matrix, shaped fan_out x fan_in.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
};

enum class OutputActivation { kIdentity, kTanhScaled };

// Two-hidden-layer perceptron with ReLU hidden units. Critics use an
// identity output head; actors use tanh scaled by the action bound.
struct MlpParams {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    OutputActivation output_activation = OutputActivation::kIdentity;
    double output_bound = 0.0;  // tanh scale, > 0 iff kTanhScaled

    int input_dim() const { return weights.empty() ? 0 : weights.front().cols; }
    int output_dim() const { return weights.empty() ? 0 : weights.back().rows; }
};

// Gradients of (upstream . output) w.r.t. parameters and the input vector.
// input_grad carries the d(output)/d(action) path used by the policy update.
struct GradBundle {
    std::vector<Matrix> weight_grads;
    std::vector<std::vector<double>> bias_grads;
    std::vector<double> input_grad;
};

// Per-layer activations of one forward pass plus backward scratch;
// reusable across calls.
struct MlpWorkspace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
    std::vector<std::vector<double>> delta;
};

struct AdamState {
    std::vector<Matrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
// Deterministic for a fixed seed.
MlpParams init_params(int input_dim, int hidden_dim, int output_dim,
                      OutputActivation output_activation, double output_bound,
                      std::uint64_t rng_seed);

void forward(const MlpParams& params, const std::vector<double>& input, MlpWorkspace& ws);
std::vector<double> forward(const MlpParams& params, const std::vector<double>& input);

GradBundle make_grad_bundle(const MlpParams& params);
void zero_grads(GradBundle& grads);
void scale_grads(GradBundle& grads, double factor);

// Accumulates into `out`; `ws` must hold the forward pass of `input`.
void backward_accumulate(const MlpParams& params, const std::vector<double>& input,
                         const std::vector<double>& upstream_grad, MlpWorkspace& ws,
                         GradBundle& out);
GradBundle backward(const MlpParams& params, const std::vector<double>& input,
                    const std::vector<double>& upstream_grad);

// Gradient of (upstream . output) w.r.t. the network input only, skipping
// parameter gradients. `ws` must hold a forward pass. Overwrites input_grad.
void backward_input(const MlpParams& params, const std::vector<double>& upstream_grad,
                    MlpWorkspace& ws, std::vector<double>& input_grad);

AdamState make_adam_state(const MlpParams& params);

// Bias-corrected Adam. Convention used everywhere: parameters move opposite
// to the supplied gradient, so callers pass loss gradients as-is and negate
// for ascent objectives. Rejects non-finite gradients without mutating.
void adam_step(MlpParams& params, const GradBundle& grads, AdamState& state,
               double learning_rate);

// target <- eta * online + (1 - eta) * target, entrywise.
void soft_update(MlpParams& target, const MlpParams& online, double eta);

// Snapshot body: layer shapes followed by row-major entries, 17 significant
// digits (round-trips bit-exactly).
void save_params(std::ostream& os, const MlpParams& params);
MlpParams load_params(std::istream& is);

}  // namespace wd3
