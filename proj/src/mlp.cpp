#include "wd3/mlp.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "wd3/errors.hpp"
#include "wd3/rng.hpp"

namespace wd3 {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

// y += W x
void matvec_add(const Matrix& w, const double* x, double* y) {
    for (int r = 0; r < w.rows; ++r) {
        const double* wr = w.row(r);
        double acc = 0.0;
        for (int c = 0; c < w.cols; ++c) acc += wr[c] * x[c];
        y[r] += acc;
    }
}

// y += W^T x
void matvec_transpose_add(const Matrix& w, const double* x, double* y) {
    for (int r = 0; r < w.rows; ++r) {
        const double* wr = w.row(r);
        const double xr = x[r];
        for (int c = 0; c < w.cols; ++c) y[c] += xr * wr[c];
    }
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

MlpParams init_params(int input_dim, int hidden_dim, int output_dim,
                      OutputActivation output_activation, double output_bound,
                      std::uint64_t rng_seed) {
    require(input_dim >= 1 && hidden_dim >= 1 && output_dim >= 1, "init_params: dims must be >= 1");
    require(output_activation != OutputActivation::kTanhScaled || output_bound > 0.0,
            "init_params: tanh output requires a positive bound");

    MlpParams p;
    p.output_activation = output_activation;
    p.output_bound = output_activation == OutputActivation::kTanhScaled ? output_bound : 0.0;

    const int dims[4] = {input_dim, hidden_dim, hidden_dim, output_dim};
    Rng rng(rng_seed);
    for (int k = 0; k < 3; ++k) {
        Matrix w(dims[k + 1], dims[k]);
        const double scale = 1.0 / std::sqrt(static_cast<double>(dims[k]));
        for (double& v : w.a) v = rng.uniform(-scale, scale);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(dims[k + 1], 0.0);
    }
    return p;
}

void forward(const MlpParams& params, const std::vector<double>& input, MlpWorkspace& ws) {
    const std::size_t n_layers = params.weights.size();
    require(n_layers > 0, "forward: empty network");
    require(static_cast<int>(input.size()) == params.input_dim(), "forward: input dimension mismatch");

    ws.pre.resize(n_layers);
    ws.post.resize(n_layers);

    const std::vector<double>* x = &input;
    for (std::size_t k = 0; k < n_layers; ++k) {
        const Matrix& w = params.weights[k];
        require(static_cast<int>(x->size()) == w.cols, "forward: layer dimension mismatch");
        ws.pre[k] = params.biases[k];
        matvec_add(w, x->data(), ws.pre[k].data());

        ws.post[k].resize(ws.pre[k].size());
        if (k + 1 < n_layers) {
            for (std::size_t j = 0; j < ws.pre[k].size(); ++j)
                ws.post[k][j] = ws.pre[k][j] > 0.0 ? ws.pre[k][j] : 0.0;
        } else if (params.output_activation == OutputActivation::kTanhScaled) {
            for (std::size_t j = 0; j < ws.pre[k].size(); ++j)
                ws.post[k][j] = params.output_bound * std::tanh(ws.pre[k][j]);
        } else {
            ws.post[k] = ws.pre[k];
        }
        x = &ws.post[k];
    }
}

std::vector<double> forward(const MlpParams& params, const std::vector<double>& input) {
    MlpWorkspace ws;
    forward(params, input, ws);
    return ws.post.back();
}

GradBundle make_grad_bundle(const MlpParams& params) {
    GradBundle g;
    for (const Matrix& w : params.weights) g.weight_grads.emplace_back(w.rows, w.cols);
    for (const auto& b : params.biases) g.bias_grads.emplace_back(b.size(), 0.0);
    g.input_grad.assign(params.input_dim(), 0.0);
    return g;
}

void zero_grads(GradBundle& grads) {
    for (Matrix& w : grads.weight_grads)
        for (double& v : w.a) v = 0.0;
    for (auto& b : grads.bias_grads)
        for (double& v : b) v = 0.0;
    for (double& v : grads.input_grad) v = 0.0;
}

void scale_grads(GradBundle& grads, double factor) {
    for (Matrix& w : grads.weight_grads)
        for (double& v : w.a) v *= factor;
    for (auto& b : grads.bias_grads)
        for (double& v : b) v *= factor;
    for (double& v : grads.input_grad) v *= factor;
}

void backward_accumulate(const MlpParams& params, const std::vector<double>& input,
                         const std::vector<double>& upstream_grad, MlpWorkspace& ws,
                         GradBundle& out) {
    const std::size_t n_layers = params.weights.size();
    require(static_cast<int>(upstream_grad.size()) == params.output_dim(),
            "backward: upstream gradient dimension mismatch");
    require(ws.pre.size() == n_layers && ws.post.size() == n_layers,
            "backward: workspace does not hold a forward pass");
    ws.delta.resize(n_layers);

    // d(upstream . output) / d(pre-activation), output layer first.
    ws.delta[n_layers - 1] = upstream_grad;
    if (params.output_activation == OutputActivation::kTanhScaled) {
        const std::vector<double>& outv = ws.post.back();
        for (std::size_t j = 0; j < outv.size(); ++j) {
            const double t = outv[j] / params.output_bound;
            ws.delta[n_layers - 1][j] *= params.output_bound * (1.0 - t * t);
        }
    }

    for (std::size_t ki = n_layers; ki-- > 0;) {
        const Matrix& w = params.weights[ki];
        const std::vector<double>& layer_in = ki == 0 ? input : ws.post[ki - 1];
        const std::vector<double>& delta = ws.delta[ki];

        Matrix& dw = out.weight_grads[ki];
        std::vector<double>& db = out.bias_grads[ki];
        for (int r = 0; r < w.rows; ++r) {
            const double d = delta[r];
            db[r] += d;
            double* dwr = dw.row(r);
            for (int c = 0; c < w.cols; ++c) dwr[c] += d * layer_in[c];
        }

        if (ki == 0) {
            matvec_transpose_add(w, delta.data(), out.input_grad.data());
        } else {
            std::vector<double>& prev = ws.delta[ki - 1];
            prev.assign(w.cols, 0.0);
            matvec_transpose_add(w, delta.data(), prev.data());
            // ReLU subgradient at 0 is 0.
            for (int c = 0; c < w.cols; ++c) prev[c] = ws.pre[ki - 1][c] > 0.0 ? prev[c] : 0.0;
        }
    }
}

GradBundle backward(const MlpParams& params, const std::vector<double>& input,
                    const std::vector<double>& upstream_grad) {
    MlpWorkspace ws;
    forward(params, input, ws);
    GradBundle g = make_grad_bundle(params);
    backward_accumulate(params, input, upstream_grad, ws, g);
    return g;
}

void backward_input(const MlpParams& params, const std::vector<double>& upstream_grad,
                    MlpWorkspace& ws, std::vector<double>& input_grad) {
    const std::size_t n_layers = params.weights.size();
    require(static_cast<int>(upstream_grad.size()) == params.output_dim(),
            "backward_input: upstream gradient dimension mismatch");
    require(ws.pre.size() == n_layers && ws.post.size() == n_layers,
            "backward_input: workspace does not hold a forward pass");
    ws.delta.resize(n_layers);

    ws.delta[n_layers - 1] = upstream_grad;
    if (params.output_activation == OutputActivation::kTanhScaled) {
        const std::vector<double>& outv = ws.post.back();
        for (std::size_t j = 0; j < outv.size(); ++j) {
            const double t = outv[j] / params.output_bound;
            ws.delta[n_layers - 1][j] *= params.output_bound * (1.0 - t * t);
        }
    }

    for (std::size_t ki = n_layers; ki-- > 0;) {
        const Matrix& w = params.weights[ki];
        const std::vector<double>& delta = ws.delta[ki];
        if (ki == 0) {
            input_grad.assign(w.cols, 0.0);
            matvec_transpose_add(w, delta.data(), input_grad.data());
        } else {
            std::vector<double>& prev = ws.delta[ki - 1];
            prev.assign(w.cols, 0.0);
            matvec_transpose_add(w, delta.data(), prev.data());
            for (int c = 0; c < w.cols; ++c) prev[c] = ws.pre[ki - 1][c] > 0.0 ? prev[c] : 0.0;
        }
    }
}

AdamState make_adam_state(const MlpParams& params) {
    AdamState s;
    for (const Matrix& w : params.weights) {
        s.m_w.emplace_back(w.rows, w.cols);
        s.v_w.emplace_back(w.rows, w.cols);
    }
    for (const auto& b : params.biases) {
        s.m_b.emplace_back(b.size(), 0.0);
        s.v_b.emplace_back(b.size(), 0.0);
    }
    return s;
}

namespace {

void adam_update_span(double* w, const double* g, double* m, double* v, std::size_t n,
                      double lr, double beta1, double beta2, double eps, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

void adam_step(MlpParams& params, const GradBundle& grads, AdamState& state,
               double learning_rate) {
    require(learning_rate > 0.0, "adam_step: learning rate must be positive");
    require(grads.weight_grads.size() == params.weights.size() &&
                grads.bias_grads.size() == params.biases.size(),
            "adam_step: gradient shape mismatch");
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        require(grads.weight_grads[k].rows == params.weights[k].rows &&
                    grads.weight_grads[k].cols == params.weights[k].cols &&
                    grads.bias_grads[k].size() == params.biases[k].size(),
                "adam_step: gradient shape mismatch");
        if (!all_finite(grads.weight_grads[k].a) || !all_finite(grads.bias_grads[k]))
            throw NumericalError("adam_step: non-finite gradient, step rejected");
    }

    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        adam_update_span(params.weights[k].a.data(), grads.weight_grads[k].a.data(),
                         state.m_w[k].a.data(), state.v_w[k].a.data(), params.weights[k].a.size(),
                         learning_rate, state.beta1, state.beta2, state.epsilon, bc1, bc2);
        adam_update_span(params.biases[k].data(), grads.bias_grads[k].data(),
                         state.m_b[k].data(), state.v_b[k].data(), params.biases[k].size(),
                         learning_rate, state.beta1, state.beta2, state.epsilon, bc1, bc2);
    }
}

void soft_update(MlpParams& target, const MlpParams& online, double eta) {
    require(eta > 0.0 && eta <= 1.0, "soft_update: eta must be in (0, 1]");
    require(target.weights.size() == online.weights.size(), "soft_update: shape mismatch");
    for (std::size_t k = 0; k < target.weights.size(); ++k) {
        Matrix& tw = target.weights[k];
        const Matrix& ow = online.weights[k];
        require(tw.rows == ow.rows && tw.cols == ow.cols &&
                    target.biases[k].size() == online.biases[k].size(),
                "soft_update: shape mismatch");
        for (std::size_t i = 0; i < tw.a.size(); ++i)
            tw.a[i] = eta * ow.a[i] + (1.0 - eta) * tw.a[i];
        for (std::size_t i = 0; i < target.biases[k].size(); ++i)
            target.biases[k][i] = eta * online.biases[k][i] + (1.0 - eta) * target.biases[k][i];
    }
}

void save_params(std::ostream& os, const MlpParams& params) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(17);

    os << "mlp " << params.weights.size() << "\n";
    if (params.output_activation == OutputActivation::kTanhScaled)
        os << "tanh " << params.output_bound << "\n";
    else
        os << "identity\n";
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        const Matrix& w = params.weights[k];
        os << w.rows << " " << w.cols << "\n";
        for (int r = 0; r < w.rows; ++r) {
            const double* wr = w.row(r);
            for (int c = 0; c < w.cols; ++c) os << (c ? " " : "") << wr[c];
            os << "\n";
        }
        for (std::size_t i = 0; i < params.biases[k].size(); ++i)
            os << (i ? " " : "") << params.biases[k][i];
        os << "\n";
    }

    os.flags(flags);
    os.precision(prec);
}

MlpParams load_params(std::istream& is) {
    std::string tag;
    std::size_t n_layers = 0;
    if (!(is >> tag >> n_layers) || tag != "mlp")
        throw std::invalid_argument("load_params: bad snapshot header");

    MlpParams p;
    if (!(is >> tag)) throw std::invalid_argument("load_params: missing activation");
    if (tag == "tanh") {
        p.output_activation = OutputActivation::kTanhScaled;
        if (!(is >> p.output_bound) || p.output_bound <= 0.0)
            throw std::invalid_argument("load_params: bad tanh bound");
    } else if (tag == "identity") {
        p.output_activation = OutputActivation::kIdentity;
    } else {
        throw std::invalid_argument("load_params: unknown activation '" + tag + "'");
    }

    for (std::size_t k = 0; k < n_layers; ++k) {
        int rows = 0, cols = 0;
        if (!(is >> rows >> cols) || rows <= 0 || cols <= 0)
            throw std::invalid_argument("load_params: bad layer shape");
        Matrix w(rows, cols);
        for (double& v : w.a)
            if (!(is >> v)) throw std::invalid_argument("load_params: truncated weights");
        std::vector<double> b(rows);
        for (double& v : b)
            if (!(is >> v)) throw std::invalid_argument("load_params: truncated biases");
        p.weights.push_back(std::move(w));
        p.biases.push_back(std::move(b));
    }
    return p;
}

}  // namespace wd3
