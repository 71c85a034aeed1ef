#include "wd3/bias_theory.hpp"

#include <cmath>
#include <stdexcept>

#include "wd3/rng.hpp"

namespace wd3 {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double closed_form_min_bias(const NoiseModel& model) {
    if (model.ensemble_size < 1)
        throw std::invalid_argument("closed_form_min_bias: ensemble size must be >= 1");
    if (model.scale <= 0.0) throw std::invalid_argument("closed_form_min_bias: scale must be > 0");
    switch (model.kind) {
        case NoiseModel::Kind::kGaussian:
            if (model.ensemble_size != 2)
                throw std::invalid_argument(
                    "closed_form_min_bias: gaussian closed form is only known for pairs");
            return -model.scale / std::sqrt(kPi);
        case NoiseModel::Kind::kUniform: {
            const double n = static_cast<double>(model.ensemble_size);
            return -(n - 1.0) / (n + 1.0) * model.scale;
        }
    }
    throw std::invalid_argument("closed_form_min_bias: unknown noise kind");
}

BiasEstimate monte_carlo_min_bias(const NoiseModel& model, long sample_count,
                                  std::uint64_t rng_seed) {
    if (sample_count < 1000)
        throw std::invalid_argument("monte_carlo_min_bias: need at least 1000 samples");
    if (model.ensemble_size < 1)
        throw std::invalid_argument("monte_carlo_min_bias: ensemble size must be >= 1");

    Rng rng(rng_seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long s = 0; s < sample_count; ++s) {
        double mn = 0.0;
        for (int i = 0; i < model.ensemble_size; ++i) {
            const double z = model.kind == NoiseModel::Kind::kGaussian
                                 ? rng.normal(0.0, model.scale)
                                 : rng.uniform(-model.scale, model.scale);
            mn = i == 0 ? z : (z < mn ? z : mn);
        }
        sum += mn;
        sum_sq += mn * mn;
    }

    BiasEstimate est;
    est.sample_count = sample_count;
    est.empirical_mean = sum / static_cast<double>(sample_count);
    const double n = static_cast<double>(sample_count);
    const double var = (sum_sq - sum * sum / n) / (n - 1.0);
    est.standard_error = std::sqrt(var > 0.0 ? var : 0.0) / std::sqrt(n);
    if (model.kind == NoiseModel::Kind::kUniform || model.ensemble_size == 2)
        est.closed_form = closed_form_min_bias(model);
    return est;
}

double min_density_uniform(double x, const NoiseModel& model) {
    if (model.kind != NoiseModel::Kind::kUniform)
        throw std::invalid_argument("min_density_uniform: uniform model required");
    const double delta = model.scale;
    const double n = static_cast<double>(model.ensemble_size);
    if (x < -delta || x > delta) return 0.0;
    // the proof's polynomial, extended to the closed interval so endpoint
    // quadrature sees the one-sided limits; (delta - x) = 0 at x = delta
    return n / (2.0 * delta) * std::pow((delta - x) / (2.0 * delta), n - 1.0);
}

double weighted_bias_prediction(const NoiseModel& model, double beta) {
    if (beta < 0.0 || beta > 1.0)
        throw std::invalid_argument("weighted_bias_prediction: beta must be in [0, 1]");
    return beta * closed_form_min_bias(model);
}

}  // namespace wd3
