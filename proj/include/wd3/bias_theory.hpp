#pragma once

#include <cstdint>
#include <optional>

namespace wd3 {

// Error model for an ensemble of value estimates: each estimate deviates from
// the true value by iid noise, Gaussian with std `scale` or uniform on
// [-scale, +scale].
struct NoiseModel {
    enum class Kind { kGaussian, kUniform };
    Kind kind = Kind::kGaussian;
    double scale = 1.0;    // sigma (gaussian) or delta (uniform)
    int ensemble_size = 2;  // N

    static NoiseModel gaussian(double sigma, int ensemble_size = 2) {
        return {Kind::kGaussian, sigma, ensemble_size};
    }
    static NoiseModel uniform(int ensemble_size, double delta) {
        return {Kind::kUniform, delta, ensemble_size};
    }
};

struct BiasEstimate {
    double empirical_mean = 0.0;
    double standard_error = 0.0;  // sample std / sqrt(sample_count)
    long sample_count = 0;
    std::optional<double> closed_form;
};

// E[min of the ensemble]: -sigma/sqrt(pi) for a Gaussian pair,
// -(N-1)/(N+1) * delta for N uniform draws. The Gaussian closed form is
// only known for N = 2; other ensemble sizes are rejected.
double closed_form_min_bias(const NoiseModel& model);

// Averages the per-ensemble minimum over `sample_count` iid ensembles.
// closed_form is filled whenever closed_form_min_bias defines it.
BiasEstimate monte_carlo_min_bias(const NoiseModel& model, long sample_count,
                                  std::uint64_t rng_seed);

// Density of the ensemble minimum for the uniform model:
// (N / 2 delta) ((delta - x) / 2 delta)^(N-1) on (-delta, delta), else 0.
double min_density_uniform(double x, const NoiseModel& model);

// Expected bias of the weighted target bracket under zero-mean noise:
// beta * E[min] (the average term is unbiased and contributes nothing).
double weighted_bias_prediction(const NoiseModel& model, double beta);

}  // namespace wd3
