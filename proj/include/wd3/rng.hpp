#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wd3 {

// Stream tags for deriving independent generators from one run seed.
// Training, evaluation and probing each own a stream so that turning one
// on or off never shifts the draws seen by another.
namespace streams {
constexpr std::uint64_t kInit = 1;
constexpr std::uint64_t kTrain = 2;
constexpr std::uint64_t kEval = 3;
constexpr std::uint64_t kProbe = 4;
constexpr std::uint64_t kTheory = 5;
}  // namespace streams

// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7b15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed-splitting rule: child = sm(sm(sm(root) ^ stream) ^ index).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index = 0) {
    return splitmix64(splitmix64(splitmix64(root) ^ stream) ^ index);
}

// Deterministic generator with hand-rolled distributions. std:: distribution
// objects are implementation-defined, so uniforms and normals are produced
// here directly from the raw 64-bit stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; two uniforms per draw, no cached second value.
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // [0, n); n must be > 0. Modulo bias is below 2^-50 for any n used here.
    std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

private:
    std::mt19937_64 gen_;
};

}  // namespace wd3
