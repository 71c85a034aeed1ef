#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "wd3/config.hpp"
#include "wd3/probe.hpp"

namespace wd3 {

struct EvalRecord {
    std::uint64_t seed = 0;
    long env_step = 0;
    double mean_return = 0.0;
    double std_return = 0.0;
    int episode_count = 0;
};

struct SummaryRow {
    std::string label;
    double mean_of_last_k = 0.0;
    double std_over_seeds = 0.0;
    int k = 0;
    int n_seeds = 0;
};

struct SeedRunResult {
    std::uint64_t seed = 0;
    std::vector<EvalRecord> evals;
    std::vector<BiasRecord> probes;
};

struct ExperimentResult {
    std::vector<SeedRunResult> runs;  // seed order
    SummaryRow summary;
};

// Mean and std of undiscounted returns of the deterministic policy over
// `episodes` rollouts on a clone of `env`. Consumes no training randomness
// and writes nothing to the replay buffer.
std::pair<double, double> evaluate_policy(Agent& agent, const Env& env, int episodes,
                                          std::uint64_t rng_seed);

// One full training run: evaluation at step 0 and every eval_every steps,
// probing on the same pattern when enabled. Writes the final parameter
// snapshot to checkpoint_out when given.
SeedRunResult run_one_seed(const RunConfig& config, std::uint64_t seed,
                           std::ostream* checkpoint_out = nullptr);

// Trains every seed (across `jobs` threads when jobs > 1; outputs are
// byte-identical either way), writing per-seed curves, probe curves and
// checkpoints plus summary.csv under output_dir.
ExperimentResult run_experiment(const RunConfig& config, int jobs = 1,
                                const std::string& label = "");

// Mean over seeds of the per-seed mean of the last k evaluations, with the
// std taken across seeds.
SummaryRow summarize(const std::string& label, const std::vector<SeedRunResult>& runs, int k = 5);

// CSV emission; every file opens with the config echoed as a '#' comment
// block followed by a header row.
void write_curve_csv(std::ostream& os, const RunConfig& config, const SeedRunResult& run);
void write_probe_csv(std::ostream& os, const RunConfig& config, const SeedRunResult& run);
void write_summary_csv(std::ostream& os, const RunConfig& config,
                       const std::vector<SummaryRow>& rows);

std::string curve_path(const RunConfig& config, std::uint64_t seed);
std::string probe_path(const RunConfig& config, std::uint64_t seed);
std::string checkpoint_path(const RunConfig& config, std::uint64_t seed);
std::string summary_path(const RunConfig& config);

}  // namespace wd3
