#include "wd3/runner.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wd3/rng.hpp"

namespace wd3 {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_config_echo(std::ostream& os, const RunConfig& config) {
    std::istringstream lines(serialize_config(config));
    std::string line;
    while (std::getline(lines, line)) os << "# " << line << "\n";
}

std::pair<double, double> mean_and_sample_std(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

std::pair<double, double> evaluate_policy(Agent& agent, const Env& env, int episodes,
                                          std::uint64_t rng_seed) {
    if (episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
    std::unique_ptr<Env> eval_env = env.clone();
    Rng episode_rng(rng_seed);
    Rng dummy(0);

    std::vector<double> returns;
    returns.reserve(episodes);
    for (int e = 0; e < episodes; ++e) {
        std::vector<double> obs = eval_env->reset(episode_rng.next_u64());
        double total = 0.0;
        while (true) {
            const StepResult r = eval_env->step(agent.select_action(obs, /*explore=*/false, dummy));
            total += r.reward;
            obs = r.observation;
            if (r.done || r.truncated) break;
        }
        returns.push_back(total);
    }
    return mean_and_sample_std(returns);
}

SeedRunResult run_one_seed(const RunConfig& config, std::uint64_t seed,
                           std::ostream* checkpoint_out) {
    std::unique_ptr<Env> env = make_env(config.env_name);
    Agent agent(config.agent, env->spec(), seed);
    Rng train_rng(derive_seed(seed, streams::kTrain, 0));

    SeedRunResult result;
    result.seed = seed;

    const auto do_eval = [&](long step) {
        const auto [mean, sd] = evaluate_policy(agent, *env, config.eval_episodes,
                                                derive_seed(seed, streams::kEval, step));
        result.evals.push_back({seed, step, mean, sd, config.eval_episodes});
    };
    const auto do_probe = [&](long step) {
        result.probes.push_back(probe_bias(agent, *env, step, config.probe_trajectories,
                                           config.probe_transitions, config.agent.gamma,
                                           config.probe_horizon,
                                           derive_seed(seed, streams::kProbe, step)));
    };

    do_eval(0);
    if (config.probe_enabled) do_probe(0);
    for (long t = 1; t <= config.total_steps; ++t) {
        agent.train_step(*env, train_rng);
        if (t % config.eval_every == 0) do_eval(t);
        if (config.probe_enabled && t % config.probe_every == 0) do_probe(t);
    }

    if (checkpoint_out) agent.save_checkpoint(*checkpoint_out);
    return result;
}

SummaryRow summarize(const std::string& label, const std::vector<SeedRunResult>& runs, int k) {
    if (runs.empty()) throw std::invalid_argument("summarize: no runs");
    SummaryRow row;
    row.label = label;
    row.n_seeds = static_cast<int>(runs.size());
    row.k = k;
    std::vector<double> per_seed;
    per_seed.reserve(runs.size());
    for (const SeedRunResult& run : runs) {
        const int have = static_cast<int>(run.evals.size());
        if (have == 0) throw std::invalid_argument("summarize: run without evaluations");
        const int use = have < k ? have : k;
        row.k = use < row.k ? use : row.k;
        double sum = 0.0;
        for (int i = have - use; i < have; ++i) sum += run.evals[i].mean_return;
        per_seed.push_back(sum / use);
    }
    const auto [mean, sd] = mean_and_sample_std(per_seed);
    row.mean_of_last_k = mean;
    row.std_over_seeds = sd;
    return row;
}

void write_curve_csv(std::ostream& os, const RunConfig& config, const SeedRunResult& run) {
    write_config_echo(os, config);
    os << "seed,env_step,mean_return,std_return\n";
    for (const EvalRecord& r : run.evals)
        os << r.seed << "," << r.env_step << "," << fmt(r.mean_return) << "," << fmt(r.std_return)
           << "\n";
}

void write_probe_csv(std::ostream& os, const RunConfig& config, const SeedRunResult& run) {
    write_config_echo(os, config);
    os << "env_step,mean_estimated_q,std_estimated_q,mean_true_return,std_true_return,bias\n";
    for (const BiasRecord& r : run.probes)
        os << r.env_step << "," << fmt(r.mean_estimated_q) << "," << fmt(r.std_estimated_q) << ","
           << fmt(r.mean_true_return) << "," << fmt(r.std_true_return) << "," << fmt(r.bias())
           << "\n";
}

void write_summary_csv(std::ostream& os, const RunConfig& config,
                       const std::vector<SummaryRow>& rows) {
    write_config_echo(os, config);
    os << "label,mean_last5,std_over_seeds,n_seeds\n";
    for (const SummaryRow& r : rows)
        os << r.label << "," << fmt(r.mean_of_last_k) << "," << fmt(r.std_over_seeds) << ","
           << r.n_seeds << "\n";
}

std::string curve_path(const RunConfig& config, std::uint64_t seed) {
    return config.output_dir + "/curve_seed" + std::to_string(seed) + ".csv";
}
std::string probe_path(const RunConfig& config, std::uint64_t seed) {
    return config.output_dir + "/probe_seed" + std::to_string(seed) + ".csv";
}
std::string checkpoint_path(const RunConfig& config, std::uint64_t seed) {
    return config.output_dir + "/checkpoint_seed" + std::to_string(seed) + ".txt";
}
std::string summary_path(const RunConfig& config) { return config.output_dir + "/summary.csv"; }

ExperimentResult run_experiment(const RunConfig& config, int jobs, const std::string& label) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    {
        // Fail on an unwritable output directory before any training starts.
        std::ofstream check(summary_path(config));
        if (!check) throw std::runtime_error("output directory not writable: " + config.output_dir);
    }

    const std::size_t n = config.seeds.size();
    std::vector<SeedRunResult> results(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                const std::uint64_t seed = config.seeds[i];
                std::ostringstream checkpoint;
                results[i] = run_one_seed(config, seed, &checkpoint);
                {
                    std::ofstream ck(checkpoint_path(config, seed));
                    ck << checkpoint.str();
                }
                {
                    std::ofstream curve(curve_path(config, seed));
                    write_curve_csv(curve, config, results[i]);
                }
                if (config.probe_enabled) {
                    std::ofstream probe(probe_path(config, seed));
                    write_probe_csv(probe, config, results[i]);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    int n_threads = jobs < 1 ? 1 : jobs;
    if (n_threads > static_cast<int>(n)) n_threads = static_cast<int>(n);
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    ExperimentResult out;
    out.runs = std::move(results);
    out.summary = summarize(label.empty() ? to_string(config.agent.variant) : label, out.runs);
    {
        std::ofstream summary(summary_path(config));
        write_summary_csv(summary, config, {out.summary});
    }
    return out;
}

}  // namespace wd3
