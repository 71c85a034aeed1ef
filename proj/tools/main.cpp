#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wd3/bias_theory.hpp"
#include "wd3/config.hpp"
#include "wd3/errors.hpp"
#include "wd3/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& sets) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw wd3::ConfigError("--set expects key=value, got '" + s + "'");
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

std::string beta_label(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", beta);
    return std::string(buf);
}

int run_theory(long samples, std::uint64_t seed, const std::string& out_path) {
    using wd3::NoiseModel;
    const std::vector<NoiseModel> models = {
        NoiseModel::gaussian(1.0, 2), NoiseModel::uniform(2, 1.0), NoiseModel::uniform(3, 1.0),
        NoiseModel::uniform(5, 1.0), NoiseModel::uniform(2, 0.5)};

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open output file '" + out_path + "'");
    }
    std::ostream& os = out_path.empty() ? std::cout : file;

    os << "kind,N,scale,closed_form,mc_mean,std_err,pass\n";
    bool all_pass = true;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const NoiseModel& m = models[i];
        const wd3::BiasEstimate est =
            wd3::monte_carlo_min_bias(m, samples, wd3::derive_seed(seed, wd3::streams::kTheory, i));
        const double closed = *est.closed_form;
        const bool pass = std::abs(est.empirical_mean - closed) <= 3.0 * est.standard_error;
        all_pass = all_pass && pass;
        char line[160];
        std::snprintf(line, sizeof(line), "%s,%d,%g,%.6f,%.6f,%.6f,%s\n",
                      m.kind == NoiseModel::Kind::kGaussian ? "gaussian" : "uniform",
                      m.ensemble_size, m.scale, closed, est.empirical_mean, est.standard_error,
                      pass ? "pass" : "FAIL");
        os << line;
    }
    return all_pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-control lab: DDPG / TD3 / WD3 agents, estimation-bias probes "
                 "and order-statistic bias verification"};
    app.require_subcommand(1);

    std::string config_path, out_dir, checkpoint, env_name, variant = "wd3", theory_out;
    std::vector<std::string> sets;
    std::vector<double> betas = {0.15, 0.30, 0.45, 0.50, 0.60, 0.75, 1.00};
    long samples = 1000000;
    std::uint64_t seed = 1;
    bool seed_given = false;
    int jobs = 1, episodes = 10;

    CLI::App* train = app.add_subcommand("train", "train one experiment (all seeds)");
    CLI::App* probe = app.add_subcommand("probe", "train with the estimation-bias probe enabled");
    for (CLI::App* cmd : {train, probe}) {
        cmd->add_option("--config", config_path, "config file")->required();
        cmd->add_option("--set", sets, "override: key=value");
        cmd->add_option("--seed", seed, "run a single seed")->each([&](const std::string&) {
            seed_given = true;
        });
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--jobs", jobs, "parallel seed runs");
    }

    CLI::App* theory = app.add_subcommand("theory", "verify the min-bias closed forms");
    theory->add_option("--samples", samples, "Monte Carlo sample count");
    theory->add_option("--seed", seed, "RNG seed");
    theory->add_option("--out", theory_out, "write the table to a file instead of stdout");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a saved checkpoint");
    eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    eval->add_option("--env", env_name, "environment name")->required();
    eval->add_option("--variant", variant, "agent variant stored in the checkpoint");
    eval->add_option("--episodes", episodes, "evaluation episodes");
    eval->add_option("--seed", seed, "RNG seed");

    CLI::App* sweep = app.add_subcommand("sweep", "summarise a beta grid");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--betas", betas, "beta grid")->delimiter(',');
    sweep->add_option("--set", sets, "override: key=value");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "parallel seed runs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (theory->parsed()) return run_theory(samples, seed, theory_out);

        if (eval->parsed()) {
            auto env = wd3::make_env(env_name);
            wd3::AgentConfig agent_config;
            agent_config.variant = wd3::variant_from_string(variant);
            wd3::Agent agent(agent_config, env->spec(), 0);
            std::ifstream ck(checkpoint);
            if (!ck) throw wd3::ConfigError("cannot open checkpoint '" + checkpoint + "'");
            agent.load_checkpoint(ck);
            const auto [mean, sd] = wd3::evaluate_policy(
                agent, *env, episodes, wd3::derive_seed(seed, wd3::streams::kEval, 0));
            std::printf("mean_return=%g std_return=%g episodes=%d\n", mean, sd, episodes);
            return kExitOk;
        }

        auto overrides = split_overrides(sets);
        if (seed_given) overrides.emplace_back("seeds", std::to_string(seed));
        if (!out_dir.empty()) overrides.emplace_back("output_dir", out_dir);
        wd3::RunConfig config = wd3::parse_config_file(config_path, overrides);

        if (train->parsed() || probe->parsed()) {
            if (probe->parsed()) config.probe_enabled = true;
            const wd3::ExperimentResult result = wd3::run_experiment(config, jobs);
            std::printf("%s: mean_last%d=%g std_over_seeds=%g seeds=%d -> %s\n",
                        result.summary.label.c_str(), result.summary.k,
                        result.summary.mean_of_last_k, result.summary.std_over_seeds,
                        result.summary.n_seeds, wd3::summary_path(config).c_str());
            return kExitOk;
        }

        // sweep
        config.agent.variant = wd3::Variant::kWd3;
        const std::string base_dir = config.output_dir;
        std::vector<wd3::SummaryRow> rows;
        for (double beta : betas) {
            if (beta < 0.0 || beta > 1.0)
                throw wd3::ConfigError("sweep: beta out of range [0, 1]: " + std::to_string(beta));
            wd3::RunConfig run = config;
            run.agent.beta = beta;
            run.output_dir = base_dir + "/beta_" + beta_label(beta);
            const wd3::ExperimentResult result =
                wd3::run_experiment(run, jobs, "beta=" + beta_label(beta));
            rows.push_back(result.summary);
            std::printf("beta=%s: mean_last%d=%g std_over_seeds=%g\n", beta_label(beta).c_str(),
                        result.summary.k, result.summary.mean_of_last_k,
                        result.summary.std_over_seeds);
        }
        std::ofstream summary(base_dir + "/sweep_summary.csv");
        if (!summary) throw std::runtime_error("cannot write sweep summary");
        wd3::write_summary_csv(summary, config, rows);
        std::printf("-> %s/sweep_summary.csv\n", base_dir.c_str());
        return kExitOk;
    } catch (const wd3::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const wd3::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
