#include <doctest.h>

#include "wd3/config.hpp"
#include "wd3/errors.hpp"

using namespace wd3;

TEST_SUITE_BEGIN("config");

TEST_CASE("a minimal config applies the documented defaults") {
    const RunConfig c = parse_config("env_name = pendulum\nvariant = wd3\n");
    CHECK(c.env_name == "pendulum");
    CHECK(c.agent.variant == Variant::kWd3);
    CHECK(c.agent.beta == 0.45);
    CHECK(c.agent.gamma == 0.99);
    CHECK(c.agent.policy_delay == 2);
    CHECK(c.agent.soft_update_rate == 0.005);
    CHECK(c.agent.exploration_noise_std == 0.1);
    CHECK(c.agent.target_noise_std == 0.2);
    CHECK(c.agent.target_noise_clip == 0.5);
    CHECK(c.agent.learning_rate == 3e-4);
    CHECK(c.agent.batch_size == 100);
    CHECK(c.agent.warmup_steps == 1000);
    CHECK(c.agent.hidden_dim == 64);
    CHECK(c.total_steps == 30000);
    CHECK(c.eval_every == 1000);
    CHECK(c.eval_episodes == 10);
    CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
    CHECK(!c.probe_enabled);
}

TEST_CASE("configs round-trip through serialize and parse") {
    RunConfig c = parse_config("env_name = reacher\nvariant = td3\n");
    CHECK(parse_config(serialize_config(c)) == c);

    const std::string text =
        "env_name = double-integrator\n"
        "variant = ddpg\n"
        "total_steps = 5000\n"
        "eval_every = 250\n"
        "eval_episodes = 3\n"
        "seeds = 7, 9, 11\n"
        "output_dir = results/run1\n"
        "probe_enabled = true\n"
        "probe_every = 500\n"
        "probe_trajectories = 50\n"
        "probe_transitions = 1000\n"
        "probe_horizon = 900\n"
        "agent.beta = 0.3\n"
        "agent.gamma = 0.95\n"
        "agent.policy_delay = 3\n"
        "agent.soft_update_rate = 0.01\n"
        "agent.exploration_noise_std = 0.2\n"
        "agent.target_noise_std = 0.15\n"
        "agent.target_noise_clip = 0.4\n"
        "agent.learning_rate = 0.001\n"
        "agent.batch_size = 64\n"
        "agent.warmup_steps = 200\n"
        "agent.hidden_dim = 32\n";
    const RunConfig full = parse_config(text);
    CHECK(full.seeds == std::vector<std::uint64_t>{7, 9, 11});
    CHECK(full.probe_trajectories == 50);
    CHECK(parse_config(serialize_config(full)) == full);
}

TEST_CASE("comments and blank lines are ignored") {
    const RunConfig c = parse_config(
        "# experiment\n"
        "\n"
        "env_name = pendulum   # the swing-up task\n"
        "variant = wd3\n"
        "agent.beta = 0.5  # halfway\n");
    CHECK(c.agent.beta == 0.5);
}

TEST_CASE("range violations name the field and the line") {
    try {
        parse_config("env_name = pendulum\nvariant = wd3\nagent.beta = 1.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("agent.beta") != std::string::npos);
        CHECK(e.line == 3);
    }
}

TEST_CASE("unknown keys, malformed lines and bad values are rejected with lines") {
    CHECK_THROWS_AS(parse_config("env_name = pendulum\nvariant = wd3\nagent.alpha = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("env_name = pendulum\nvariant = wd3\njust words\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("env_name = pendulum\nvariant = wd3\nagent.beta = fast\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("env_name = pendulum\nvariant = wd3\nprobe_enabled = yes\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("env_name = mars\nvariant = wd3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("env_name = pendulum\nvariant = sac\n"), ConfigError);

    try {
        parse_config("env_name = pendulum\nvariant = wd3\n\n\nagent.gamma = 1.0\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 5);
    }
}

TEST_CASE("required keys and cross-field rules are enforced") {
    CHECK_THROWS_AS(parse_config("variant = wd3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("env_name = pendulum\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("env_name = pendulum\nvariant = wd3\nseeds = 1,2,1\n"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config("env_name = pendulum\nvariant = wd3\ntotal_steps = 10\n"),  // < warmup
        ConfigError);
    CHECK_NOTHROW(parse_config(
        "env_name = pendulum\nvariant = wd3\ntotal_steps = 10\nagent.warmup_steps = 5\n"));
}

TEST_CASE("overrides apply after the file body") {
    const RunConfig c = parse_config("env_name = pendulum\nvariant = wd3\nagent.beta = 0.2\n",
                                     {{"agent.beta", "0.75"}, {"seeds", "42"}});
    CHECK(c.agent.beta == 0.75);
    CHECK(c.seeds == std::vector<std::uint64_t>{42});
    CHECK_THROWS_AS(parse_config("env_name = pendulum\nvariant = wd3\n", {{"agent.nope", "1"}}),
                    ConfigError);
}

TEST_CASE("missing config files are reported as config errors") {
    CHECK_THROWS_AS(parse_config_file("/definitely/not/here.cfg"), ConfigError);
}

TEST_SUITE_END();
