#include "wd3/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "wd3/errors.hpp"

namespace wd3 {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value, int line) {
    double out = 0.0;
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(key + ": not a number: '" + value + "'", line);
    return out;
}

long parse_long(const std::string& key, const std::string& value, int line) {
    long out = 0;
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(key + ": not an integer: '" + value + "'", line);
    return out;
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'", line);
}

void check(bool ok, const std::string& key, const std::string& what, int line) {
    if (!ok) throw ConfigError(key + ": " + what, line);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct Builder {
    RunConfig cfg;
    bool have_env = false;
    bool have_variant = false;

    void apply(const std::string& key, const std::string& value, int line) {
        if (key == "env_name") {
            check(value == "pendulum" || value == "double-integrator" || value == "reacher", key,
                  "unknown environment '" + value + "'", line);
            cfg.env_name = value;
            have_env = true;
        } else if (key == "variant") {
            try {
                cfg.agent.variant = variant_from_string(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("variant: ") + e.what(), line);
            }
            have_variant = true;
        } else if (key == "total_steps") {
            cfg.total_steps = parse_long(key, value, line);
            check(cfg.total_steps >= 1, key, "must be >= 1", line);
        } else if (key == "eval_every") {
            cfg.eval_every = parse_long(key, value, line);
            check(cfg.eval_every >= 1, key, "must be >= 1", line);
        } else if (key == "eval_episodes") {
            cfg.eval_episodes = static_cast<int>(parse_long(key, value, line));
            check(cfg.eval_episodes >= 1, key, "must be >= 1", line);
        } else if (key == "seeds") {
            cfg.seeds.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                check(!item.empty(), key, "empty seed entry", line);
                cfg.seeds.push_back(static_cast<std::uint64_t>(parse_long(key, item, line)));
            }
            check(!cfg.seeds.empty(), key, "must list at least one seed", line);
        } else if (key == "output_dir") {
            check(!value.empty(), key, "must not be empty", line);
            cfg.output_dir = value;
        } else if (key == "probe_enabled") {
            cfg.probe_enabled = parse_bool(key, value, line);
        } else if (key == "probe_every") {
            cfg.probe_every = parse_long(key, value, line);
            check(cfg.probe_every >= 1, key, "must be >= 1", line);
        } else if (key == "probe_trajectories") {
            cfg.probe_trajectories = static_cast<int>(parse_long(key, value, line));
            check(cfg.probe_trajectories >= 1, key, "must be >= 1", line);
        } else if (key == "probe_transitions") {
            cfg.probe_transitions = static_cast<int>(parse_long(key, value, line));
            check(cfg.probe_transitions >= 1, key, "must be >= 1", line);
        } else if (key == "probe_horizon") {
            cfg.probe_horizon = static_cast<int>(parse_long(key, value, line));
            check(cfg.probe_horizon >= 1, key, "must be >= 1", line);
        } else if (key == "agent.beta") {
            cfg.agent.beta = parse_double(key, value, line);
            check(cfg.agent.beta >= 0.0 && cfg.agent.beta <= 1.0, key, "out of range [0, 1]", line);
        } else if (key == "agent.gamma") {
            cfg.agent.gamma = parse_double(key, value, line);
            check(cfg.agent.gamma >= 0.0 && cfg.agent.gamma < 1.0, key, "out of range [0, 1)", line);
        } else if (key == "agent.policy_delay") {
            cfg.agent.policy_delay = static_cast<int>(parse_long(key, value, line));
            check(cfg.agent.policy_delay >= 1, key, "must be >= 1", line);
        } else if (key == "agent.soft_update_rate") {
            cfg.agent.soft_update_rate = parse_double(key, value, line);
            check(cfg.agent.soft_update_rate > 0.0 && cfg.agent.soft_update_rate <= 1.0, key,
                  "out of range (0, 1]", line);
        } else if (key == "agent.exploration_noise_std") {
            cfg.agent.exploration_noise_std = parse_double(key, value, line);
            check(cfg.agent.exploration_noise_std > 0.0, key, "must be > 0", line);
        } else if (key == "agent.target_noise_std") {
            cfg.agent.target_noise_std = parse_double(key, value, line);
            check(cfg.agent.target_noise_std > 0.0, key, "must be > 0", line);
        } else if (key == "agent.target_noise_clip") {
            cfg.agent.target_noise_clip = parse_double(key, value, line);
            check(cfg.agent.target_noise_clip > 0.0, key, "must be > 0", line);
        } else if (key == "agent.learning_rate") {
            cfg.agent.learning_rate = parse_double(key, value, line);
            check(cfg.agent.learning_rate > 0.0, key, "must be > 0", line);
        } else if (key == "agent.batch_size") {
            cfg.agent.batch_size = static_cast<int>(parse_long(key, value, line));
            check(cfg.agent.batch_size >= 1, key, "must be >= 1", line);
        } else if (key == "agent.warmup_steps") {
            cfg.agent.warmup_steps = static_cast<int>(parse_long(key, value, line));
            check(cfg.agent.warmup_steps >= 0, key, "must be >= 0", line);
        } else if (key == "agent.hidden_dim") {
            cfg.agent.hidden_dim = static_cast<int>(parse_long(key, value, line));
            check(cfg.agent.hidden_dim >= 1, key, "must be >= 1", line);
        } else {
            throw ConfigError("unknown key '" + key + "'", line);
        }
    }

    RunConfig finish() {
        if (!have_env) throw ConfigError("missing required key 'env_name'");
        if (!have_variant) throw ConfigError("missing required key 'variant'");
        if (cfg.total_steps < cfg.agent.warmup_steps)
            throw ConfigError("total_steps: must be >= agent.warmup_steps");
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
            for (std::size_t j = i + 1; j < cfg.seeds.size(); ++j)
                if (cfg.seeds[i] == cfg.seeds[j])
                    throw ConfigError("seeds: duplicate seed " + std::to_string(cfg.seeds[i]));
        return cfg;
    }
};

}  // namespace

RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    Builder b;
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value, got '" + stripped + "'", line_no);
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        b.apply(key, value, line_no);
    }
    for (const auto& [key, value] : overrides) b.apply(key, value, 0);
    return b.finish();
}

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), overrides);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "env_name = " << c.env_name << "\n";
    os << "variant = " << to_string(c.agent.variant) << "\n";
    os << "total_steps = " << c.total_steps << "\n";
    os << "eval_every = " << c.eval_every << "\n";
    os << "eval_episodes = " << c.eval_episodes << "\n";
    os << "seeds = ";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
    os << "\n";
    os << "output_dir = " << c.output_dir << "\n";
    os << "probe_enabled = " << (c.probe_enabled ? "true" : "false") << "\n";
    os << "probe_every = " << c.probe_every << "\n";
    os << "probe_trajectories = " << c.probe_trajectories << "\n";
    os << "probe_transitions = " << c.probe_transitions << "\n";
    os << "probe_horizon = " << c.probe_horizon << "\n";
    os << "agent.beta = " << format_double(c.agent.beta) << "\n";
    os << "agent.gamma = " << format_double(c.agent.gamma) << "\n";
    os << "agent.policy_delay = " << c.agent.policy_delay << "\n";
    os << "agent.soft_update_rate = " << format_double(c.agent.soft_update_rate) << "\n";
    os << "agent.exploration_noise_std = " << format_double(c.agent.exploration_noise_std) << "\n";
    os << "agent.target_noise_std = " << format_double(c.agent.target_noise_std) << "\n";
    os << "agent.target_noise_clip = " << format_double(c.agent.target_noise_clip) << "\n";
    os << "agent.learning_rate = " << format_double(c.agent.learning_rate) << "\n";
    os << "agent.batch_size = " << c.agent.batch_size << "\n";
    os << "agent.warmup_steps = " << c.agent.warmup_steps << "\n";
    os << "agent.hidden_dim = " << c.agent.hidden_dim << "\n";
    return os.str();
}

}  // namespace wd3
