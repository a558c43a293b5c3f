#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survive/io.hpp"

namespace survive {

// Every knob of a run, flat and fully resolved. Two defaults depend on other
// fields when the key is absent from the config: h_r (20 on cartpole, 3 on
// corridor) and gamma (0.95 for survive, 0.99 for dqn).
struct RunConfig {
    std::string env = "cartpole"; // cartpole | corridor
    std::string algo = "survive"; // survive | dqn
    std::uint64_t seed = 0;
    long max_episodes = 500;
    long max_env_steps = 0; // 0 = uncapped; cap is checked between episodes
    std::string out_dir = "out";

    std::vector<int> hidden_sizes{64};
    double learning_rate = 1e-3;
    long replay_capacity = 100000;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    long epsilon_decay_steps = 5000;

    int h_r = 20;
    double gamma = 0.95;
    double alpha = 0.1;
    std::string danger_mode = "regression"; // regression | blend
    int danger_epochs = 50;
    int transition_batch = 64;
    int transition_steps = 100;
    int warmup_episodes = 3;

    int dqn_batch = 64;
    int dqn_update_every = 4;
    int dqn_target_sync = 500;
    double dqn_failure_reward = 0.0;

    int corridor_length = 5;
    int corridor_max_steps = 500;

    double cartpole_gravity = 9.8;
    double cartpole_mass_cart = 1.0;
    double cartpole_mass_pole = 0.1;
    double cartpole_pole_half_length = 0.5;
    double cartpole_force = 10.0;
    double cartpole_time_step = 0.02;
    double cartpole_angle_threshold = 12.0 * 2.0 * 3.141592653589793238462643383279502884 / 360.0;
    double cartpole_position_threshold = 2.4;
    int cartpole_max_steps = 500;

    bool operator==(const RunConfig&) const = default;
};

// CLI flags that beat the config file
struct ConfigOverrides {
    std::optional<std::string> env;
    std::optional<std::string> algo;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
};

namespace detail {

[[noreturn]] inline void schema_error(const std::string& message) {
    throw CliError("config-schema", message);
}

[[noreturn]] inline void range_error(const std::string& message) {
    throw CliError("config-range", message);
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

inline double to_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    if (!parse_double(value, out))
        schema_error("key '" + key + "': expected a number, got '" + value + "'");
    return out;
}

inline long long to_int(const std::string& key, const std::string& value) {
    long long out = 0;
    if (!parse_int64(value, out))
        schema_error("key '" + key + "': expected an integer, got '" + value + "'");
    return out;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& value) {
    const char* first = value.data();
    const char* last = first + value.size();
    std::uint64_t out = 0;
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc() || res.ptr != last)
        schema_error("key '" + key + "': expected a non-negative integer, got '" + value +
                     "'");
    return out;
}

inline std::vector<int> to_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const std::size_t comma = value.find(',', pos);
        const std::string item =
            trim(value.substr(pos, comma == std::string::npos ? comma : comma - pos));
        if (!item.empty()) out.push_back(static_cast<int>(to_int(key, item)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// "key = value" lines, '#' starts a comment, duplicates rejected
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> raw;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line =
            text.substr(pos, nl == std::string::npos ? nl : nl - pos);
        ++line_no;
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            schema_error("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            schema_error("line " + std::to_string(line_no) + ": empty key");
        if (!raw.emplace(key, value).second)
            schema_error("duplicate key '" + key + "'");
    }
    return raw;
}

inline void set_field(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "env") cfg.env = value;
    else if (key == "algo") cfg.algo = value;
    else if (key == "seed") cfg.seed = to_u64(key, value);
    else if (key == "max_episodes") cfg.max_episodes = static_cast<long>(to_int(key, value));
    else if (key == "max_env_steps") cfg.max_env_steps = static_cast<long>(to_int(key, value));
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "hidden_sizes") cfg.hidden_sizes = to_int_list(key, value);
    else if (key == "learning_rate") cfg.learning_rate = to_double(key, value);
    else if (key == "replay_capacity") cfg.replay_capacity = static_cast<long>(to_int(key, value));
    else if (key == "epsilon_start") cfg.epsilon_start = to_double(key, value);
    else if (key == "epsilon_end") cfg.epsilon_end = to_double(key, value);
    else if (key == "epsilon_decay_steps") cfg.epsilon_decay_steps = static_cast<long>(to_int(key, value));
    else if (key == "h_r") cfg.h_r = static_cast<int>(to_int(key, value));
    else if (key == "gamma") cfg.gamma = to_double(key, value);
    else if (key == "alpha") cfg.alpha = to_double(key, value);
    else if (key == "danger_mode") cfg.danger_mode = value;
    else if (key == "danger_epochs") cfg.danger_epochs = static_cast<int>(to_int(key, value));
    else if (key == "transition_batch") cfg.transition_batch = static_cast<int>(to_int(key, value));
    else if (key == "transition_steps") cfg.transition_steps = static_cast<int>(to_int(key, value));
    else if (key == "warmup_episodes") cfg.warmup_episodes = static_cast<int>(to_int(key, value));
    else if (key == "dqn_batch") cfg.dqn_batch = static_cast<int>(to_int(key, value));
    else if (key == "dqn_update_every") cfg.dqn_update_every = static_cast<int>(to_int(key, value));
    else if (key == "dqn_target_sync") cfg.dqn_target_sync = static_cast<int>(to_int(key, value));
    else if (key == "dqn_failure_reward") cfg.dqn_failure_reward = to_double(key, value);
    else if (key == "corridor_length") cfg.corridor_length = static_cast<int>(to_int(key, value));
    else if (key == "corridor_max_steps") cfg.corridor_max_steps = static_cast<int>(to_int(key, value));
    else if (key == "cartpole_gravity") cfg.cartpole_gravity = to_double(key, value);
    else if (key == "cartpole_mass_cart") cfg.cartpole_mass_cart = to_double(key, value);
    else if (key == "cartpole_mass_pole") cfg.cartpole_mass_pole = to_double(key, value);
    else if (key == "cartpole_pole_half_length") cfg.cartpole_pole_half_length = to_double(key, value);
    else if (key == "cartpole_force") cfg.cartpole_force = to_double(key, value);
    else if (key == "cartpole_time_step") cfg.cartpole_time_step = to_double(key, value);
    else if (key == "cartpole_angle_threshold") cfg.cartpole_angle_threshold = to_double(key, value);
    else if (key == "cartpole_position_threshold") cfg.cartpole_position_threshold = to_double(key, value);
    else if (key == "cartpole_max_steps") cfg.cartpole_max_steps = static_cast<int>(to_int(key, value));
    else schema_error("unknown key '" + key + "'");
}

inline void check(bool ok, const std::string& message) {
    if (!ok) range_error(message);
}

inline void validate(const RunConfig& cfg) {
    check(cfg.env == "cartpole" || cfg.env == "corridor",
          "env must be 'cartpole' or 'corridor'");
    check(cfg.algo == "survive" || cfg.algo == "dqn", "algo must be 'survive' or 'dqn'");
    check(cfg.max_episodes >= 0, "max_episodes must be >= 0");
    check(cfg.max_env_steps >= 0, "max_env_steps must be >= 0");
    check(std::isfinite(cfg.learning_rate) && cfg.learning_rate > 0.0,
          "learning_rate must be positive");
    check(cfg.replay_capacity >= 1, "replay_capacity must be >= 1");
    check(cfg.epsilon_start >= 0.0 && cfg.epsilon_start <= 1.0,
          "epsilon_start must be in [0,1]");
    check(cfg.epsilon_end >= 0.0 && cfg.epsilon_end <= cfg.epsilon_start,
          "epsilon_end must be in [0, epsilon_start]");
    check(cfg.epsilon_decay_steps >= 1, "epsilon_decay_steps must be >= 1");
    check(cfg.h_r >= 1, "h_r must be >= 1");
    check(std::isfinite(cfg.gamma) && cfg.gamma > 0.0 && cfg.gamma < 1.0,
          "gamma must be in (0,1)");
    check(std::isfinite(cfg.alpha) && cfg.alpha > 0.0 && cfg.alpha < 1.0,
          "alpha must be in (0,1)");
    check(cfg.danger_mode == "regression" || cfg.danger_mode == "blend",
          "danger_mode must be 'regression' or 'blend'");
    check(cfg.danger_epochs >= 1, "danger_epochs must be >= 1");
    check(cfg.transition_batch >= 1, "transition_batch must be >= 1");
    check(cfg.transition_steps >= 0, "transition_steps must be >= 0");
    check(cfg.warmup_episodes >= 0, "warmup_episodes must be >= 0");
    for (int h : cfg.hidden_sizes) check(h >= 1, "hidden_sizes entries must be >= 1");
    check(cfg.dqn_batch >= 1, "dqn_batch must be >= 1");
    check(cfg.dqn_update_every >= 1, "dqn_update_every must be >= 1");
    check(cfg.dqn_target_sync >= 1, "dqn_target_sync must be >= 1");
    check(std::isfinite(cfg.dqn_failure_reward), "dqn_failure_reward must be finite");
    check(cfg.corridor_length >= 2, "corridor_length must be >= 2");
    check(cfg.corridor_max_steps >= 1, "corridor_max_steps must be >= 1");
    check(std::isfinite(cfg.cartpole_gravity) && cfg.cartpole_gravity > 0.0,
          "cartpole_gravity must be positive");
    check(std::isfinite(cfg.cartpole_mass_cart) && cfg.cartpole_mass_cart > 0.0,
          "cartpole_mass_cart must be positive");
    check(std::isfinite(cfg.cartpole_mass_pole) && cfg.cartpole_mass_pole > 0.0,
          "cartpole_mass_pole must be positive");
    check(std::isfinite(cfg.cartpole_pole_half_length) && cfg.cartpole_pole_half_length > 0.0,
          "cartpole_pole_half_length must be positive");
    check(std::isfinite(cfg.cartpole_force) && cfg.cartpole_force > 0.0,
          "cartpole_force must be positive");
    check(std::isfinite(cfg.cartpole_time_step) && cfg.cartpole_time_step > 0.0,
          "cartpole_time_step must be positive");
    check(std::isfinite(cfg.cartpole_angle_threshold) && cfg.cartpole_angle_threshold > 0.0,
          "cartpole_angle_threshold must be positive");
    check(std::isfinite(cfg.cartpole_position_threshold) &&
              cfg.cartpole_position_threshold > 0.0,
          "cartpole_position_threshold must be positive");
    check(cfg.cartpole_max_steps >= 1, "cartpole_max_steps must be >= 1");
}

} // namespace detail

inline RunConfig parse_config_text(const std::string& text,
                                   const ConfigOverrides& overrides = {}) {
    auto raw = detail::parse_key_values(text);

    RunConfig cfg;
    cfg.env = overrides.env ? *overrides.env
              : raw.count("env") ? raw.at("env")
                                 : cfg.env;
    cfg.algo = overrides.algo ? *overrides.algo
               : raw.count("algo") ? raw.at("algo")
                                   : cfg.algo;
    // dependent defaults, applied only when the key is not given explicitly
    if (!raw.count("h_r")) cfg.h_r = cfg.env == "corridor" ? 3 : 20;
    if (!raw.count("gamma")) cfg.gamma = cfg.algo == "dqn" ? 0.99 : 0.95;

    raw.erase("env");
    raw.erase("algo");
    for (const auto& [key, value] : raw) detail::set_field(cfg, key, value);

    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;

    detail::validate(cfg);
    return cfg;
}

inline RunConfig parse_config(const std::string& path,
                              const ConfigOverrides& overrides = {}) {
    return parse_config_text(read_text_file(path, "config-missing"), overrides);
}

inline std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    auto put = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    put("env", cfg.env);
    put("algo", cfg.algo);
    put("seed", format_int(static_cast<long long>(cfg.seed)));
    put("max_episodes", format_int(cfg.max_episodes));
    put("max_env_steps", format_int(cfg.max_env_steps));
    put("out_dir", cfg.out_dir);
    std::string hidden;
    for (std::size_t i = 0; i < cfg.hidden_sizes.size(); ++i) {
        if (i) hidden += ',';
        hidden += format_int(cfg.hidden_sizes[i]);
    }
    put("hidden_sizes", hidden);
    put("learning_rate", format_double(cfg.learning_rate));
    put("replay_capacity", format_int(cfg.replay_capacity));
    put("epsilon_start", format_double(cfg.epsilon_start));
    put("epsilon_end", format_double(cfg.epsilon_end));
    put("epsilon_decay_steps", format_int(cfg.epsilon_decay_steps));
    put("h_r", format_int(cfg.h_r));
    put("gamma", format_double(cfg.gamma));
    put("alpha", format_double(cfg.alpha));
    put("danger_mode", cfg.danger_mode);
    put("danger_epochs", format_int(cfg.danger_epochs));
    put("transition_batch", format_int(cfg.transition_batch));
    put("transition_steps", format_int(cfg.transition_steps));
    put("warmup_episodes", format_int(cfg.warmup_episodes));
    put("dqn_batch", format_int(cfg.dqn_batch));
    put("dqn_update_every", format_int(cfg.dqn_update_every));
    put("dqn_target_sync", format_int(cfg.dqn_target_sync));
    put("dqn_failure_reward", format_double(cfg.dqn_failure_reward));
    put("corridor_length", format_int(cfg.corridor_length));
    put("corridor_max_steps", format_int(cfg.corridor_max_steps));
    put("cartpole_gravity", format_double(cfg.cartpole_gravity));
    put("cartpole_mass_cart", format_double(cfg.cartpole_mass_cart));
    put("cartpole_mass_pole", format_double(cfg.cartpole_mass_pole));
    put("cartpole_pole_half_length", format_double(cfg.cartpole_pole_half_length));
    put("cartpole_force", format_double(cfg.cartpole_force));
    put("cartpole_time_step", format_double(cfg.cartpole_time_step));
    put("cartpole_angle_threshold", format_double(cfg.cartpole_angle_threshold));
    put("cartpole_position_threshold", format_double(cfg.cartpole_position_threshold));
    put("cartpole_max_steps", format_int(cfg.cartpole_max_steps));
    return out;
}

} // namespace survive
