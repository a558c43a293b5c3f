#pragma once

#include <string>
#include <vector>

#include "survive/io.hpp"

namespace survive {

struct MetricsRow {
    long episode = 0; // 1-based
    int length = 0;
    double episode_return = 0.0;
    long cum_env_steps = 0;
    double epsilon = 0.0;

    bool operator==(const MetricsRow&) const = default;
};

// Plain CSV, byte-stable for identical rows: fixed column order, shortest
// round-trip float formatting, '\n' line endings.
inline std::string metrics_to_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "episode,length,return,cum_env_steps,epsilon\n";
    for (const auto& r : rows) {
        out += format_int(r.episode);
        out += ',';
        out += format_int(r.length);
        out += ',';
        out += format_double(r.episode_return);
        out += ',';
        out += format_int(r.cum_env_steps);
        out += ',';
        out += format_double(r.epsilon);
        out += '\n';
    }
    return out;
}

inline void write_metrics(const std::vector<MetricsRow>& rows, const std::string& path) {
    atomic_write_file(path, metrics_to_csv(rows));
}

} // namespace survive
