#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "survive/danger.hpp"
#include "survive/io.hpp"

namespace survive {

struct GridSpec {
    int dim_i = 0;
    int dim_j = 1;
    double min_i = 0.0, max_i = 0.0;
    double min_j = 0.0, max_j = 0.0;
    int resolution = 50;
    // value for every state dimension; entries at dim_i/dim_j are ignored
    std::vector<double> fixed_values;
};

// Danger evaluated over a resolution x resolution lattice, dim_i as the
// outer loop. Pure function of (net, spec), so repeated renders are
// byte-identical.
inline std::string render_danger_grid(const DangerNet& net, const GridSpec& spec) {
    const int dim = net.network().input_size();
    if (spec.dim_i < 0 || spec.dim_i >= dim || spec.dim_j < 0 || spec.dim_j >= dim)
        throw CliError("config-range", "grid dimensions must be in [0," +
                                           std::to_string(dim) + ")");
    if (spec.dim_i == spec.dim_j)
        throw CliError("config-range", "grid dimensions must differ");
    if (spec.resolution < 2) throw CliError("config-range", "resolution must be >= 2");
    if (!(spec.min_i < spec.max_i) || !(spec.min_j < spec.max_j))
        throw CliError("config-range", "grid ranges must satisfy min < max");
    if (static_cast<int>(spec.fixed_values.size()) != dim)
        throw CliError("config-range", "fixed values must cover all " +
                                           std::to_string(dim) + " state dimensions");

    std::string out = "v_i,v_j,danger\n";
    State s = spec.fixed_values;
    const double steps = static_cast<double>(spec.resolution - 1);
    for (int ki = 0; ki < spec.resolution; ++ki) {
        const double vi =
            spec.min_i + (spec.max_i - spec.min_i) * (static_cast<double>(ki) / steps);
        s[spec.dim_i] = vi;
        for (int kj = 0; kj < spec.resolution; ++kj) {
            const double vj =
                spec.min_j + (spec.max_j - spec.min_j) * (static_cast<double>(kj) / steps);
            s[spec.dim_j] = vj;
            out += format_double(vi);
            out += ',';
            out += format_double(vj);
            out += ',';
            out += format_double(net.eval(s));
            out += '\n';
        }
    }
    return out;
}

inline void export_danger_grid(const DangerNet& net, const GridSpec& spec,
                               const std::string& path) {
    atomic_write_file(path, render_danger_grid(net, spec));
}

} // namespace survive
