#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fraccal/grid.hpp"
#include "fraccal/sampler.hpp"

namespace fraccal {

// Ground-truth potential. Presets are our own choices:
//   bump        1 + 0.5 (1 - 4x^2)^3 on O
//   step        1.5 on [-1/4, 1/4), 1 elsewhere
//   paper-like  bump averaged onto the 16 cells of the J0 = 3 piecewise basis
//   custom      `cells` values on equal cells of O
struct TruthSpec {
    std::string preset = "bump";
    std::vector<double> cells;
};

struct RunConfig {
    double ell = 3.0;
    int M = 20;
    double s = 0.5;
    RegionConfig regions;
    TruthSpec truth;

    std::size_t n = 100;
    double sigma = 0.001;
    std::uint64_t data_seed = 1;

    SamplerConfig sampler;
    // Resolve prior.j0 as sieve_level(n, alpha).
    bool auto_level = false;
    // Rescale prior draws by n^{-1/(4 alpha + 6)}.
    bool rescale = false;

    std::vector<std::size_t> rate_n{25, 100, 400};
    std::vector<std::uint64_t> rate_seeds{1, 2, 3, 4, 5};
    unsigned threads = 0;

    std::filesystem::path out_dir = "out";

    // Checks every cross-module precondition; throws std::invalid_argument.
    void validate() const;
    // Sampler settings with the data-dependent prior fields filled in.
    SamplerConfig resolved_sampler() const;
    GridSpec grid() const { return build_grid(ell, M, s); }
};

using KeyValues = std::map<std::string, std::string>;

// Parses `key = value` lines; '#' starts a comment. Duplicate keys and
// malformed lines throw, naming `source` and the line number.
KeyValues parse_key_values(std::istream& in, const std::string& source = "<config>");

// Applies typed overrides; unknown keys and unparsable values throw.
void apply_config(RunConfig& cfg, const KeyValues& kv);

// smoke, desk, paper, rate, verify.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Preset (default "desk") overlaid with the file, then validated.
RunConfig load_config(const std::optional<std::filesystem::path>& path, const std::string& preset = "desk");

// Every key with its resolved value, sorted, one `key = value` per line.
// Feeding the output back through parse/apply reproduces the config.
std::string render_config(const RunConfig& cfg);

// "%.17g": round-trip exact.
std::string format_double(double v);

}  // namespace fraccal
