#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fraccal/config.hpp"
#include "fraccal/forward_model.hpp"
#include "fraccal/fractional_operator.hpp"
#include "fraccal/observation.hpp"
#include "fraccal/sampler.hpp"

namespace fraccal {

// Grid, operator and forward model for one configuration. Pinned in memory
// since likelihood evaluators point at the model.
struct Problem {
    GridSpec grid;
    RegionMap regions;
    FracOperator op;
    GridFunction phi;
    ForwardModel model;

    explicit Problem(const RunConfig& cfg);
    Problem(const Problem&) = delete;
    Problem& operator=(const Problem&) = delete;
};

Potential build_truth(const RunConfig& cfg, const GridSpec& grid, const RegionMap& regions);

// max over O nodes of |a - b|.
double linf_error_o(const Potential& a, const Potential& b, const RegionMap& regions);

struct RunResult {
    MeasurementSet data;
    Potential truth{std::vector<double>{}};
    Potential f_burn{std::vector<double>{}};
    ChainTrace trace;
    double error = 0.0;
    // Error of the background f = 1.
    double baseline = 0.0;
};

MeasurementSet simulate(const RunConfig& cfg, const Problem& problem);
RunResult sample(const RunConfig& cfg, const Problem& problem, MeasurementSet data);
// simulate then sample, in memory.
RunResult run_experiment(const RunConfig& cfg);

// File formats. CSVs use "%.17g" for every real.
void write_data_csv(const std::filesystem::path& path, const MeasurementSet& data);
MeasurementSet read_data_csv(const std::filesystem::path& path, double sigma);
void write_reconstruction_csv(const std::filesystem::path& path, const Problem& problem, const RunResult& run);
void write_trace_csv(const std::filesystem::path& path, const ChainTrace& trace);
void write_manifest(const std::filesystem::path& path, const RunConfig& cfg, const std::string& command,
                    const RunResult* run);

// Writes data.csv, reconstruction.csv, loglik.csv and manifest.json into
// cfg.out_dir.
RunResult run_pipeline(const RunConfig& cfg);

// Least-squares fit of log(err) = log C - mu log(log N).
struct RateFit {
    double C = 0.0;
    double mu = 0.0;
    std::vector<double> residuals;
};
RateFit fit_log_rate(const std::vector<std::size_t>& n_values, const std::vector<double>& errors);

// N^{-alpha / (2 alpha + d)}.
double delta_n(std::size_t n, double alpha, int d = 1);

struct RateCell {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    int level = 0;
    double error = 0.0;
    double baseline = 0.0;
    std::size_t accepted = 0;
};

struct RateStudyResult {
    std::vector<std::size_t> n_values;
    std::vector<double> errors;  // per-N median over seeds
    std::vector<double> delta;
    std::vector<int> levels;
    RateFit fit;
    std::vector<RateCell> cells;
};

// One pipeline per (N, seed) with both seeds set to `seed`, run on
// cfg.threads workers (0 = hardware concurrency). When out_dir is given each
// finished cell is written to cells/ and the merged tables at the end.
RateStudyResult rate_study(const RunConfig& base, const std::optional<std::filesystem::path>& out_dir);

void write_rate_study(const std::filesystem::path& dir, const RunConfig& base, const RateStudyResult& result);

}  // namespace fraccal
