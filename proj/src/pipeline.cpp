#include "fraccal/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "fraccal/priors.hpp"

#ifndef FRACCAL_VERSION
#define FRACCAL_VERSION "unknown"
#endif

namespace fraccal {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

Problem::Problem(const RunConfig& cfg)
    : grid(cfg.grid()),
      regions(classify_regions(grid, cfg.regions)),
      op(build_symbol(grid)),
      phi(sample_phi(grid, cfg.regions)),
      model(op, phi, regions) {}

Potential build_truth(const RunConfig& cfg, const GridSpec& grid, const RegionMap& regions) {
    const Interval& oo = cfg.regions.oo;
    const double c = 0.5 * (oo.lo + oo.hi);
    const double r = 0.5 * oo.length();
    auto bump = [&](double x) { return 1.0 + 0.5 * cutoff(x, oo); };

    std::vector<double> f(regions.omega.size(), 1.0);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double x = grid.x(regions.omega[k]);
        if (!oo.contains(x)) continue;
        const std::string& preset = cfg.truth.preset;
        if (preset == "bump") {
            f[k] = bump(x);
        } else if (preset == "step") {
            f[k] = (x >= c - 0.5 * r && x < c + 0.5 * r) ? 1.5 : 1.0;
        } else if (preset == "paper-like") {
            const Interval& omega = cfg.regions.omega;
            const int cell = piecewise_cell(x, omega, 3, false);
            const double width = omega.length() / static_cast<double>(piecewise_cell_count(3));
            const double lo = omega.lo + width * cell;
            const int pts = 256;
            double acc = 0.0;
            for (int q = 0; q < pts; ++q) acc += bump(lo + width * (q + 0.5) / pts);
            f[k] = acc / pts;
        } else if (preset == "custom") {
            const auto n = cfg.truth.cells.size();
            const auto idx = static_cast<std::size_t>(
                std::clamp(std::floor((x - oo.lo) / oo.length() * static_cast<double>(n)), 0.0,
                           static_cast<double>(n - 1)));
            f[k] = cfg.truth.cells[idx];
        } else {
            throw std::invalid_argument("unknown truth preset '" + preset + "'");
        }
    }
    return Potential(std::move(f));
}

double linf_error_o(const Potential& a, const Potential& b, const RegionMap& regions) {
    double err = 0.0;
    for (int i : regions.oo) {
        const std::size_t k = omega_position(regions, i);
        err = std::max(err, std::abs(a[k] - b[k]));
    }
    return err;
}

MeasurementSet simulate(const RunConfig& cfg, const Problem& problem) {
    const Potential truth = build_truth(cfg, problem.grid, problem.regions);
    return generate_data(truth, problem.model, cfg.n, cfg.sigma, Rng(cfg.data_seed));
}

RunResult sample(const RunConfig& cfg, const Problem& problem, MeasurementSet data) {
    RunResult run;
    run.truth = build_truth(cfg, problem.grid, problem.regions);
    const LogLikelihood likelihood(problem.model, std::move(data));
    const SamplerConfig sampler = cfg.resolved_sampler();
    run.trace = run_chain(sampler, &likelihood, problem.grid, cfg.regions, problem.regions);
    run.f_burn = burn_in_mean(run.trace, FieldMap(problem.regions, sampler.space, sampler.link));
    run.data = likelihood.data();
    run.error = linf_error_o(run.f_burn, run.truth, problem.regions);
    run.baseline = linf_error_o(Potential::background(problem.regions), run.truth, problem.regions);
    return run;
}

RunResult run_experiment(const RunConfig& cfg) {
    cfg.validate();
    const Problem problem(cfg);
    return sample(cfg, problem, simulate(cfg, problem));
}

void write_data_csv(const std::filesystem::path& path, const MeasurementSet& data) {
    std::ofstream out = open_out(path);
    out << "x,y\n";
    for (std::size_t k = 0; k < data.n(); ++k) out << format_double(data.xs[k]) << ',' << format_double(data.ys[k]) << '\n';
}

MeasurementSet read_data_csv(const std::filesystem::path& path, double sigma) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open data file " + path.string());
    MeasurementSet data;
    data.sigma = sigma;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (number == 1 && line == "x,y")) continue;
        std::istringstream ss(line);
        double x = 0.0;
        double y = 0.0;
        char comma = 0;
        if (!(ss >> x >> comma >> y) || comma != ',' || !std::isfinite(x) || !std::isfinite(y)) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(number) + ": expected 'x,y'");
        }
        data.xs.push_back(x);
        data.ys.push_back(y);
    }
    if (data.xs.empty()) throw std::invalid_argument(path.string() + ": no measurements");
    return data;
}

void write_reconstruction_csv(const std::filesystem::path& path, const Problem& problem, const RunResult& run) {
    std::ofstream out = open_out(path);
    out << "x,f0,f_burn\n";
    for (std::size_t k = 0; k < problem.regions.omega.size(); ++k) {
        out << format_double(problem.grid.x(problem.regions.omega[k])) << ',' << format_double(run.truth[k]) << ','
            << format_double(run.f_burn[k]) << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& path, const ChainTrace& trace) {
    std::ofstream out = open_out(path);
    out << "iteration,loglik,accepted\n";
    std::size_t seg = 1;
    for (std::size_t tau = 1; tau <= trace.loglik_trace.size(); ++tau) {
        bool accepted = false;
        if (seg < trace.segments.size() && trace.segments[seg].start == tau) {
            accepted = true;
            ++seg;
        }
        out << tau << ',' << format_double(trace.loglik_trace[tau - 1]) << ',' << (accepted ? 1 : 0) << '\n';
    }
}

void write_manifest(const std::filesystem::path& path, const RunConfig& cfg, const std::string& command,
                    const RunResult* run) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["code_version"] = FRACCAL_VERSION;
    nlohmann::ordered_json config;
    std::istringstream lines(render_config(cfg));
    for (const auto& [key, value] : parse_key_values(lines)) config[key] = value;
    j["config"] = config;
    const SamplerConfig resolved = cfg.resolved_sampler();
    j["resolved"] = {{"prior_level", resolved.prior.j0},
                     {"prior_rescale_n", resolved.prior.rescale_n ? static_cast<long long>(*resolved.prior.rescale_n) : 0}};
    if (run) {
        j["results"] = {{"linf_error_o", run->error},
                        {"baseline_linf_error_o", run->baseline},
                        {"iterations", run->trace.iterations},
                        {"accepted", run->trace.accept_count},
                        {"acceptance_rate", static_cast<double>(run->trace.accept_count) /
                                                static_cast<double>(run->trace.iterations)},
                        {"clipped_proposals", run->trace.clipped_proposals},
                        {"invalid_proposals", run->trace.invalid_proposals},
                        {"final_loglik", run->trace.loglik_trace.empty() ? 0.0 : run->trace.loglik_trace.back()},
                        {"measurements", run->data.n()}};
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

RunResult run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    const Problem problem(cfg);
    RunResult run = sample(cfg, problem, simulate(cfg, problem));
    write_data_csv(cfg.out_dir / "data.csv", run.data);
    write_reconstruction_csv(cfg.out_dir / "reconstruction.csv", problem, run);
    write_trace_csv(cfg.out_dir / "loglik.csv", run.trace);
    write_manifest(cfg.out_dir / "manifest.json", cfg, "run", &run);
    return run;
}

RateFit fit_log_rate(const std::vector<std::size_t>& n_values, const std::vector<double>& errors) {
    if (n_values.size() != errors.size() || n_values.size() < 2) {
        throw std::invalid_argument("rate fit: need matching N and error lists of length >= 2");
    }
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (n_values[k] < 2) throw std::invalid_argument("rate fit: N must be >= 2");
        if (!(errors[k] > 0.0)) throw std::invalid_argument("rate fit: errors must be positive");
        x.push_back(std::log(std::log(static_cast<double>(n_values[k]))));
        y.push_back(std::log(errors[k]));
    }
    const double n = static_cast<double>(x.size());
    double xm = 0.0;
    double ym = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        xm += x[k] / n;
        ym += y[k] / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - xm) * (y[k] - ym);
        sxx += (x[k] - xm) * (x[k] - xm);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("rate fit: N values must be distinct");
    const double slope = sxy / sxx;
    RateFit fit;
    fit.mu = -slope;
    fit.C = std::exp(ym - slope * xm);
    for (std::size_t k = 0; k < x.size(); ++k) fit.residuals.push_back(y[k] - (ym + slope * (x[k] - xm)));
    return fit;
}

double delta_n(std::size_t n, double alpha, int d) {
    if (n == 0) throw std::invalid_argument("delta_n: N must be positive");
    return std::pow(static_cast<double>(n), -alpha / (2.0 * alpha + d));
}

namespace {

void write_cell(const std::filesystem::path& path, const RateCell& cell) {
    std::ofstream out = open_out(path);
    out << "n,seed,level,error,baseline,accepted\n"
        << cell.n << ',' << cell.seed << ',' << cell.level << ',' << format_double(cell.error) << ','
        << format_double(cell.baseline) << ',' << cell.accepted << '\n';
}

}  // namespace

RateStudyResult rate_study(const RunConfig& base, const std::optional<std::filesystem::path>& out_dir) {
    base.validate();
    RateStudyResult result;
    result.n_values = base.rate_n;
    for (std::size_t n : base.rate_n) {
        for (std::uint64_t seed : base.rate_seeds) result.cells.push_back({n, seed, 0, 0.0, 0.0, 0});
    }

    unsigned threads = base.threads ? base.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(result.cells.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t idx = next++; idx < result.cells.size(); idx = next++) {
            RateCell& cell = result.cells[idx];
            try {
                RunConfig cfg = base;
                cfg.n = cell.n;
                cfg.data_seed = cell.seed;
                cfg.sampler.seed = cell.seed;
                const RunResult run = run_experiment(cfg);
                cell.level = cfg.resolved_sampler().prior.j0;
                cell.error = run.error;
                cell.baseline = run.baseline;
                cell.accepted = run.trace.accept_count;
                if (out_dir) {
                    write_cell(*out_dir / "cells" /
                                   ("n" + std::to_string(cell.n) + "_seed" + std::to_string(cell.seed) + ".csv"),
                               cell);
                }
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = result.cells.size();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t n : result.n_values) {
        std::vector<double> errs;
        int level = 0;
        for (const RateCell& cell : result.cells) {
            if (cell.n != n) continue;
            errs.push_back(cell.error);
            level = cell.level;
        }
        result.errors.push_back(median(errs));
        result.levels.push_back(level);
        result.delta.push_back(delta_n(n, base.sampler.prior.alpha));
    }
    result.fit = fit_log_rate(result.n_values, result.errors);
    if (out_dir) write_rate_study(*out_dir, base, result);
    return result;
}

void write_rate_study(const std::filesystem::path& dir, const RunConfig& base, const RateStudyResult& result) {
    {
        std::ofstream out = open_out(dir / "rate_cells.csv");
        out << "n,seed,level,error,baseline,accepted\n";
        for (const RateCell& c : result.cells) {
            out << c.n << ',' << c.seed << ',' << c.level << ',' << format_double(c.error) << ','
                << format_double(c.baseline) << ',' << c.accepted << '\n';
        }
    }
    {
        std::ofstream out = open_out(dir / "rate_summary.csv");
        out << "n,level,median_error,delta_n,log_log_n,fit_residual\n";
        for (std::size_t k = 0; k < result.n_values.size(); ++k) {
            const double n = static_cast<double>(result.n_values[k]);
            out << result.n_values[k] << ',' << result.levels[k] << ',' << format_double(result.errors[k]) << ','
                << format_double(result.delta[k]) << ',' << format_double(std::log(std::log(n))) << ','
                << format_double(result.fit.residuals[k]) << '\n';
        }
    }
    write_manifest(dir / "manifest.json", base, "rate-study", nullptr);
    std::ofstream out = open_out(dir / "rate_fit.csv");
    out << "C,mu\n" << format_double(result.fit.C) << ',' << format_double(result.fit.mu) << '\n';
}

}  // namespace fraccal
