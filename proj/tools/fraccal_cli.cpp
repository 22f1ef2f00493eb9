#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fraccal/config.hpp"
#include "fraccal/pipeline.hpp"
#include "fraccal/verification.hpp"

using namespace fraccal;

namespace {

struct CommonFlags {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags, const std::string& default_preset) {
    flags.preset = default_preset;
    cmd->add_option("--config", flags.config, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", flags.preset, "base preset: smoke, desk, paper, rate, verify")
        ->capture_default_str();
    cmd->add_option("--seed", flags.seed, "seed for both the data and the chain");
    cmd->add_option("--out", flags.out, "output directory");
}

RunConfig resolve(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags.config.empty() ? std::nullopt : std::optional<std::filesystem::path>(flags.config),
                                flags.preset);
    if (flags.seed) {
        cfg.data_seed = *flags.seed;
        cfg.sampler.seed = *flags.seed;
    }
    if (!flags.out.empty()) cfg.out_dir = flags.out;
    cfg.validate();
    return cfg;
}

std::ofstream open(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void print_run(const RunResult& run, const RunConfig& cfg) {
    std::printf("iterations %zu, accepted %zu (%.4g%%), clipped %zu\n", run.trace.iterations, run.trace.accept_count,
                100.0 * static_cast<double>(run.trace.accept_count) / static_cast<double>(run.trace.iterations),
                run.trace.clipped_proposals);
    std::printf("final loglik %.10g\n", run.trace.loglik_trace.back());
    std::printf("L-inf error on O %.6g (background %.6g)\n", run.error, run.baseline);
    std::printf("outputs in %s\n", cfg.out_dir.string().c_str());
}

int cmd_forward(const RunConfig& cfg) {
    const Problem problem(cfg);
    const Potential truth = build_truth(cfg, problem.grid, problem.regions);
    ForwardSolution sol = problem.model.solve(truth);
    dn_on_grid(sol, problem.op, problem.regions);
    {
        std::ofstream out = open(cfg.out_dir / "forward.csv");
        out << "x,u,region\n";
        for (int i = 1; i < problem.grid.K(); ++i) {
            const char* region = problem.regions.in_omega(i) ? "omega" : problem.regions.in_dd(i) ? "D" : "exterior";
            out << format_double(problem.grid.x(i)) << ',' << format_double(sol.u.at(i)) << ',' << region << '\n';
        }
    }
    {
        std::ofstream out = open(cfg.out_dir / "dn.csv");
        out << "x,G\n";
        for (std::size_t k = 0; k < problem.regions.dd.size(); ++k) {
            out << format_double(problem.grid.x(problem.regions.dd[k])) << ',' << format_double(sol.dn[k]) << '\n';
        }
    }
    write_manifest(cfg.out_dir / "manifest.json", cfg, "forward", nullptr);
    std::printf("wrote forward.csv and dn.csv to %s\n", cfg.out_dir.string().c_str());
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    const Problem problem(cfg);
    const MeasurementSet data = simulate(cfg, problem);
    write_data_csv(cfg.out_dir / "data.csv", data);
    write_manifest(cfg.out_dir / "manifest.json", cfg, "simulate", nullptr);
    std::printf("wrote %zu measurements to %s\n", data.n(), (cfg.out_dir / "data.csv").string().c_str());
    return 0;
}

int cmd_sample(const RunConfig& cfg, const std::string& data_path) {
    const Problem problem(cfg);
    MeasurementSet data = read_data_csv(data_path, cfg.sigma);
    const RunResult run = sample(cfg, problem, std::move(data));
    write_reconstruction_csv(cfg.out_dir / "reconstruction.csv", problem, run);
    write_trace_csv(cfg.out_dir / "loglik.csv", run.trace);
    write_manifest(cfg.out_dir / "manifest.json", cfg, "sample", &run);
    print_run(run, cfg);
    return 0;
}

int cmd_run(const RunConfig& cfg) {
    print_run(run_pipeline(cfg), cfg);
    return 0;
}

int cmd_rate(const RunConfig& cfg) {
    const RateStudyResult res = rate_study(cfg, cfg.out_dir);
    std::printf("%8s %6s %14s %10s\n", "N", "level", "median error", "delta_N");
    for (std::size_t k = 0; k < res.n_values.size(); ++k) {
        std::printf("%8zu %6d %14.6g %10.4g\n", res.n_values[k], res.levels[k], res.errors[k], res.delta[k]);
    }
    std::printf("fit: C = %.6g, mu = %.6g\n", res.fit.C, res.fit.mu);
    std::printf("tables in %s\n", cfg.out_dir.string().c_str());
    return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& fault) {
    VerifyOptions opt;
    opt.fault = parse_fault(fault);
    const auto results = verify(cfg, opt);
    std::fputs(format_report(results).c_str(), stdout);
    for (const auto& r : results) {
        if (!r.passed) return 1;
    }
    return 0;
}

int cmd_oracle(const RunConfig& cfg) {
    const Problem problem(cfg);
    {
        std::ofstream out = open(cfg.out_dir / "symbol.csv");
        out << "m,a_m\n";
        for (std::size_t m = 0; m < problem.op.size(); ++m) out << m << ',' << format_double(problem.op.symbol()[m]) << '\n';
    }
    const GridFunction a_phi = apply(problem.op, problem.phi);
    const Interval& supp = cfg.regions.phi_support;
    std::ofstream out = open(cfg.out_dir / "quadrature.csv");
    out << "x,discrete,quadrature,relative_error\n";
    for (int i : problem.regions.dd) {
        const double x = problem.grid.x(i);
        if (x >= supp.lo && x <= supp.hi) continue;
        const double q = quadrature_dn_phi(problem.grid, x, cfg.regions);
        out << format_double(x) << ',' << format_double(a_phi.at(i)) << ',' << format_double(q) << ','
            << format_double(q != 0.0 ? std::abs(a_phi.at(i) - q) / std::abs(q) : std::abs(a_phi.at(i))) << '\n';
    }
    std::printf("wrote symbol.csv and quadrature.csv to %s\n", cfg.out_dir.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional Calderon problem: forward solver, data simulation and MCMC reconstruction"};
    app.require_subcommand(1);

    CommonFlags forward_flags, simulate_flags, sample_flags, run_flags, rate_flags, verify_flags, oracle_flags;
    auto* forward = app.add_subcommand("forward", "solve for the truth potential, write u and G on the grid");
    add_common(forward, forward_flags, "desk");
    auto* simulate_cmd = app.add_subcommand("simulate", "draw a measurement set");
    add_common(simulate_cmd, simulate_flags, "desk");
    auto* sample_cmd = app.add_subcommand("sample", "run the chain on a measurement CSV");
    add_common(sample_cmd, sample_flags, "desk");
    std::string data_path;
    sample_cmd->add_option("--data", data_path, "measurement CSV (x,y)")->required()->check(CLI::ExistingFile);
    auto* run = app.add_subcommand("run", "simulate, sample and write every artifact");
    add_common(run, run_flags, "desk");
    auto* rate = app.add_subcommand("rate-study", "median error against N over several seeds");
    add_common(rate, rate_flags, "rate");
    auto* verify_cmd = app.add_subcommand("verify", "run the forward-model property suites");
    add_common(verify_cmd, verify_flags, "verify");
    std::string fault = "none";
    verify_cmd->add_option("--fault", fault, "inject an operator fault: none, flip-a1")->capture_default_str();
    auto* oracle = app.add_subcommand("oracle", "dump the operator symbol and quadrature cross-check");
    add_common(oracle, oracle_flags, "verify");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*forward) return cmd_forward(resolve(forward_flags));
        if (*simulate_cmd) return cmd_simulate(resolve(simulate_flags));
        if (*sample_cmd) return cmd_sample(resolve(sample_flags), data_path);
        if (*run) return cmd_run(resolve(run_flags));
        if (*rate) return cmd_rate(resolve(rate_flags));
        if (*verify_cmd) return cmd_verify(resolve(verify_flags), fault);
        if (*oracle) return cmd_oracle(resolve(oracle_flags));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fraccal: %s\n", e.what());
        return 2;
    }
    return 0;
}
