#include "fraccal/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "fraccal/forward_model.hpp"
#include "fraccal/rng.hpp"

namespace fraccal {

Fault parse_fault(const std::string& name) {
    if (name == "none") return Fault::none;
    if (name == "flip-a1") return Fault::flip_a1;
    throw std::invalid_argument("unknown fault '" + name + "' (expected none or flip-a1)");
}

FracOperator make_operator(const GridSpec& spec, Fault fault) {
    FracOperator op = build_symbol(spec);
    if (fault == Fault::none || op.size() < 2) return op;
    std::vector<double> symbol(op.symbol().begin(), op.symbol().end());
    symbol[1] = -symbol[1];
    return FracOperator(spec, std::move(symbol), op.scale());
}

double getoor_value(double s) {
    return std::pow(4.0, s) * std::tgamma(1.0 + s) * std::tgamma(0.5 + s) / std::tgamma(0.5);
}

namespace {

struct Setup {
    GridSpec grid;
    RegionMap regions;
    FracOperator op;
    GridFunction phi;

    Setup(const RunConfig& cfg, int M, Fault fault)
        : grid(build_grid(cfg.ell, M, cfg.s)),
          regions(classify_regions(grid, cfg.regions)),
          op(make_operator(grid, fault)),
          phi(sample_phi(grid, cfg.regions)) {}
};

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

// Nonnegative potential with node values uniform on [0, top).
Potential random_potential(const RegionMap& regions, Rng& rng, double top = 5.0) {
    std::vector<double> f(regions.omega.size());
    for (double& v : f) v = top * rng.uniform();
    return Potential(std::move(f));
}

double norm_h(double h, const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(h * acc);
}

}  // namespace

SuiteResult check_symmetry(const RunConfig& cfg, const VerifyOptions& opt) {
    const Setup s(cfg, cfg.M, opt.fault);
    const Eigen::MatrixXd A = assemble_dense(s.op);
    const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    SuiteResult r{"symmetry", asym == 0.0, asym, 0.0, ""};
    r.detail = fmt("max |A - A^T| = %.3g over %.0f nodes", asym, static_cast<double>(A.rows()));
    return r;
}

SuiteResult check_maximum_principle(const RunConfig& cfg, const VerifyOptions& opt, int trials) {
    const Setup s(cfg, cfg.M, opt.fault);
    const ForwardModel model(s.op, s.phi, s.regions);
    const double phi_max = *std::max_element(s.phi.values().begin(), s.phi.values().end());

    // Exterior data touching Omega: ones on the nodes next to each end.
    GridFunction edge(s.grid);
    edge.at(s.regions.omega.front() - 1) = 1.0;
    edge.at(s.regions.omega.back() + 1) = 1.0;
    const ForwardModel edge_model(s.op, edge, s.regions);

    Rng rng = Rng(opt.seed).substream("maximum-principle");
    int failures = 0;
    double worst = 0.0;
    double lowest = 0.0;
    // 0 <= u <= max(datum) on Omega for a nonnegative datum.
    auto within = [&](const ForwardSolution& sol, double top) {
        bool ok = true;
        for (int i : s.regions.omega) {
            const double u = sol.u.at(i);
            worst = std::max(worst, u / top);
            lowest = std::min(lowest, u / top);
            ok = ok && u >= -1e-12 * top && u <= top * (1.0 + 1e-12);
        }
        return ok;
    };
    for (int t = 0; t < trials; ++t) {
        const Potential f = random_potential(s.regions, rng);
        GridFunction psi(s.grid);
        double psi_max = 0.0;
        for (int i = 1; i < s.grid.K(); ++i) {
            if (s.regions.in_omega(i)) continue;
            psi.at(i) = rng.uniform();
            psi_max = std::max(psi_max, psi.at(i));
        }
        try {
            bool ok = within(model.solve(f), phi_max);
            ok = within(ForwardModel(s.op, psi, s.regions).solve(f), psi_max) && ok;
            ok = within(edge_model.solve(f), 1.0) && ok;
            failures += ok ? 0 : 1;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    SuiteResult r{"maximum-principle", failures == 0, worst, 1.0 + 1e-12, ""};
    r.detail = fmt("%.0f of %.0f potentials violate 0 <= u <= max(datum)", failures, trials) +
               fmt("; u/max(datum) in [%.6g, %.15g]", lowest, worst);
    return r;
}

SuiteResult check_forward_lipschitz(const RunConfig& cfg, const VerifyOptions& opt, double gap, int coarse_M,
                                    int fine_M, int pairs) {
    const int cells = 16;
    // Cell values are drawn once so both resolutions see the same functions.
    Rng rng = Rng(opt.seed).substream("lipschitz");
    std::vector<std::vector<double>> values(static_cast<std::size_t>(2 * pairs), std::vector<double>(cells));
    for (auto& v : values) {
        for (double& c : v) c = 5.0 * rng.uniform();
    }
    auto max_ratio = [&](int M) {
        const Setup s(cfg, M, opt.fault);
        const ForwardModel model(s.op, s.phi, s.regions);
        const Interval& omega = cfg.regions.omega;
        auto potential = [&](const std::vector<double>& v) {
            std::vector<double> f;
            for (int i : s.regions.omega) {
                const double pos = (s.grid.x(i) - omega.lo) / omega.length() * cells;
                f.push_back(v[static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, cells - 1.0))]);
            }
            return Potential(std::move(f));
        };
        double best = 0.0;
        for (int p = 0; p < pairs; ++p) {
            const Potential f1 = potential(values[static_cast<std::size_t>(2 * p)]);
            const Potential f2 = potential(values[static_cast<std::size_t>(2 * p + 1)]);
            const Eigen::VectorXd g1 = model.dn_from_omega(model.solve_omega(f1.values()));
            const Eigen::VectorXd g2 = model.dn_from_omega(model.solve_omega(f2.values()));
            std::vector<double> dg;
            for (std::size_t k = 0; k < s.regions.dd.size(); ++k) {
                const double x = s.grid.x(s.regions.dd[k]);
                if (std::max(omega.lo - x, x - omega.hi) >= gap) {
                    dg.push_back(g1(static_cast<Eigen::Index>(k)) - g2(static_cast<Eigen::Index>(k)));
                }
            }
            std::vector<double> df(f1.size());
            for (std::size_t k = 0; k < df.size(); ++k) df[k] = f1[k] - f2[k];
            const double den = norm_h(s.grid.h(), df);
            if (den > 0.0) best = std::max(best, norm_h(s.grid.h(), dg) / den);
        }
        return best;
    };
    const double coarse = max_ratio(coarse_M);
    const double fine = max_ratio(fine_M);
    const double change = std::abs(fine - coarse) / coarse;
    SuiteResult r{gap > 0.0 ? "forward-lipschitz-separated" : "forward-lipschitz",
                  coarse > 0.0 && std::isfinite(fine) && change <= 0.10, change, 0.10, ""};
    r.detail = fmt("max ratio %.6g at coarse grid, ", coarse) + fmt("%.6g at fine grid", fine);
    if (gap > 0.0) r.detail += fmt(", D nodes at distance >= %.3g", gap);
    return r;
}

SuiteResult check_uniform_bound(const RunConfig& cfg, const VerifyOptions& opt, int trials) {
    const Setup s(cfg, cfg.M, opt.fault);
    const ForwardModel model(s.op, s.phi, s.regions);
    double phi_max = 0.0;
    for (double v : s.phi.values()) phi_max = std::max(phi_max, std::abs(v));
    const GridFunction a_phi = apply(s.op, s.phi);
    const Interval& omega = cfg.regions.omega;
    const double c = kernel_constant(1, cfg.s);

    std::vector<std::size_t> rows;
    std::vector<double> bound;
    for (std::size_t k = 0; k < s.regions.dd.size(); ++k) {
        const double x = s.grid.x(s.regions.dd[k]);
        const double dist = std::max(omega.lo - x, x - omega.hi);
        if (dist < 0.5) continue;
        rows.push_back(k);
        bound.push_back(std::abs(a_phi.at(s.regions.dd[k])) +
                        c * omega.length() * phi_max / std::pow(dist, 1.0 + 2.0 * cfg.s));
    }
    Rng rng = Rng(opt.seed).substream("uniform-bound");
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd g = model.dn_from_omega(model.solve_omega(random_potential(s.regions, rng).values()));
        for (std::size_t q = 0; q < rows.size(); ++q) {
            worst = std::max(worst, std::abs(g(static_cast<Eigen::Index>(rows[q]))) / bound[q]);
        }
    }
    SuiteResult r{"uniform-bound", !rows.empty() && worst <= 2.0, worst, 2.0, ""};
    r.detail = fmt("max |G(f)| / kernel bound = %.6g over %.0f nodes", worst, static_cast<double>(rows.size()));
    return r;
}

SuiteResult check_alessandrini(const RunConfig& cfg, const VerifyOptions& opt, int triples) {
    const Setup s(cfg, cfg.M, opt.fault);
    const ForwardModel model_phi(s.op, s.phi, s.regions);
    Rng rng = Rng(opt.seed).substream("alessandrini");
    double worst = 0.0;
    for (int t = 0; t < triples; ++t) {
        const Potential f1 = random_potential(s.regions, rng);
        const Potential f2 = random_potential(s.regions, rng);
        GridFunction psi(s.grid);
        for (int i : s.regions.dd) psi.at(i) = rng.normal();
        const ForwardModel model_psi(s.op, psi, s.regions);
        const ForwardSolution u1 = model_phi.solve(f1);
        const ForwardSolution u2 = model_phi.solve(f2);
        const ForwardSolution w2 = model_psi.solve(f2);

        GridFunction diff(s.grid);
        for (int i = 1; i < s.grid.K(); ++i) diff.at(i) = u1.u.at(i) - u2.u.at(i);
        const GridFunction adiff = apply(s.op, diff);
        double lhs = 0.0;
        double scale = 0.0;
        for (int i = 1; i < s.grid.K(); ++i) {
            if (s.regions.in_omega(i)) continue;
            lhs += psi.at(i) * adiff.at(i);
            scale += std::abs(psi.at(i) * adiff.at(i));
        }
        double rhs = 0.0;
        for (std::size_t k = 0; k < s.regions.omega.size(); ++k) {
            const int i = s.regions.omega[k];
            rhs += (f1[k] - f2[k]) * u1.u.at(i) * w2.u.at(i);
        }
        const double denom = std::max(std::abs(rhs), scale);
        if (denom > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
    SuiteResult r{"alessandrini", worst <= 1e-9, worst, 1e-9, ""};
    r.detail = fmt("max relative discrepancy %.3g over %.0f triples", worst, triples);
    return r;
}

SuiteResult check_getoor(const RunConfig& cfg, const VerifyOptions& opt, int coarse_M, int fine_M) {
    const double exact = getoor_value(cfg.s);
    auto error = [&](int M) {
        const GridSpec g = build_grid(cfg.ell, M, cfg.s);
        const FracOperator op = make_operator(g, opt.fault);
        GridFunction v(g);
        for (int i = 1; i < g.K(); ++i) v.at(i) = std::pow(std::max(0.0, 1.0 - g.x(i) * g.x(i)), cfg.s);
        const GridFunction w = apply(op, v);
        double err = 0.0;
        for (int i = 1; i < g.K(); ++i) {
            if (std::abs(g.x(i)) <= 0.5 + 1e-12) err = std::max(err, std::abs(w.at(i) - exact));
        }
        return err;
    };
    const double coarse = error(coarse_M);
    const double fine = error(fine_M);
    SuiteResult r{"getoor", fine <= 0.02 && fine < coarse, fine, 0.02, ""};
    r.detail = fmt("max error %.4g at coarse grid, ", coarse) + fmt("%.4g at fine grid", fine);
    return r;
}

SuiteResult check_dense_oracle(const RunConfig& cfg, const VerifyOptions& opt, int vectors) {
    const Setup s(cfg, cfg.M, opt.fault);
    const Eigen::MatrixXd A = assemble_dense(s.op);
    Rng rng = Rng(opt.seed).substream("dense-oracle");
    double worst = 0.0;
    const auto n = static_cast<std::size_t>(A.rows());
    for (int t = 0; t < vectors; ++t) {
        std::vector<double> v(n);
        for (double& x : v) x = rng.normal();
        std::vector<double> w(n);
        apply(s.op, v, w);
        const Eigen::VectorXd dense = A * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd fast = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n));
        const double denom = dense.norm();
        worst = std::max(worst, denom > 0.0 ? (fast - dense).norm() / denom : (fast - dense).norm());
    }
    SuiteResult r{"dense-oracle", worst <= 1e-12, worst, 1e-12, ""};
    r.detail = fmt("max relative error %.3g at K = %.0f", worst, static_cast<double>(s.grid.K()));
    return r;
}

SuiteResult check_quadrature(const RunConfig& cfg, const VerifyOptions& opt, int coarse_M, int fine_M) {
    auto error = [&](int M) {
        const Setup s(cfg, M, opt.fault);
        const GridFunction a_phi = apply(s.op, s.phi);
        std::vector<int> nodes = s.regions.dd;
        std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
            return std::abs(s.grid.x(a) - 2.0) < std::abs(s.grid.x(b) - 2.0);
        });
        nodes.resize(std::min<std::size_t>(10, nodes.size()));
        double worst = 0.0;
        for (int i : nodes) {
            const double q = quadrature_dn_phi(s.grid, s.grid.x(i), cfg.regions);
            worst = std::max(worst, std::abs(a_phi.at(i) - q) / std::abs(q));
        }
        return worst;
    };
    const double coarse = error(coarse_M);
    const double fine = error(fine_M);
    SuiteResult r{"quadrature", coarse <= 5e-2 && fine <= 2.5e-2, fine, 2.5e-2, ""};
    r.detail = fmt("max relative error %.3g at coarse grid, ", coarse) + fmt("%.3g at fine grid", fine);
    return r;
}

std::vector<SuiteResult> verify(const RunConfig& cfg, const VerifyOptions& opt) {
    return {check_symmetry(cfg, opt),
            check_maximum_principle(cfg, opt),
            check_forward_lipschitz(cfg, opt),
            check_forward_lipschitz(cfg, opt, 0.25),
            check_uniform_bound(cfg, opt),
            check_alessandrini(cfg, opt),
            check_getoor(cfg, opt),
            check_dense_oracle(cfg, opt),
            check_quadrature(cfg, opt)};
}

std::string format_report(const std::vector<SuiteResult>& results) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-27s %-6s %-14s %-10s %s\n", "suite", "result", "measured", "limit", "detail");
    out += line;
    for (const SuiteResult& r : results) {
        std::snprintf(line, sizeof line, "%-27s %-6s %-14.6g %-10.3g %s\n", r.name.c_str(), r.passed ? "pass" : "FAIL",
                      r.measured, r.threshold, r.detail.c_str());
        out += line;
    }
    return out;
}

}  // namespace fraccal
