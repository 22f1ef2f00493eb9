#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fraccal/forward_model.hpp"
#include "fraccal/rng.hpp"

using namespace fraccal;

namespace {

struct Setup {
    GridSpec grid;
    RegionMap regions;
    FracOperator op;
    GridFunction phi;

    explicit Setup(int M, double s = 0.5)
        : grid(build_grid(3.0, M, s)), regions(classify_regions(grid)), op(build_symbol(grid)), phi(sample_phi(grid)) {}
};

Potential random_potential(const RegionMap& regions, Rng& rng, double top = 5.0) {
    std::vector<double> f(regions.omega.size());
    for (double& x : f) x = top * rng.uniform();
    return Potential(std::move(f));
}

}  // namespace

TEST_CASE("potential validation") {
    CHECK_THROWS_AS(Potential({1.0, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(Potential({1.0, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(Potential({1.0, 3.0}, 2.0), std::invalid_argument);
    CHECK_NOTHROW(Potential({0.0, 1.9}, 2.0));
}

TEST_CASE("zero datum gives zero solution") {
    const Setup s(10);
    ForwardSolution sol = solve_dirichlet(Potential::background(s.regions), GridFunction(s.grid), s.op, s.regions);
    for (double v : sol.u.values()) CHECK(v == 0.0);
    for (double v : dn_on_grid(sol, s.op, s.regions)) CHECK(v == 0.0);
}

TEST_CASE("solve is deterministic") {
    const Setup s(10);
    Rng rng(3);
    const Potential f = random_potential(s.regions, rng);
    const ForwardSolution a = solve_dirichlet(f, s.phi, s.op, s.regions);
    const ForwardSolution b = solve_dirichlet(Potential(std::vector<double>(f.values().begin(), f.values().end())),
                                              s.phi, s.op, s.regions);
    for (int i = 1; i < s.grid.K(); ++i) CHECK(a.u.at(i) == b.u.at(i));
}

TEST_CASE("M = 2: matches a dense solve of the full Dirichlet system") {
    const Setup s(2);
    REQUIRE(s.regions.omega.size() == 3);
    const Potential f = Potential::background(s.regions);
    const ForwardSolution sol = solve_dirichlet(f, s.phi, s.op, s.regions);

    // Oracle: every interior node is an unknown; Omega rows carry the
    // equation, the remaining rows pin u to phi.
    const Eigen::MatrixXd A = assemble_dense(s.op);
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 1; i < s.grid.K(); ++i) {
        const Eigen::Index r = i - 1;
        if (s.regions.in_omega(i)) {
            system.row(r) = A.row(r);
            system(r, r) += 1.0;
            rhs(r) = 0.0;
        } else {
            rhs(r) = s.phi.at(i);
        }
    }
    const Eigen::VectorXd u = system.fullPivLu().solve(rhs);
    for (int i : s.regions.omega) {
        CHECK(sol.v.at(i) == doctest::Approx(u(i - 1)).epsilon(1e-12));
        CHECK(sol.u.at(i) == doctest::Approx(u(i - 1)).epsilon(1e-12));
    }
    for (int i = 1; i < s.grid.K(); ++i) {
        if (!s.regions.in_omega(i)) {
            CHECK(sol.v.at(i) == 0.0);
            CHECK(sol.u.at(i) == s.phi.at(i));
        }
    }
}

TEST_CASE("solver rejects bad input") {
    const Setup s(5);
    const ForwardModel model(s.op, s.phi, s.regions);
    std::vector<double> f(s.regions.omega.size(), 1.0);
    CHECK_NOTHROW(model.solve_omega(f));
    f[2] = -1.0;
    CHECK_THROWS_AS(model.solve_omega(f), std::invalid_argument);
    CHECK_THROWS_AS(model.solve_omega(std::vector<double>(3, 1.0)), std::invalid_argument);

    GridFunction bad_datum = s.phi;
    bad_datum.at(s.regions.omega[0]) = 1.0;
    CHECK_THROWS_AS(ForwardModel(s.op, bad_datum, s.regions), std::invalid_argument);

    // A symbol that is not positive definite breaks the factorisation.
    std::vector<double> sym(s.op.symbol().begin(), s.op.symbol().end());
    for (double& a : sym) a = -std::abs(a);
    const FracOperator broken(s.grid, sym, s.op.scale());
    const ForwardModel broken_model(broken, s.phi, s.regions);
    CHECK_THROWS_AS(broken_model.solve_omega(std::vector<double>(s.regions.omega.size(), 0.0)), std::runtime_error);
}

TEST_CASE("discrete maximum principle") {
    const Setup s(20);
    const ForwardModel model(s.op, s.phi, s.regions);
    const double phi_max = *std::max_element(s.phi.values().begin(), s.phi.values().end());
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const ForwardSolution sol = model.solve(random_potential(s.regions, rng));
        for (int i : s.regions.omega) {
            CHECK(sol.u.at(i) >= 0.0);
            CHECK(sol.u.at(i) <= phi_max * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("dn_on_grid: fast coupling agrees with full apply, potentials are distinguished") {
    const Setup s(15);
    const ForwardModel model(s.op, s.phi, s.regions);
    const Potential zero(std::vector<double>(s.regions.omega.size(), 0.0));
    const Potential one = Potential::background(s.regions);

    ForwardSolution a = model.solve(zero);
    ForwardSolution b = model.solve(one);
    const std::vector<double> dn_a = dn_on_grid(a, s.op, s.regions);
    const std::vector<double> dn_b = dn_on_grid(b, s.op, s.regions);
    const Eigen::VectorXd fast = model.dn_from_omega(model.solve_omega(one.values()));
    double diff2 = 0.0;
    for (std::size_t k = 0; k < dn_b.size(); ++k) {
        CHECK(fast(static_cast<Eigen::Index>(k)) == doctest::Approx(dn_b[k]).epsilon(1e-11));
        diff2 += (dn_a[k] - dn_b[k]) * (dn_a[k] - dn_b[k]);
    }
    CHECK(std::sqrt(s.grid.h() * diff2) > 0.0);
}

TEST_CASE("eval_G: knots, midpoints, admissible set") {
    const Setup s(10);
    ForwardSolution sol = solve_dirichlet(Potential::background(s.regions), s.phi, s.op, s.regions);
    dn_on_grid(sol, s.op, s.regions);

    for (std::size_t k = 0; k < s.regions.dd.size(); ++k) {
        CHECK(eval_G(sol, s.regions, s.grid.x(s.regions.dd[k])) == doctest::Approx(sol.dn[k]).epsilon(1e-14));
    }
    const int i = s.regions.dd_right[3];
    const double mid = 0.5 * (s.grid.x(i) + s.grid.x(i + 1));
    const std::size_t k = static_cast<std::size_t>(std::find(s.regions.dd.begin(), s.regions.dd.end(), i) - s.regions.dd.begin());
    CHECK(eval_G(sol, s.regions, mid) == doctest::Approx(0.5 * (sol.dn[k] + sol.dn[k + 1])).epsilon(1e-13));

    const auto parts = admissible_intervals(s.grid, s.regions);
    CHECK(parts[0].lo == doctest::Approx(-3.0 + s.grid.h()));
    CHECK(parts[0].hi == doctest::Approx(-1.0 - s.grid.h()));
    CHECK(parts[1].lo == doctest::Approx(1.0 + s.grid.h()));
    CHECK(parts[1].hi == doctest::Approx(3.0 - s.grid.h()));
    CHECK_THROWS_AS(eval_G(sol, s.regions, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_G(sol, s.regions, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_G(sol, s.regions, 3.0 - 0.5 * s.grid.h()), std::invalid_argument);

    ForwardSolution fresh = solve_dirichlet(Potential::background(s.regions), s.phi, s.op, s.regions);
    CHECK_THROWS_AS(eval_G(fresh, s.regions, 2.0), std::invalid_argument);
}

TEST_CASE("eval_G self-converges under refinement") {
    auto g_at = [](int M) {
        const Setup s(M);
        const ForwardModel model(s.op, s.phi, s.regions);
        // Bump potential defined independently of the grid.
        std::vector<double> f;
        for (int i : s.regions.omega) {
            const double x = s.grid.x(i);
            f.push_back(std::abs(x) < 0.5 ? 1.0 + 0.5 * std::pow(1.0 - 4.0 * x * x, 3) : 1.0);
        }
        ForwardSolution sol = model.solve(Potential(f));
        dn_on_grid(sol, s.op, s.regions);
        return eval_G(sol, s.regions, 2.13);
    };
    const double g25 = g_at(25);
    const double g50 = g_at(50);
    const double g100 = g_at(100);
    CHECK(std::abs(g100 - g50) < std::abs(g50 - g25));
}

TEST_CASE("point evaluator reproduces eval_G") {
    const Setup s(12);
    const ForwardModel model(s.op, s.phi, s.regions);
    Rng rng(8);
    const Potential f = random_potential(s.regions, rng);
    ForwardSolution sol = model.solve(f);
    dn_on_grid(sol, s.op, s.regions);
    const std::vector<double> xs{-2.91, -1.2, 1.0 + s.grid.h(), 1.5, 2.0, 2.77, 3.0 - s.grid.h()};
    const PointEvaluator eval(model, xs);
    const Eigen::VectorXd pred = eval.predict(f);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        CHECK(pred(static_cast<Eigen::Index>(k)) == doctest::Approx(eval_G(sol, s.regions, xs[k])).epsilon(1e-11));
    }
}

TEST_CASE("discrete Alessandrini identity") {
    const Setup s(20);
    const ForwardModel model_phi(s.op, s.phi, s.regions);
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
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
        double lhs_scale = 0.0;
        for (int i = 1; i < s.grid.K(); ++i) {
            if (s.regions.in_omega(i)) continue;
            lhs += psi.at(i) * adiff.at(i);
            lhs_scale += std::abs(psi.at(i) * adiff.at(i));
        }
        double rhs = 0.0;
        for (std::size_t k = 0; k < s.regions.omega.size(); ++k) {
            const int i = s.regions.omega[k];
            rhs += (f1[k] - f2[k]) * u1.u.at(i) * w2.u.at(i);
        }
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(std::abs(rhs), lhs_scale));
    }
}
