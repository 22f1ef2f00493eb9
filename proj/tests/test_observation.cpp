#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fraccal/observation.hpp"

using namespace fraccal;

namespace {

struct Setup {
    GridSpec grid;
    RegionMap regions;
    FracOperator op;
    GridFunction phi;
    ForwardModel model;

    explicit Setup(int M)
        : grid(build_grid(3.0, M, 0.5)),
          regions(classify_regions(grid)),
          op(build_symbol(grid)),
          phi(sample_phi(grid)),
          model(op, phi, regions) {}
};

}  // namespace

TEST_CASE("link function") {
    const LinkFunction link(2.0, 1.0);
    CHECK(link(0.0) == 1.0);
    CHECK(link(std::log(3.0)) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(link(50.0) == doctest::Approx(2.0));
    CHECK(link(-50.0) == doctest::Approx(0.0));
    CHECK(link(-50.0) > 0.0);
    double prev = link(-10.0);
    for (double z = -9.9; z < 10.0; z += 0.1) {
        CHECK(link(z) > prev);
        prev = link(z);
    }
    CHECK_THROWS_AS(LinkFunction(1.0), std::invalid_argument);
    CHECK_THROWS_AS(LinkFunction(2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(link.inverse(2.0), std::invalid_argument);
    CHECK_THROWS_AS(link.inverse(0.0), std::invalid_argument);
}

TEST_CASE("link round trip") {
    for (double m0 : {1.5, 2.0, 5.0}) {
        for (double k : {0.5, 1.0, 3.0}) {
            const LinkFunction link(m0, k);
            for (double z = -4.0; z <= 4.0; z += 0.37) {
                CHECK(link.inverse(link(z)) == doctest::Approx(z).epsilon(1e-12).scale(1.0));
                const double y = link(z);
                CHECK(link(link.inverse(y)) == doctest::Approx(y).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("link_apply: background and O placement") {
    const Setup s(10);
    const LinkFunction link(2.0);
    const Potential bg = link_apply(link, std::vector<double>(s.regions.oo.size(), 0.0), s.regions);
    for (double v : bg.values()) CHECK(v == 1.0);

    std::vector<double> F(s.regions.oo.size(), std::log(3.0));
    const Potential f = link_apply(link, F, s.regions);
    for (std::size_t k = 0; k < s.regions.omega.size(); ++k) {
        const bool in_o = std::binary_search(s.regions.oo.begin(), s.regions.oo.end(), s.regions.omega[k]);
        CHECK(f[k] == doctest::Approx(in_o ? 1.5 : 1.0));
        CHECK(f[k] > 0.0);
        CHECK(f[k] < 2.0);
    }
    CHECK_THROWS_AS(link_apply(link, std::vector<double>(3, 0.0), s.regions), std::invalid_argument);
}

TEST_CASE("sample_design: admissible, balanced, deterministic") {
    const Setup s(10);
    const auto parts = admissible_intervals(s.grid, s.regions);
    Rng rng(1);
    const std::size_t n = 10000;
    const std::vector<double> xs = sample_design(s.grid, s.regions, n, rng);
    std::size_t right = 0;
    for (double x : xs) {
        const bool ok = (x >= parts[0].lo && x <= parts[0].hi) || (x >= parts[1].lo && x <= parts[1].hi);
        CHECK(ok);
        right += x > 0.0;
    }
    const double frac = static_cast<double>(right) / static_cast<double>(n);
    CHECK(std::abs(frac - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(n)));

    Rng again(1);
    CHECK(sample_design(s.grid, s.regions, n, again) == xs);
    Rng one(2);
    CHECK(sample_design(s.grid, s.regions, 1, one).size() == 1);
    CHECK_THROWS_AS(sample_design(s.grid, s.regions, 0, one), std::invalid_argument);
}

TEST_CASE("generate_data: noise moments and determinism") {
    const Setup s(10);
    const Potential f0 = Potential::background(s.regions);
    const double sigma = 0.001;
    const MeasurementSet data = generate_data(f0, s.model, 100000, sigma, Rng(5));
    CHECK(data.n() == 100000);
    CHECK(data.sigma == sigma);

    ForwardSolution sol = s.model.solve(f0);
    dn_on_grid(sol, s.op, s.regions);
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t k = 0; k < data.n(); ++k) {
        const double r = data.ys[k] - eval_G(sol, s.regions, data.xs[k]);
        sum += r;
        sum2 += r * r;
    }
    const double n = static_cast<double>(data.n());
    const double var = sum2 / n - (sum / n) * (sum / n);
    CHECK(std::abs(var / (sigma * sigma) - 1.0) < 0.05);

    const MeasurementSet again = generate_data(f0, s.model, 100, sigma, Rng(5));
    const MeasurementSet other = generate_data(f0, s.model, 100, sigma, Rng(6));
    for (std::size_t k = 0; k < 100; ++k) {
        CHECK(again.xs[k] == data.xs[k]);
        CHECK(again.ys[k] == data.ys[k]);
    }
    CHECK(other.xs != again.xs);
    CHECK_THROWS_AS(generate_data(f0, s.model, 10, 0.0, Rng(5)), std::invalid_argument);
}

TEST_CASE("log_likelihood: hand sums") {
    const Setup s(10);
    const Potential f = Potential::background(s.regions);
    ForwardSolution sol = s.model.solve(f);
    dn_on_grid(sol, s.op, s.regions);

    MeasurementSet data;
    data.sigma = 0.001;
    data.xs = {-2.3, 1.7, 2.4};
    for (double x : data.xs) data.ys.push_back(eval_G(sol, s.regions, x));
    CHECK(log_likelihood(f, data, s.model) == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));

    const std::vector<double> residuals{0.1, -0.2, 0.3};
    for (std::size_t k = 0; k < 3; ++k) data.ys[k] += residuals[k];
    CHECK(log_likelihood(f, data, s.model) == doctest::Approx(-70000.0).epsilon(1e-9));

    MeasurementSet single;
    single.sigma = 0.5;
    single.xs = {2.0};
    single.ys = {eval_G(sol, s.regions, 2.0) + 0.25};
    CHECK(log_likelihood(f, single, s.model) == doctest::Approx(-0.25 * 0.25 / (2.0 * 0.25)).epsilon(1e-9));
}

TEST_CASE("log_likelihood: nonpositive and permutation invariant") {
    const Setup s(10);
    const Potential f0 = Potential::background(s.regions);
    const MeasurementSet data = generate_data(f0, s.model, 40, 0.01, Rng(9));
    std::vector<double> bump(s.regions.omega.size(), 1.3);
    const Potential f(bump);
    const double l = log_likelihood(f, data, s.model);
    CHECK(l <= 0.0);

    MeasurementSet shuffled = data;
    std::reverse(shuffled.xs.begin(), shuffled.xs.end());
    std::reverse(shuffled.ys.begin(), shuffled.ys.end());
    std::rotate(shuffled.xs.begin(), shuffled.xs.begin() + 7, shuffled.xs.end());
    std::rotate(shuffled.ys.begin(), shuffled.ys.begin() + 7, shuffled.ys.end());
    CHECK(log_likelihood(f, shuffled, s.model) == doctest::Approx(l).epsilon(1e-12));
}

TEST_CASE("truth statistic -2 l(f0) / N has mean one") {
    const Setup s(8);
    const Potential f0 = Potential::background(s.regions);
    const std::size_t N = 50;
    const int datasets = 200;
    double mean = 0.0;
    for (int d = 0; d < datasets; ++d) {
        const MeasurementSet data = generate_data(f0, s.model, N, 0.001, Rng(1000 + static_cast<std::uint64_t>(d)));
        mean += -2.0 * log_likelihood(f0, data, s.model) / static_cast<double>(N);
    }
    mean /= datasets;
    CHECK(std::abs(mean - 1.0) < 3.0 * std::sqrt(2.0 / (static_cast<double>(N) * datasets)));
}
