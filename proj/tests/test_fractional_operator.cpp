#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fraccal/fractional_operator.hpp"
#include "fraccal/rng.hpp"

using namespace fraccal;

namespace {

// Reference symbols from a 30-digit evaluation of the Toeplitz entries.
constexpr double kSymbolK6Half[] = {1.3356515760689492371, -0.45015815807855303478, -0.082384660788780768282,
                                    -0.035884554401100887902, -0.020054205999423126121};
constexpr double kSymbolK6Point3[] = {1.1553257956101304967, -0.26699476773400670139, -0.077272910129902815006,
                                      -0.039974302552321961518, -0.025143034944444597002};

double getoor_error(int M) {
    const GridSpec g = build_grid(3.0, M, 0.5);
    const FracOperator op = build_symbol(g);
    GridFunction v(g);
    for (int i = 1; i < g.K(); ++i) v.at(i) = std::sqrt(std::max(0.0, 1.0 - g.x(i) * g.x(i)));
    const GridFunction w = apply(op, v);
    double err = 0.0;
    for (int i = 1; i < g.K(); ++i) {
        if (std::abs(g.x(i)) <= 0.5 + 1e-12) err = std::max(err, std::abs(w.at(i) - 1.0));
    }
    return err;
}

}  // namespace

TEST_CASE("normalisation constants") {
    CHECK(riesz_constant(0.5) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(kernel_constant(1, 0.5) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(riesz_constant(0.3) == doctest::Approx(0.230096381681632104648).epsilon(1e-13));
    CHECK(riesz_constant(0.75) == doctest::Approx(0.299206710301074508455).epsilon(1e-13));
    for (double s : {0.1, 0.3, 0.5, 0.75, 0.9}) {
        CHECK(kernel_constant(1, s) == doctest::Approx(riesz_constant(s)).epsilon(1e-13));
    }
}

TEST_CASE("symbol entries match reference values") {
    const FracOperator half = build_symbol(build_grid(3.0, 1, 0.5));
    const FracOperator third = build_symbol(build_grid(3.0, 1, 0.3));
    REQUIRE(half.size() == 5);
    for (std::size_t m = 0; m < 5; ++m) {
        CHECK(half.symbol()[m] == doctest::Approx(kSymbolK6Half[m]).epsilon(1e-13));
        CHECK(third.symbol()[m] == doctest::Approx(kSymbolK6Point3[m]).epsilon(1e-13));
    }
    const GridSpec g = build_grid(3.0, 50, 0.5);
    const FracOperator op = build_symbol(g);
    CHECK(op.symbol()[0] == doctest::Approx(65.907831239539687365).epsilon(1e-13));
    CHECK(op.symbol()[1] * g.h() == doctest::Approx(-std::sqrt(2.0) / std::numbers::pi).epsilon(1e-13));
    CHECK(op.symbol()[2] * g.h() == doctest::Approx(-0.0823846607887807682821).epsilon(1e-13));
}

TEST_CASE("symbol has M-matrix sign structure") {
    for (double s : {0.1, 0.5, 0.9}) {
        for (int M : {1, 4, 50}) {
            const FracOperator op = build_symbol(build_grid(3.0, M, s));
            CHECK(op.has_m_matrix_structure());
        }
    }
}

TEST_CASE("apply: zero, unit vectors and dimension checks") {
    const GridSpec g = build_grid(3.0, 4, 0.4);
    const FracOperator op = build_symbol(g);
    const GridFunction zero = apply(op, GridFunction(g));
    for (double w : zero.values()) CHECK(w == 0.0);

    for (int k = 1; k < g.K(); ++k) {
        GridFunction e(g);
        e.at(k) = 1.0;
        const GridFunction col = apply(op, e);
        for (int i = 1; i < g.K(); ++i) CHECK(col.at(i) == op.entry(i, k));
    }
    std::vector<double> shortv(3, 0.0);
    std::vector<double> out(op.size());
    CHECK_THROWS_AS(apply(op, shortv, out), std::invalid_argument);
    CHECK_THROWS_AS(apply(op, GridFunction(build_grid(3.0, 5, 0.4))), std::invalid_argument);
}

TEST_CASE("apply is self-adjoint") {
    const GridSpec g = build_grid(3.0, 40, 0.35);
    const FracOperator op = build_symbol(g);
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        GridFunction u(g);
        GridFunction v(g);
        for (double& x : u.values()) x = rng.normal();
        for (double& x : v.values()) x = rng.normal();
        const GridFunction au = apply(op, u);
        const GridFunction av = apply(op, v);
        double lhs = 0.0;
        double rhs = 0.0;
        double scale = 0.0;
        for (int i = 1; i < g.K(); ++i) {
            lhs += au.at(i) * v.at(i);
            rhs += u.at(i) * av.at(i);
            scale += std::abs(au.at(i) * v.at(i));
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
}

TEST_CASE("assemble_dense: layout, symmetry, guard") {
    const FracOperator op = build_symbol(build_grid(3.0, 1, 0.5));
    const Eigen::MatrixXd A = assemble_dense(op);
    CHECK(A.rows() == 5);
    CHECK(A(0, 4) == op.symbol()[4]);
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(assemble_dense(build_symbol(build_grid(3.0, 334, 0.5))), std::invalid_argument);
}

TEST_CASE("assemble_dense: K = 12 is positive definite") {
    const Eigen::MatrixXd A = assemble_dense(build_symbol(build_grid(3.0, 2, 0.5)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("dense matvec agrees with symbol apply") {
    const GridSpec g = build_grid(3.0, 100, 0.6);
    const FracOperator op = build_symbol(g);
    const Eigen::MatrixXd A = assemble_dense(op);
    Rng rng(5);
    GridFunction v(g);
    for (double& x : v.values()) x = rng.normal();
    const GridFunction w = apply(op, v);
    const Eigen::VectorXd dense = A * Eigen::Map<const Eigen::VectorXd>(v.values().data(), A.cols());
    const Eigen::VectorXd fast = Eigen::Map<const Eigen::VectorXd>(w.values().data(), A.rows());
    CHECK((dense - fast).norm() <= 1e-12 * dense.norm());
}

TEST_CASE("Getoor identity: (-Delta)^{1/2} (1-x^2)_+^{1/2} = 1 on (-1,1)") {
    const double e25 = getoor_error(25);
    const double e50 = getoor_error(50);
    const double e100 = getoor_error(100);
    CHECK(e50 < e25);
    CHECK(e100 < e50);
    CHECK(e100 < 0.05);
}

TEST_CASE("quadrature oracle") {
    const GridSpec g = build_grid(3.0, 50, 0.5);
    // 30-digit reference values of -C_{1,s} int phi(y) |x-y|^{-1-2s} dy.
    CHECK(quadrature_dn_phi(g, 2.0) == doctest::Approx(-1.10816669576135063666).epsilon(1e-10));
    CHECK(quadrature_dn_phi(g, 1.5) == doctest::Approx(-1.40358515656913827218).epsilon(1e-10));
    CHECK(quadrature_dn_phi(g, -1.5) == doctest::Approx(-23.7699029969514132956).epsilon(1e-10));
    CHECK(quadrature_dn_phi(g, 0.0) == doctest::Approx(-3.61355562954745599454).epsilon(1e-10));
    CHECK(quadrature_dn_phi(build_grid(3.0, 50, 0.3), 2.0) ==
          doctest::Approx(-1.46073462228200675172).epsilon(1e-10));

    RegionConfig none;
    none.phi_amplitude = 0.0;
    CHECK(quadrature_dn_phi(g, 2.0, none) == 0.0);

    CHECK_THROWS_AS(quadrature_dn_phi(g, -2.5), std::invalid_argument);
    CHECK_THROWS_AS(quadrature_dn_phi(g, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(quadrature_dn_phi(g, -3.0), std::invalid_argument);
}

TEST_CASE("discrete operator on phi approaches the quadrature oracle") {
    double previous = 1.0;
    for (int M : {25, 50, 100}) {
        const GridSpec g = build_grid(3.0, M, 0.5);
        const GridFunction aphi = apply(build_symbol(g), sample_phi(g));
        const int node = 5 * M;  // x = 2
        const double rel = std::abs(aphi.at(node) - quadrature_dn_phi(g, g.x(node))) / std::abs(quadrature_dn_phi(g, g.x(node)));
        CHECK(aphi.at(node) < 0.0);
        CHECK(rel < 5e-2);
        CHECK(rel <= previous);
        previous = rel;
    }
}
