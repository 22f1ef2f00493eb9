#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fraccal/fractional_operator.hpp"
#include "fraccal/grid.hpp"

namespace fraccal {

// Nonnegative potential f sampled on the Omega nodes (in RegionMap::omega order).
class Potential {
public:
    // Throws std::invalid_argument on negative or non-finite entries, or on
    // entries above the optional cap M0.
    explicit Potential(std::vector<double> values, std::optional<double> cap = std::nullopt);

    // f == 1 on every Omega node.
    static Potential background(const RegionMap& regions);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }

    bool operator==(const Potential&) const = default;

private:
    std::vector<double> values_;
};

struct ForwardSolution {
    GridFunction u;           // v + phi on the interior grid
    GridFunction v;           // zero off Omega
    std::vector<double> dn;   // (A u)_i for i in RegionMap::dd, empty until dn_on_grid
};

/**
 * Dirichlet solver for ((-Delta)_h^s + f) u = 0 on Omega, u = datum outside.
 *
 * Writing u = v + datum, v solves (A_OO + diag f) v = -(A datum)|_O with a
 * Cholesky factorisation. Everything independent of f (the Omega block of A,
 * the right-hand side, the D x Omega coupling and (A datum)|_D) is built once.
 */
class ForwardModel {
public:
    ForwardModel(const FracOperator& op, const GridFunction& datum, const RegionMap& regions);

    const FracOperator& op() const { return op_; }
    const RegionMap& regions() const { return regions_; }
    const GridFunction& datum() const { return datum_; }

    // v restricted to Omega. Throws std::runtime_error when the factorisation
    // fails or the residual exceeds 1e-10 (1 + |rhs|).
    Eigen::VectorXd solve_omega(std::span<const double> f) const;

    ForwardSolution solve(const Potential& f) const;

    // (A u)|_D given v on Omega.
    Eigen::VectorXd dn_from_omega(const Eigen::VectorXd& v_omega) const;

    const Eigen::MatrixXd& coupling_d_omega() const { return a_d_omega_; }
    const Eigen::VectorXd& datum_dn() const { return datum_dn_; }

private:
    FracOperator op_;
    RegionMap regions_;
    GridFunction datum_;
    Eigen::MatrixXd a_omega_;
    Eigen::VectorXd rhs_;
    Eigen::MatrixXd a_d_omega_;
    Eigen::VectorXd datum_dn_;
};

ForwardSolution solve_dirichlet(const Potential& f, const GridFunction& phi, const FracOperator& op,
                                const RegionMap& regions);

// Computes (A u) on the D nodes, stores it in sol.dn and returns it.
const std::vector<double>& dn_on_grid(ForwardSolution& sol, const FracOperator& op, const RegionMap& regions);

// Closed intervals [x_first, x_last] spanned by the D nodes of each component.
// Point evaluations of G are admissible only inside these.
std::array<Interval, 2> admissible_intervals(const GridSpec& spec, const RegionMap& regions);

// Linear interpolation stencil: value = (1 - weight) * dn[k] + weight * dn[k+1],
// with k indexing RegionMap::dd.
struct InterpStencil {
    std::size_t k = 0;
    double weight = 0.0;
};

// Throws std::invalid_argument when x is outside the admissible set.
InterpStencil interp_stencil(const GridSpec& spec, const RegionMap& regions, double x);

// G(f)(x) by linear interpolation of sol.dn (which must be populated).
double eval_G(const ForwardSolution& sol, const RegionMap& regions, double x);

/**
 * Affine map v_Omega -> (G(f)(X_1), ..., G(f)(X_N)) for a fixed design,
 * g = g0 + B v. Used by the likelihood so each evaluation costs one solve
 * and one N x |Omega| product. The model must outlive the evaluator.
 */
class PointEvaluator {
public:
    PointEvaluator(const ForwardModel& model, std::span<const double> xs);

    Eigen::VectorXd predict(const Eigen::VectorXd& v_omega) const { return offset_ + gain_ * v_omega; }
    Eigen::VectorXd predict(const Potential& f) const { return predict(model_->solve_omega(f.values())); }

    const ForwardModel& model() const { return *model_; }
    std::size_t size() const { return static_cast<std::size_t>(offset_.size()); }

private:
    const ForwardModel* model_;
    Eigen::VectorXd offset_;
    Eigen::MatrixXd gain_;
};

}  // namespace fraccal
