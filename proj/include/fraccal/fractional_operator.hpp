#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fraccal/grid.hpp"

namespace fraccal {

// c_{1,2s} = 4^s s Gamma((1+2s)/2) / (sqrt(pi) Gamma(1-s)).
double riesz_constant(double s);

// C_{d,s} = 4^s Gamma(d/2+s) / (pi^{d/2} |Gamma(-s)|), the singular-integral
// normalisation of (-Delta)^s in R^d.
double kernel_constant(int d, double s);

/**
 * Discrete fractional Laplacian (-Delta)_h^s on the interior nodes of a
 * uniform grid, for functions vanishing outside (-ell, ell).
 *
 * The matrix is symmetric Toeplitz, so it is stored by its first row:
 * symbol()[m] = A_{ij} for |i - j| = m, m = 0..K-2.
 */
class FracOperator {
public:
    // Takes an explicit symbol; used by build_symbol and by fault injection.
    FracOperator(const GridSpec& spec, std::vector<double> symbol, double scale);

    const GridSpec& spec() const { return spec_; }
    std::span<const double> symbol() const { return symbol_; }
    double entry(int i, int j) const { return symbol_[static_cast<std::size_t>(i > j ? i - j : j - i)]; }
    double scale() const { return scale_; }
    std::size_t size() const { return symbol_.size(); }

    // a_0 > 0, a_m < 0 for m >= 1 and every row sum positive.
    bool has_m_matrix_structure() const;

private:
    GridSpec spec_;
    std::vector<double> symbol_;
    double scale_;
};

FracOperator build_symbol(const GridSpec& spec);

// w = A v over interior nodes, direct O(K^2) loop.
GridFunction apply(const FracOperator& op, const GridFunction& v);
void apply(const FracOperator& op, std::span<const double> v, std::span<double> w);

// (K-1)x(K-1) dense copy of A. Refuses K > 2000.
Eigen::MatrixXd assemble_dense(const FracOperator& op);

/**
 * (-Delta)^s phi(x) for x outside the closed support of phi, by adaptive
 * Gauss-Kronrod quadrature of -C_{1,s} * int phi(y) / |x-y|^{1+2s} dy over
 * supp(phi). Throws std::invalid_argument when x touches the support.
 */
double quadrature_dn_phi(const GridSpec& spec, double x, const RegionConfig& cfg = {});

}  // namespace fraccal
