#include "fraccal/fractional_operator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fraccal {

namespace {

class KahanSum {
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

}  // namespace

double riesz_constant(double s) {
    return std::pow(4.0, s) * s * std::tgamma(0.5 + s) / (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - s));
}

double kernel_constant(int d, double s) {
    const double half_d = 0.5 * static_cast<double>(d);
    return std::pow(4.0, s) * std::tgamma(half_d + s) /
           (std::pow(std::numbers::pi, half_d) * std::abs(std::tgamma(-s)));
}

FracOperator::FracOperator(const GridSpec& spec, std::vector<double> symbol, double scale)
    : spec_(spec), symbol_(std::move(symbol)), scale_(scale) {
    if (symbol_.size() != spec_.interior_size()) {
        throw std::invalid_argument("operator: symbol length " + std::to_string(symbol_.size()) +
                                    " does not match K-1 = " + std::to_string(spec_.interior_size()));
    }
}

bool FracOperator::has_m_matrix_structure() const {
    if (!(symbol_[0] > 0.0)) return false;
    for (std::size_t m = 1; m < symbol_.size(); ++m) {
        if (!(symbol_[m] < 0.0)) return false;
    }
    // The smallest row sum of a symmetric Toeplitz matrix is at the corner row.
    KahanSum corner;
    for (double a : symbol_) corner.add(a);
    return corner.value() > 0.0;
}

FracOperator build_symbol(const GridSpec& spec) {
    const double s = spec.s();
    const int K = spec.K();
    const double scale = riesz_constant(s) / ((1.0 - s) * std::pow(spec.h(), 2.0 * s));
    const double p = 1.0 - s;
    const double q = 1.0 + s;
    const auto Kd = static_cast<double>(K);

    KahanSum diag;
    for (int k = 2; k <= K; ++k) {
        const auto kd = static_cast<double>(k);
        diag.add((std::pow(kd + 1.0, p) - std::pow(kd - 1.0, p)) / std::pow(kd, q));
    }
    diag.add((std::pow(Kd, p) - std::pow(Kd - 1.0, p)) / std::pow(Kd, q));
    diag.add(std::pow(2.0, p));
    diag.add(p / (s * std::pow(Kd, 2.0 * s)));

    std::vector<double> symbol(spec.interior_size());
    symbol[0] = scale * diag.value();
    if (symbol.size() > 1) symbol[1] = -scale * std::pow(2.0, -s);
    for (std::size_t m = 2; m < symbol.size(); ++m) {
        const auto md = static_cast<double>(m);
        symbol[m] = -scale * (std::pow(md + 1.0, p) - std::pow(md - 1.0, p)) / (2.0 * std::pow(md, q));
    }
    return FracOperator(spec, std::move(symbol), scale);
}

void apply(const FracOperator& op, std::span<const double> v, std::span<double> w) {
    const std::size_t n = op.size();
    if (v.size() != n || w.size() != n) {
        throw std::invalid_argument("apply: dimension mismatch (" + std::to_string(v.size()) + " vs " +
                                    std::to_string(n) + ")");
    }
    const auto a = op.symbol();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) acc += a[i - j] * v[j];
        for (std::size_t j = i; j < n; ++j) acc += a[j - i] * v[j];
        w[i] = acc;
    }
}

GridFunction apply(const FracOperator& op, const GridFunction& v) {
    if (!(v.spec() == op.spec())) throw std::invalid_argument("apply: grid mismatch");
    GridFunction w(op.spec());
    apply(op, v.values(), w.values());
    return w;
}

Eigen::MatrixXd assemble_dense(const FracOperator& op) {
    if (op.spec().K() > 2000) {
        throw std::invalid_argument("assemble_dense: K = " + std::to_string(op.spec().K()) + " exceeds 2000");
    }
    const auto n = static_cast<Eigen::Index>(op.size());
    const auto a = op.symbol();
    Eigen::MatrixXd dense(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) dense(i, j) = a[static_cast<std::size_t>(i > j ? i - j : j - i)];
    }
    return dense;
}

double quadrature_dn_phi(const GridSpec& spec, double x, const RegionConfig& cfg) {
    const Interval supp = cfg.phi_support;
    if (!(x < supp.lo || x > supp.hi)) {
        throw std::invalid_argument("quadrature_dn_phi: x = " + std::to_string(x) +
                                    " lies in the closed support of phi");
    }
    const double s = spec.s();
    const double c = kernel_constant(1, s);
    auto integrand = [&](double y) { return phi_value(y, cfg) / std::pow(std::abs(x - y), 1.0 + 2.0 * s); };

    // Split at the bump centre; the endpoints are the support boundary where
    // phi vanishes to all orders.
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double mid = 0.5 * (supp.lo + supp.hi);
    double err_left = 0.0;
    double err_right = 0.0;
    const double left = GK::integrate(integrand, supp.lo, mid, 30, 1e-14, &err_left);
    const double right = GK::integrate(integrand, mid, supp.hi, 30, 1e-14, &err_right);
    const double err = c * (err_left + err_right);
    if (!(err <= 1e-8)) {
        throw std::runtime_error("quadrature_dn_phi: error estimate " + std::to_string(err) + " above 1e-8");
    }
    return -c * (left + right);
}

}  // namespace fraccal
