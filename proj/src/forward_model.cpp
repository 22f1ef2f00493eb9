#include "fraccal/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fraccal {

Potential::Potential(std::vector<double> values, std::optional<double> cap) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("potential: entries must be finite and nonnegative, got " + std::to_string(v));
        }
        if (cap && v >= *cap) {
            throw std::invalid_argument("potential: entry " + std::to_string(v) + " not below cap " +
                                        std::to_string(*cap));
        }
    }
}

Potential Potential::background(const RegionMap& regions) {
    return Potential(std::vector<double>(regions.omega.size(), 1.0));
}

ForwardModel::ForwardModel(const FracOperator& op, const GridFunction& datum, const RegionMap& regions)
    : op_(op), regions_(regions), datum_(datum) {
    if (!(datum.spec() == op.spec())) throw std::invalid_argument("forward model: datum lives on another grid");
    for (int i : regions.omega) {
        if (datum.at(i) != 0.0) throw std::invalid_argument("forward model: exterior datum must vanish on Omega");
    }
    const GridFunction a_datum = apply(op, datum);

    const auto n = static_cast<Eigen::Index>(regions.omega.size());
    const auto nd = static_cast<Eigen::Index>(regions.dd.size());
    a_omega_.resize(n, n);
    rhs_.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const int i = regions.omega[static_cast<std::size_t>(r)];
        rhs_(r) = -a_datum.at(i);
        for (Eigen::Index c = 0; c < n; ++c) a_omega_(r, c) = op.entry(i, regions.omega[static_cast<std::size_t>(c)]);
    }
    a_d_omega_.resize(nd, n);
    datum_dn_.resize(nd);
    for (Eigen::Index r = 0; r < nd; ++r) {
        const int i = regions.dd[static_cast<std::size_t>(r)];
        datum_dn_(r) = a_datum.at(i);
        for (Eigen::Index c = 0; c < n; ++c) a_d_omega_(r, c) = op.entry(i, regions.omega[static_cast<std::size_t>(c)]);
    }
}

Eigen::VectorXd ForwardModel::solve_omega(std::span<const double> f) const {
    const Eigen::Index n = rhs_.size();
    if (static_cast<Eigen::Index>(f.size()) != n) {
        throw std::invalid_argument("solve: potential has " + std::to_string(f.size()) + " entries, Omega has " +
                                    std::to_string(n) + " nodes");
    }
    Eigen::MatrixXd system = a_omega_;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double fk = f[static_cast<std::size_t>(k)];
        if (!(fk >= 0.0) || !std::isfinite(fk)) throw std::invalid_argument("solve: potential must be nonnegative");
        system(k, k) += fk;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("solve: Cholesky factorisation failed (operator not positive definite)");
    }
    Eigen::VectorXd v = llt.solve(rhs_);
    const double residual = (system * v - rhs_).norm();
    if (!(residual <= 1e-10 * (1.0 + rhs_.norm()))) {
        throw std::runtime_error("solve: residual " + std::to_string(residual) + " above tolerance");
    }
    return v;
}

ForwardSolution ForwardModel::solve(const Potential& f) const {
    const Eigen::VectorXd v_omega = solve_omega(f.values());
    ForwardSolution sol{datum_, GridFunction(op_.spec()), {}};
    for (std::size_t k = 0; k < regions_.omega.size(); ++k) {
        const int i = regions_.omega[k];
        sol.v.at(i) = v_omega(static_cast<Eigen::Index>(k));
        sol.u.at(i) += sol.v.at(i);
    }
    return sol;
}

Eigen::VectorXd ForwardModel::dn_from_omega(const Eigen::VectorXd& v_omega) const {
    return datum_dn_ + a_d_omega_ * v_omega;
}

ForwardSolution solve_dirichlet(const Potential& f, const GridFunction& phi, const FracOperator& op,
                                const RegionMap& regions) {
    return ForwardModel(op, phi, regions).solve(f);
}

const std::vector<double>& dn_on_grid(ForwardSolution& sol, const FracOperator& op, const RegionMap& regions) {
    const GridFunction au = apply(op, sol.u);
    sol.dn.resize(regions.dd.size());
    for (std::size_t k = 0; k < regions.dd.size(); ++k) sol.dn[k] = au.at(regions.dd[k]);
    return sol.dn;
}

std::array<Interval, 2> admissible_intervals(const GridSpec& spec, const RegionMap& regions) {
    auto span_of = [&](const std::vector<int>& nodes) {
        if (nodes.empty()) return Interval{0.0, -1.0};
        return Interval{spec.x(nodes.front()), spec.x(nodes.back())};
    };
    return {span_of(regions.dd_left), span_of(regions.dd_right)};
}

InterpStencil interp_stencil(const GridSpec& spec, const RegionMap& regions, double x) {
    const double tol = 1e-12 * spec.ell();
    std::size_t offset = 0;
    for (const std::vector<int>* comp : {&regions.dd_left, &regions.dd_right}) {
        const std::size_t n = comp->size();
        if (n > 0) {
            const double first = spec.x(comp->front());
            const double last = spec.x(comp->back());
            if (x >= first - tol && x <= last + tol) {
                if (n == 1) return {offset, 0.0};
                const double t = (x - first) / spec.h();
                const double nearest = std::round(t);
                if (std::abs(t - nearest) < 1e-9) {
                    return {offset + static_cast<std::size_t>(std::clamp(nearest, 0.0, static_cast<double>(n - 1))), 0.0};
                }
                auto j = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(n - 2)));
                const double weight = (x - spec.x((*comp)[j])) / spec.h();
                return {offset + j, std::clamp(weight, 0.0, 1.0)};
            }
        }
        offset += n;
    }
    throw std::invalid_argument("eval_G: x = " + std::to_string(x) + " outside the admissible sampling set");
}

double eval_G(const ForwardSolution& sol, const RegionMap& regions, double x) {
    if (sol.dn.size() != regions.dd.size()) throw std::invalid_argument("eval_G: dn not computed");
    const InterpStencil st = interp_stencil(sol.u.spec(), regions, x);
    if (st.weight == 0.0) return sol.dn[st.k];
    return (1.0 - st.weight) * sol.dn[st.k] + st.weight * sol.dn[st.k + 1];
}

PointEvaluator::PointEvaluator(const ForwardModel& model, std::span<const double> xs) : model_(&model) {
    const auto& spec = model.op().spec();
    const auto n = static_cast<Eigen::Index>(xs.size());
    const Eigen::MatrixXd& coupling = model.coupling_d_omega();
    const Eigen::VectorXd& base = model.datum_dn();
    offset_.resize(n);
    gain_.resize(n, coupling.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
        const InterpStencil st = interp_stencil(spec, model.regions(), xs[static_cast<std::size_t>(r)]);
        const auto k = static_cast<Eigen::Index>(st.k);
        if (st.weight == 0.0) {
            offset_(r) = base(k);
            gain_.row(r) = coupling.row(k);
        } else {
            offset_(r) = (1.0 - st.weight) * base(k) + st.weight * base(k + 1);
            gain_.row(r) = (1.0 - st.weight) * coupling.row(k) + st.weight * coupling.row(k + 1);
        }
    }
}

}  // namespace fraccal
