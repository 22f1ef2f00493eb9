#include "fraccal/observation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fraccal {

LinkFunction::LinkFunction(double m0, double steepness) : m0_(m0), k_(steepness) {
    if (!(m0 > 1.0)) throw std::invalid_argument("link: m0 must exceed 1");
    if (!(steepness > 0.0)) throw std::invalid_argument("link: steepness must be positive");
}

double LinkFunction::operator()(double z) const { return m0_ / (1.0 + (m0_ - 1.0) * std::exp(-k_ * z)); }

double LinkFunction::inverse(double y) const {
    if (!(y > 0.0 && y < m0_)) throw std::invalid_argument("link: inverse defined on (0, m0) only");
    return std::log((m0_ - 1.0) * y / (m0_ - y)) / k_;
}

std::size_t omega_position(const RegionMap& regions, int node) {
    const auto it = std::lower_bound(regions.omega.begin(), regions.omega.end(), node);
    if (it == regions.omega.end() || *it != node) {
        throw std::invalid_argument("node " + std::to_string(node) + " is not an Omega node");
    }
    return static_cast<std::size_t>(it - regions.omega.begin());
}

Potential link_apply(const LinkFunction& link, std::span<const double> F, const RegionMap& regions) {
    if (F.size() != regions.oo.size()) throw std::invalid_argument("link_apply: F must have one value per O node");
    std::vector<double> f(regions.omega.size(), 1.0);
    for (std::size_t k = 0; k < F.size(); ++k) f[omega_position(regions, regions.oo[k])] = link(F[k]);
    return Potential(std::move(f));
}

std::vector<double> sample_design(const GridSpec& spec, const RegionMap& regions, std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("sample_design: n must be >= 1");
    const auto parts = admissible_intervals(spec, regions);
    const double left = std::max(0.0, parts[0].length());
    const double right = std::max(0.0, parts[1].length());
    if (!(left + right > 0.0)) throw std::invalid_argument("sample_design: admissible set is empty");
    std::vector<double> xs(n);
    for (auto& x : xs) {
        const double side = rng.uniform();
        const double t = rng.uniform();
        const Interval& iv = side * (left + right) < left ? parts[0] : parts[1];
        x = iv.lo + t * iv.length();
    }
    return xs;
}

MeasurementSet generate_data(const Potential& f0, const ForwardModel& model, std::size_t n, double sigma,
                             const Rng& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("generate_data: sigma must be positive");
    Rng design = rng.substream("design");
    Rng noise = rng.substream("noise");

    MeasurementSet data;
    data.sigma = sigma;
    data.seed = rng.seed();
    data.xs = sample_design(model.op().spec(), model.regions(), n, design);
    ForwardSolution sol = model.solve(f0);
    dn_on_grid(sol, model.op(), model.regions());
    data.ys.resize(n);
    for (std::size_t k = 0; k < n; ++k) data.ys[k] = eval_G(sol, model.regions(), data.xs[k]) + sigma * noise.normal();
    return data;
}

LogLikelihood::LogLikelihood(const ForwardModel& model, MeasurementSet data)
    : data_(std::move(data)), evaluator_(model, data_.xs) {
    if (data_.ys.size() != data_.xs.size()) throw std::invalid_argument("likelihood: xs and ys differ in length");
    if (!(data_.sigma > 0.0)) throw std::invalid_argument("likelihood: sigma must be positive");
}

double LogLikelihood::from_predictions(const Eigen::VectorXd& predictions) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < data_.ys.size(); ++k) {
        const double r = data_.ys[k] - predictions(static_cast<Eigen::Index>(k));
        sum += r * r;
    }
    return -sum / (2.0 * data_.sigma * data_.sigma);
}

double LogLikelihood::operator()(std::span<const double> f_omega) const {
    return from_predictions(evaluator_.predict(evaluator_.model().solve_omega(f_omega)));
}

double LogLikelihood::operator()(const Potential& f) const { return (*this)(f.values()); }

double log_likelihood(const Potential& f, const MeasurementSet& data, const ForwardModel& model) {
    return LogLikelihood(model, data)(f);
}

}  // namespace fraccal
