#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fraccal/forward_model.hpp"
#include "fraccal/grid.hpp"
#include "fraccal/rng.hpp"

namespace fraccal {

/**
 * Scaled logistic link Phi(z) = m0 / (1 + (m0 - 1) exp(-k z)).
 *
 * Maps R onto (0, m0) with Phi(0) = 1, is strictly increasing and has
 * bounded derivatives of every order.
 */
class LinkFunction {
public:
    explicit LinkFunction(double m0 = 2.0, double steepness = 1.0);

    double operator()(double z) const;
    // Defined on (0, m0).
    double inverse(double y) const;

    double m0() const { return m0_; }
    double steepness() const { return k_; }

private:
    double m0_;
    double k_;
};

// Position of grid node i inside RegionMap::omega, or throws.
std::size_t omega_position(const RegionMap& regions, int node);

// Potential equal to Phi(F) on the O nodes and to 1 on the rest of Omega.
// F holds one value per O node, in RegionMap::oo order.
Potential link_apply(const LinkFunction& link, std::span<const double> F, const RegionMap& regions);

struct MeasurementSet {
    std::vector<double> xs;
    std::vector<double> ys;
    double sigma = 1.0;
    std::uint64_t seed = 0;

    std::size_t n() const { return xs.size(); }
};

// n iid uniform points on the admissible part of D, component chosen with
// probability proportional to its length.
std::vector<double> sample_design(const GridSpec& spec, const RegionMap& regions, std::size_t n, Rng& rng);

// Y_i = G(f0)(X_i) + sigma W_i. Design points and noise come from the
// "design" and "noise" substreams of rng.
MeasurementSet generate_data(const Potential& f0, const ForwardModel& model, std::size_t n, double sigma,
                             const Rng& rng);

/**
 * Log-likelihood -1/(2 sigma^2) sum_i (Y_i - G(f)(X_i))^2 for a fixed
 * data set. Holds the precomputed point evaluator, so a call costs one
 * forward solve.
 */
class LogLikelihood {
public:
    LogLikelihood(const ForwardModel& model, MeasurementSet data);

    double operator()(const Potential& f) const;
    double operator()(std::span<const double> f_omega) const;

    // Log-likelihood from a vector of predictions G(f)(X_i).
    double from_predictions(const Eigen::VectorXd& predictions) const;

    const MeasurementSet& data() const { return data_; }
    const PointEvaluator& evaluator() const { return evaluator_; }

private:
    MeasurementSet data_;
    PointEvaluator evaluator_;
};

// Convenience wrapper building a LogLikelihood for one evaluation.
double log_likelihood(const Potential& f, const MeasurementSet& data, const ForwardModel& model);

}  // namespace fraccal
