#include "fraccal/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fraccal {

AcceptRule parse_accept_rule(const std::string& name) {
    if (name == "greedy") return AcceptRule::greedy;
    if (name == "pcn") return AcceptRule::pcn;
    throw std::invalid_argument("sampler: unknown accept rule '" + name + "'");
}

std::string to_string(AcceptRule rule) { return rule == AcceptRule::greedy ? "greedy" : "pcn"; }

ChainSpace parse_chain_space(const std::string& name) {
    if (name == "potential") return ChainSpace::potential;
    if (name == "link") return ChainSpace::link;
    throw std::invalid_argument("sampler: unknown chain space '" + name + "'");
}

std::string to_string(ChainSpace space) { return space == ChainSpace::potential ? "potential" : "link"; }

void SamplerConfig::validate() const {
    if (!(step_beta > 0.0 && step_beta <= 1.0)) throw std::invalid_argument("sampler: step_beta must lie in (0,1]");
    if (iterations < 2) throw std::invalid_argument("sampler: need at least 2 iterations");
    if (thinning < 1) throw std::invalid_argument("sampler: thinning must be >= 1");
    prior.validate();
}

FieldMap::FieldMap(const RegionMap& regions, ChainSpace space, LinkFunction link)
    : omega_size_(regions.omega.size()), space_(space), link_(link) {
    for (int i : regions.oo) o_positions_.push_back(omega_position(regions, i));
}

Potential FieldMap::potential(std::span<const double> field, std::size_t* clipped) const {
    if (field.size() != o_positions_.size()) throw std::invalid_argument("field map: wrong field length");
    std::vector<double> f(omega_size_, 1.0);
    std::size_t n_clipped = 0;
    for (std::size_t k = 0; k < field.size(); ++k) {
        double value = field[k];
        if (space_ == ChainSpace::link) {
            value = link_(value);
        } else if (value < 0.0) {
            value = 0.0;
            ++n_clipped;
        }
        f[o_positions_[k]] = value;
    }
    if (clipped) *clipped = n_clipped;
    return Potential(std::move(f));
}

std::vector<double> pcn_step(std::span<const double> current, std::span<const double> xi, double step_beta,
                             double center) {
    if (current.size() != xi.size()) throw std::invalid_argument("pcn_step: size mismatch");
    const double keep = std::sqrt(1.0 - step_beta * step_beta);
    std::vector<double> out(current.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = center + keep * (current[k] - center) + step_beta * xi[k];
    return out;
}

Potential pcn_propose(const Potential& current, const GridFunction& draw, double step_beta, const RegionMap& regions) {
    if (current.size() != regions.omega.size()) throw std::invalid_argument("pcn_propose: potential size mismatch");
    const double keep = std::sqrt(1.0 - step_beta * step_beta);
    std::vector<double> f(current.size(), 1.0);
    for (int i : regions.oo) {
        const std::size_t k = omega_position(regions, i);
        f[k] = std::max(0.0, 1.0 + keep * (current[k] - 1.0) + step_beta * draw.at(i));
    }
    return Potential(std::move(f));
}

AcceptDecision accept_step(double l_current, double l_proposal, AcceptRule rule, Rng& rng) {
    if (std::isnan(l_current) || std::isnan(l_proposal)) return {false, true};
    if (rule == AcceptRule::greedy) return {l_proposal > l_current, false};
    const double log_u = std::log(rng.uniform());
    return {log_u < l_proposal - l_current, false};
}

std::span<const double> ChainTrace::state_at(std::size_t tau) const {
    if (segments.empty() || tau > iterations) throw std::out_of_range("chain trace: iteration out of range");
    auto it = std::upper_bound(segments.begin(), segments.end(), tau,
                               [](std::size_t t, const ChainSegment& seg) { return t < seg.start; });
    return std::prev(it)->field;
}

ChainTrace run_chain(const SamplerConfig& cfg, const LogLikelihood* likelihood, const GridSpec& spec,
                     const RegionConfig& region_cfg, const RegionMap& regions) {
    cfg.validate();
    if (!cfg.flat_likelihood && likelihood == nullptr) {
        throw std::invalid_argument("run_chain: a likelihood is required unless flat_likelihood is set");
    }
    const FieldMap map(regions, cfg.space, cfg.link);
    const Rng root(cfg.seed);
    Rng prior_rng = root.substream("prior");
    Rng accept_rng = root.substream("proposal");

    std::vector<double> field(map.size(), map.center());
    if (cfg.initial) {
        if (cfg.initial->size() != map.size()) throw std::invalid_argument("run_chain: initial field has wrong length");
        field = *cfg.initial;
    }

    ChainTrace trace;
    trace.iterations = cfg.iterations;
    trace.loglik_trace.reserve(cfg.iterations);

    auto evaluate = [&](std::span<const double> state, std::size_t tau) {
        std::size_t clipped = 0;
        const Potential f = map.potential(state, &clipped);
        if (clipped > 0) ++trace.clipped_proposals;
        if (cfg.flat_likelihood) return 0.0;
        try {
            return (*likelihood)(f);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_chain: iteration " + std::to_string(tau) + ": " + e.what());
        }
    };

    double l_current = evaluate(field, 0);
    trace.clipped_proposals = 0;
    trace.segments.push_back({0, field});

    std::vector<double> xi(map.size());
    for (std::size_t tau = 1; tau <= cfg.iterations; ++tau) {
        const GridFunction draw = draw_prior(cfg.prior, spec, prior_rng, region_cfg);
        for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = draw.at(regions.oo[k]);
        std::vector<double> proposal = pcn_step(field, xi, cfg.step_beta, map.center());

        const double l_proposal = evaluate(proposal, tau);
        const AcceptDecision decision = accept_step(l_current, l_proposal, cfg.rule, accept_rng);
        if (decision.invalid) ++trace.invalid_proposals;
        if (decision.accepted) {
            field = std::move(proposal);
            l_current = l_proposal;
            ++trace.accept_count;
            trace.segments.push_back({tau, field});
            if ((trace.accept_count - 1) % cfg.thinning == 0) trace.accepted.push_back({tau, map.potential(field)});
        }
        trace.loglik_trace.push_back(l_current);
    }
    trace.final_field = field;
    trace.final_state = map.potential(field);
    return trace;
}

std::vector<double> burn_in_field_mean(const ChainTrace& trace) {
    const std::size_t T = trace.iterations;
    const std::size_t half = T / 2;
    if (half == 0 || trace.segments.empty()) throw std::invalid_argument("burn_in_mean: second half of the chain is empty");
    const std::size_t first = half + 1;

    std::vector<double> mean(trace.segments.front().field.size(), 0.0);
    for (std::size_t s = 0; s < trace.segments.size(); ++s) {
        const std::size_t seg_lo = std::max(trace.segments[s].start, first);
        const std::size_t seg_hi = s + 1 < trace.segments.size() ? trace.segments[s + 1].start : T + 1;
        if (seg_hi <= seg_lo) continue;
        const auto run = static_cast<double>(seg_hi - seg_lo);
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += run * trace.segments[s].field[k];
    }
    const auto count = static_cast<double>(T - half);
    for (double& m : mean) m /= count;
    return mean;
}

Potential burn_in_mean(const ChainTrace& trace, const FieldMap& map) { return map.potential(burn_in_field_mean(trace)); }

}  // namespace fraccal
