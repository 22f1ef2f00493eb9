#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraccal/forward_model.hpp"
#include "fraccal/observation.hpp"
#include "fraccal/priors.hpp"
#include "fraccal/rng.hpp"

namespace fraccal {

enum class AcceptRule { greedy, pcn };

AcceptRule parse_accept_rule(const std::string& name);
std::string to_string(AcceptRule rule);

// Parameter space the chain moves in: the potential itself (clipped at zero
// before each solve), or F with f = Phi(F).
enum class ChainSpace { potential, link };

ChainSpace parse_chain_space(const std::string& name);
std::string to_string(ChainSpace space);

struct SamplerConfig {
    double step_beta = 0.1;
    std::size_t iterations = 1000;
    AcceptRule rule = AcceptRule::greedy;
    std::size_t thinning = 1;
    std::uint64_t seed = 0;
    SievePriorConfig prior;
    ChainSpace space = ChainSpace::potential;
    LinkFunction link;
    // Ignore the data (log-likelihood identically zero).
    bool flat_likelihood = false;
    // Starting field on the O nodes; defaults to the background.
    std::optional<std::vector<double>> initial;

    void validate() const;
};

/**
 * Translates the chain state (one value per O node) into a potential on
 * Omega. In potential space the O entries are max(value, 0); in link space
 * they are Phi(value). Omega \ O stays at 1.
 */
class FieldMap {
public:
    FieldMap(const RegionMap& regions, ChainSpace space, LinkFunction link);

    Potential potential(std::span<const double> field, std::size_t* clipped = nullptr) const;
    // Value of the state that maps to f == 1.
    double center() const { return space_ == ChainSpace::potential ? 1.0 : 0.0; }
    std::size_t size() const { return o_positions_.size(); }
    ChainSpace space() const { return space_; }

private:
    std::vector<std::size_t> o_positions_;
    std::size_t omega_size_;
    ChainSpace space_;
    LinkFunction link_;
};

// 1 + sqrt(1 - beta^2) (f - 1) + beta * draw on the O nodes, 1 on the rest of
// Omega, negative results clipped to 0.
Potential pcn_propose(const Potential& current, const GridFunction& draw, double step_beta, const RegionMap& regions);

// c + sqrt(1 - beta^2) (x - c) + beta * xi, elementwise; no clipping.
std::vector<double> pcn_step(std::span<const double> current, std::span<const double> xi, double step_beta,
                             double center);

struct AcceptDecision {
    bool accepted = false;
    // A NaN log-likelihood forced a rejection.
    bool invalid = false;
};

// greedy: accept iff proposal > current. pcn: accept with probability
// min(1, exp(proposal - current)), consuming one uniform from rng.
AcceptDecision accept_step(double l_current, double l_proposal, AcceptRule rule, Rng& rng);

// Chain state held from iteration `start` until the next segment begins.
struct ChainSegment {
    std::size_t start = 0;
    std::vector<double> field;
};

struct ChainSnapshot {
    std::size_t iteration = 0;
    Potential potential;
};

struct ChainTrace {
    std::size_t iterations = 0;
    // Run-length record of every state f^(0..T): a new segment per acceptance.
    std::vector<ChainSegment> segments;
    // Accepted states, every `thinning`-th one.
    std::vector<ChainSnapshot> accepted;
    // log-likelihood of the current state after each iteration 1..T.
    std::vector<double> loglik_trace;
    std::size_t accept_count = 0;
    std::size_t clipped_proposals = 0;
    std::size_t invalid_proposals = 0;
    Potential final_state{std::vector<double>{}};
    std::vector<double> final_field;

    // State at iteration tau (0 <= tau <= T).
    std::span<const double> state_at(std::size_t tau) const;
};

ChainTrace run_chain(const SamplerConfig& cfg, const LogLikelihood* likelihood, const GridSpec& spec,
                     const RegionConfig& region_cfg, const RegionMap& regions);

// Mean of the chain state over iterations floor(T/2)+1 .. T, counting
// repeated states from rejections. Throws for T < 2.
std::vector<double> burn_in_field_mean(const ChainTrace& trace);

// burn_in_field_mean mapped to a potential through `map`.
Potential burn_in_mean(const ChainTrace& trace, const FieldMap& map);

}  // namespace fraccal
