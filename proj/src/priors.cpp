#include "fraccal/priors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fraccal {

PriorFamily parse_prior_family(const std::string& name) {
    if (name == "piecewise") return PriorFamily::piecewise;
    if (name == "haar") return PriorFamily::haar;
    throw std::invalid_argument("prior: unknown family '" + name + "'");
}

std::string to_string(PriorFamily family) { return family == PriorFamily::piecewise ? "piecewise" : "haar"; }

void SievePriorConfig::validate() const {
    const int min_level = family == PriorFamily::haar ? -1 : 0;
    if (j0 < min_level || j0 > 20) throw std::invalid_argument("prior: resolution level out of range");
    if (!(t > 0.5)) throw std::invalid_argument("prior: t must exceed 1/2");
    if (!(alpha > 0.0)) throw std::invalid_argument("prior: alpha must be positive");
    if (rescale_n && *rescale_n == 0) throw std::invalid_argument("prior: rescale N must be >= 1");
    if (!(haar_core.lo < haar_core.hi)) throw std::invalid_argument("prior: empty haar core set");
}

std::size_t piecewise_cell_count(int j0) { return std::size_t{1} << (j0 + 1); }

int piecewise_cell(double x, const Interval& domain, int j0, bool half_cell) {
    if (!domain.contains(x)) return -1;
    const auto cells = static_cast<double>(piecewise_cell_count(j0));
    const double pos = (x - domain.lo) / domain.length() * cells;
    const double cell = std::floor(pos);
    if (half_cell && pos - cell >= 0.5) return -1;
    return static_cast<int>(std::min(cell, cells - 1.0));
}

GridFunction draw_piecewise(const SievePriorConfig& cfg, const GridSpec& spec, Rng& rng, const Interval& domain) {
    if (cfg.family != PriorFamily::piecewise) throw std::invalid_argument("draw_piecewise: family is not piecewise");
    std::vector<double> cell_values(piecewise_cell_count(cfg.j0));
    for (auto& c : cell_values) c = rng.normal();
    GridFunction out(spec);
    for (int i = 1; i < spec.K(); ++i) {
        const int cell = piecewise_cell(spec.x(i), domain, cfg.j0, cfg.half_cell);
        if (cell >= 0) out.at(i) = cell_values[static_cast<std::size_t>(cell)];
    }
    return out;
}

double cutoff(double x, const Interval& oo) {
    if (!oo.contains(x)) return 0.0;
    const double c = 0.5 * (oo.lo + oo.hi);
    const double r = 0.5 * oo.length();
    const double z = (x - c) / r;
    const double w = 1.0 - z * z;
    return w * w * w;
}

namespace {

struct HaarTerm {
    int level;  // -1 for the scaling function
    double lo;
    double hi;
    double weight;
};

}  // namespace

GridFunction draw_haar_sieve(const SievePriorConfig& cfg, const GridSpec& spec, Rng& rng, const Interval& domain,
                             const Interval& oo) {
    if (cfg.family != PriorFamily::haar) throw std::invalid_argument("draw_haar_sieve: family is not haar");
    const double len = domain.length();

    std::vector<HaarTerm> terms;
    terms.push_back({-1, domain.lo, domain.hi, 1.0});
    for (int level = 0; level <= cfg.j0; ++level) {
        const int count = 1 << level;
        const double width = len / count;
        const double weight = std::pow(2.0, -level * cfg.t);
        for (int r = 0; r < count; ++r) {
            const double lo = domain.lo + r * width;
            const double hi = lo + width;
            if (hi > cfg.haar_core.lo && lo < cfg.haar_core.hi) terms.push_back({level, lo, hi, weight});
        }
    }
    std::vector<double> coeff(terms.size());
    for (auto& c : coeff) c = rng.normal();

    GridFunction out(spec);
    for (int i = 1; i < spec.K(); ++i) {
        const double x = spec.x(i);
        const double chi = cutoff(x, oo);
        if (chi == 0.0) continue;
        double acc = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const HaarTerm& term = terms[k];
            if (x < term.lo || x >= term.hi) continue;
            double basis = 1.0 / std::sqrt(len);
            if (term.level >= 0) {
                basis = std::sqrt(static_cast<double>(1 << term.level) / len);
                if (x >= 0.5 * (term.lo + term.hi)) basis = -basis;
            }
            acc += term.weight * coeff[k] * basis;
        }
        out.at(i) = chi * acc;
    }
    return out;
}

double rescale_factor(std::size_t n, double alpha) {
    if (n == 0) throw std::invalid_argument("rescale: n must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("rescale: alpha must be positive");
    return std::pow(static_cast<double>(n), -1.0 / (4.0 * alpha + 6.0));
}

GridFunction rescale_draw(const GridFunction& F, std::size_t n, double alpha) {
    const double factor = rescale_factor(n, alpha);
    GridFunction out = F;
    for (double& v : out.values()) v *= factor;
    return out;
}

int sieve_level(std::size_t n, double alpha) {
    if (n == 0) throw std::invalid_argument("sieve_level: n must be >= 1");
    return static_cast<int>(std::lround(std::log2(static_cast<double>(n)) / (2.0 * alpha + 1.0)));
}

GridFunction draw_prior(const SievePriorConfig& cfg, const GridSpec& spec, Rng& rng, const RegionConfig& regions) {
    GridFunction draw = cfg.family == PriorFamily::piecewise
                            ? draw_piecewise(cfg, spec, rng, regions.omega)
                            : draw_haar_sieve(cfg, spec, rng, regions.omega, regions.oo);
    if (cfg.rescale_n) return rescale_draw(draw, *cfg.rescale_n, cfg.alpha);
    return draw;
}

}  // namespace fraccal
