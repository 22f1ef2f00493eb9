#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "fraccal/grid.hpp"
#include "fraccal/rng.hpp"

namespace fraccal {

enum class PriorFamily { piecewise, haar };

PriorFamily parse_prior_family(const std::string& name);
std::string to_string(PriorFamily family);

struct SievePriorConfig {
    PriorFamily family = PriorFamily::piecewise;
    // Resolution J0 (piecewise) or truncation level j (haar, j >= -1).
    int j0 = 3;
    // Level weights 2^{-l t}; must exceed 1/2.
    double t = 1.0;
    // Smoothness used by the N-dependent rescaling.
    double alpha = 2.0;
    // When set, draws are multiplied by N^{-1/(4 alpha + 6)}.
    std::optional<std::size_t> rescale_n;
    // Piecewise family only: literal reading chi_(0,1)(2(2^J0 x - r)), which
    // covers the left half of every cell and leaves the rest at zero.
    bool half_cell = false;
    // Haar family only: compact set whose intersecting wavelets are kept.
    Interval haar_core{-0.25, 0.25};

    void validate() const;
};

// Number of cells 2^{J0+1} of the piecewise basis.
std::size_t piecewise_cell_count(int j0);

// Cell index of x in (lo, hi) split into 2^{J0+1} half-open cells, or -1 when x
// falls outside the domain (or in an uncovered half-cell).
int piecewise_cell(double x, const Interval& domain, int j0, bool half_cell);

// Piecewise-constant draw on `domain` (Omega by default) with iid N(0,1) cell
// values, sampled on the interior grid nodes; zero off the domain.
GridFunction draw_piecewise(const SievePriorConfig& cfg, const GridSpec& spec, Rng& rng,
                            const Interval& domain = Interval{-1.0, 1.0});

// Polynomial cutoff (1 - ((x - c)/r)^2)^3 on O = (c - r, c + r).
double cutoff(double x, const Interval& oo);

// chi * sum_{l <= j, r} w_l F_lr Psi_lr with the L2-orthonormal Haar system on
// `domain`; w_{-1} = 1 and w_l = 2^{-l t} for l >= 0. Zero off O.
GridFunction draw_haar_sieve(const SievePriorConfig& cfg, const GridSpec& spec, Rng& rng,
                             const Interval& domain = Interval{-1.0, 1.0},
                             const Interval& oo = Interval{-0.5, 0.5});

// Multiplies by n^{-1/(4 alpha + 6)}, the d = 1 rescaling factor.
GridFunction rescale_draw(const GridFunction& F, std::size_t n, double alpha);
double rescale_factor(std::size_t n, double alpha);

// Truncation level j(N) = round(log2(N) / (2 alpha + 1)), so 2^j ~ N^{1/(2 alpha + 1)}.
int sieve_level(std::size_t n, double alpha);

// Draw from the configured family, rescaled when cfg.rescale_n is set.
GridFunction draw_prior(const SievePriorConfig& cfg, const GridSpec& spec, Rng& rng, const RegionConfig& regions = {});

}  // namespace fraccal
