#include "fraccal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fraccal {

GridSpec::GridSpec(double ell, int M, double s) : ell_(ell), M_(M), K_(0), h_(0.0), s_(s) {
    if (!(ell > 0.0) || !std::isfinite(ell)) {
        throw std::invalid_argument("grid: ell must be positive, got " + std::to_string(ell));
    }
    if (M < 1) {
        throw std::invalid_argument("grid: M must be >= 1, got " + std::to_string(M));
    }
    if (!(s > 0.0 && s < 1.0)) {
        throw std::invalid_argument("grid: s must lie in (0,1), got " + std::to_string(s));
    }
    K_ = 6 * M;
    h_ = 2.0 * ell / static_cast<double>(K_);
}

GridSpec build_grid(double ell, int M, double s) { return GridSpec(ell, M, s); }

void RegionConfig::validate(double ell) const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("regions: " + what); };
    for (const Interval* iv : {&omega, &oo, &d_left, &d_right, &phi_support}) {
        if (!(iv->lo < iv->hi)) fail("empty interval");
        if (iv->lo < -ell || iv->hi > ell) fail("interval leaves the computational domain");
    }
    if (!(oo.lo > omega.lo && oo.hi < omega.hi)) fail("closure of O must lie inside Omega");
    if (!(d_left.hi <= omega.lo && d_right.lo >= omega.hi)) fail("D must be disjoint from Omega");
    if (!(d_left.hi <= d_right.lo)) fail("D components out of order");
    const bool in_left = phi_support.lo >= d_left.lo && phi_support.hi <= d_left.hi;
    const bool in_right = phi_support.lo >= d_right.lo && phi_support.hi <= d_right.hi;
    if (!in_left && !in_right) fail("supp(phi) must lie inside D");
    const double gap = std::max(omega.lo - phi_support.hi, phi_support.lo - omega.hi);
    if (!(gap > 0.0)) fail("supp(phi) must be at positive distance from Omega");
    if (!(phi_amplitude >= 0.0)) fail("phi amplitude must be nonnegative");
}

namespace {

// Strict membership with a rounding guard so nodes sitting on an endpoint
// are excluded regardless of how x_i rounds.
bool strictly_inside(const GridSpec& spec, const Interval& iv, int i) {
    const double tol = 1e-9 * spec.h();
    const double x = spec.x(i);
    return x > iv.lo + tol && x < iv.hi - tol;
}

std::vector<int> nodes_in(const GridSpec& spec, const Interval& iv) {
    std::vector<int> out;
    for (int i = 1; i < spec.K(); ++i) {
        if (strictly_inside(spec, iv, i)) out.push_back(i);
    }
    return out;
}

}  // namespace

bool RegionMap::in_omega(int i) const { return std::binary_search(omega.begin(), omega.end(), i); }

bool RegionMap::in_dd(int i) const { return std::binary_search(dd.begin(), dd.end(), i); }

RegionMap classify_regions(const GridSpec& spec, const RegionConfig& cfg) {
    RegionMap map;
    map.omega = nodes_in(spec, cfg.omega);
    map.oo = nodes_in(spec, cfg.oo);
    map.dd_left = nodes_in(spec, cfg.d_left);
    map.dd_right = nodes_in(spec, cfg.d_right);
    map.dd = map.dd_left;
    map.dd.insert(map.dd.end(), map.dd_right.begin(), map.dd_right.end());
    map.supp_phi = nodes_in(spec, cfg.phi_support);
    return map;
}

GridFunction::GridFunction(const GridSpec& spec) : spec_(spec), values_(spec.interior_size(), 0.0) {}

GridFunction::GridFunction(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.interior_size()) {
        throw std::invalid_argument("grid function: expected " + std::to_string(spec_.interior_size()) +
                                    " values, got " + std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("grid function: non-finite value");
    }
}

double phi_value(double x, const RegionConfig& cfg) {
    const Interval& supp = cfg.phi_support;
    if (!supp.contains(x)) return 0.0;
    const double c = 0.5 * (supp.lo + supp.hi);
    const double r = 0.5 * supp.length();
    const double q = (x - c) * (x - c) - r * r;
    if (q >= 0.0) return 0.0;
    return cfg.phi_amplitude * std::exp(1.0 / q);
}

GridFunction sample_phi(const GridSpec& spec, const RegionConfig& cfg) {
    GridFunction phi(spec);
    for (int i = 1; i < spec.K(); ++i) phi.at(i) = phi_value(spec.x(i), cfg);
    return phi;
}

double l2_norm_h(const GridSpec& spec, std::span<const double> values) {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return std::sqrt(spec.h() * acc);
}

}  // namespace fraccal
