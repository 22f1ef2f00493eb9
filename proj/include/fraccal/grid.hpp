#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fraccal {

// Open interval (lo, hi) on the real line.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x > lo && x < hi; }
};

/**
 * Uniform mesh on (-ell, ell) with K = 6M cells and nodes x_i = -ell + i*h,
 * 0 <= i <= K. Unknowns live on the interior nodes 1..K-1.
 */
class GridSpec {
public:
    GridSpec(double ell, int M, double s);

    double ell() const { return ell_; }
    int M() const { return M_; }
    int K() const { return K_; }
    double h() const { return h_; }
    double s() const { return s_; }

    // Number of interior nodes, K - 1.
    std::size_t interior_size() const { return static_cast<std::size_t>(K_ - 1); }

    double x(int i) const { return -ell_ + static_cast<double>(i) * h_; }

    bool operator==(const GridSpec&) const = default;

private:
    double ell_;
    int M_;
    int K_;
    double h_;
    double s_;
};

GridSpec build_grid(double ell, int M, double s);

// Geometry of the experiment. Defaults are Omega = (-1,1), O = (-1/2,1/2),
// D = (-3,-1) u (1,3) and supp(phi) = (-3,-2).
struct RegionConfig {
    Interval omega{-1.0, 1.0};
    Interval oo{-0.5, 0.5};
    Interval d_left{-3.0, -1.0};
    Interval d_right{1.0, 3.0};
    Interval phi_support{-3.0, -2.0};
    double phi_amplitude = 10000.0;

    // Throws std::invalid_argument when the geometry is inconsistent
    // (O not inside Omega, D touching Omega, supp(phi) outside D, ...).
    void validate(double ell) const;
};

// Node index sets, all in grid numbering (1..K-1) and sorted ascending.
struct RegionMap {
    std::vector<int> omega;
    std::vector<int> dd;
    std::vector<int> oo;
    std::vector<int> supp_phi;

    // D nodes split by component; each is a contiguous run.
    std::vector<int> dd_left;
    std::vector<int> dd_right;

    bool in_omega(int i) const;
    bool in_dd(int i) const;
};

RegionMap classify_regions(const GridSpec& spec, const RegionConfig& cfg = {});

// Values on the interior nodes 1..K-1 (index i lives at values[i-1]).
class GridFunction {
public:
    explicit GridFunction(const GridSpec& spec);
    GridFunction(const GridSpec& spec, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return values_.size(); }

    double& at(int node) { return values_[static_cast<std::size_t>(node - 1)]; }
    double at(int node) const { return values_[static_cast<std::size_t>(node - 1)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

private:
    GridSpec spec_;
    std::vector<double> values_;
};

// Smooth bump amplitude * exp(1/((x-c)^2 - r^2)) on the support interval,
// zero elsewhere (including the endpoints).
double phi_value(double x, const RegionConfig& cfg = {});

GridFunction sample_phi(const GridSpec& spec, const RegionConfig& cfg = {});

// h-weighted discrete L2 norm over the listed nodes.
double l2_norm_h(const GridSpec& spec, std::span<const double> values);

}  // namespace fraccal
