#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraccal/config.hpp"
#include "fraccal/fractional_operator.hpp"

namespace fraccal {

// Deliberate operator corruption used to check that the suites bite.
enum class Fault { none, flip_a1 };

Fault parse_fault(const std::string& name);

FracOperator make_operator(const GridSpec& spec, Fault fault);

struct SuiteResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct VerifyOptions {
    Fault fault = Fault::none;
    std::uint64_t seed = 20240601;
};

// The grid, regions and datum come from cfg; refinement suites use their
// own fixed resolutions.
SuiteResult check_symmetry(const RunConfig& cfg, const VerifyOptions& opt);
// 200 random potentials, each solved with the configured datum, a random
// nonnegative exterior datum and ones on the two nodes next to Omega;
// 0 <= u <= max(datum) on Omega every time.
SuiteResult check_maximum_principle(const RunConfig& cfg, const VerifyOptions& opt, int trials = 200);
// Max over random pairs of |G(f1) - G(f2)|_{L2(D)} / |f1 - f2|_{L2(Omega)},
// compared between two resolutions. With gap > 0 only D nodes at distance
// >= gap from Omega enter the numerator. The configured D touches Omega,
// where G(f) is singular, so the gap = 0 ratio grows like sqrt(log 1/h).
SuiteResult check_forward_lipschitz(const RunConfig& cfg, const VerifyOptions& opt, double gap = 0.0,
                                    int coarse_M = 25, int fine_M = 100, int pairs = 200);
// |G(f)| on D nodes at distance >= 1/2 from Omega stays below the kernel
// bound for random potentials.
SuiteResult check_uniform_bound(const RunConfig& cfg, const VerifyOptions& opt, int trials = 200);
SuiteResult check_alessandrini(const RunConfig& cfg, const VerifyOptions& opt, int triples = 50);
// A applied to (1 - x^2)_+^s against its closed form on |x| <= 1/2.
SuiteResult check_getoor(const RunConfig& cfg, const VerifyOptions& opt, int coarse_M = 50, int fine_M = 200);
SuiteResult check_dense_oracle(const RunConfig& cfg, const VerifyOptions& opt, int vectors = 50);
// Discrete (A phi) at the 10 D nodes nearest x = 2 against adaptive quadrature.
SuiteResult check_quadrature(const RunConfig& cfg, const VerifyOptions& opt, int coarse_M = 50, int fine_M = 100);

std::vector<SuiteResult> verify(const RunConfig& cfg, const VerifyOptions& opt = {});

std::string format_report(const std::vector<SuiteResult>& results);

// Closed form of (-Delta)^s (1 - x^2)_+^s for |x| < 1 in one dimension.
double getoor_value(double s);

}  // namespace fraccal
