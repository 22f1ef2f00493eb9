#include "fraccal/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fraccal {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw std::invalid_argument("config: " + key + " = '" + value + "' is not " + expected);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a finite number");
    return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer in range");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v, "a boolean");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> items;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (k) out += ", ";
        out += fmt(xs[k]);
    }
    return out;
}

struct Field {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

Field real(double RunConfig::*member) {
    return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_double(k, v); },
            [member](const RunConfig& c) { return format_double(c.*member); }};
}

template <class Get>
Field real_at(Get access) {
    return {[access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = to_double(k, v); },
            [access](const RunConfig& c) { return format_double(access(c)); }};
}

template <class Int, class Get>
Field integer_at(Get access) {
    return {[access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = to_int<Int>(k, v); },
            [access](const RunConfig& c) { return std::to_string(access(c)); }};
}

template <class Get>
Field boolean_at(Get access) {
    return {[access](RunConfig& c, const std::string& k, const std::string& v) { access(c) = to_bool(k, v); },
            [access](const RunConfig& c) { return std::string(access(c) ? "true" : "false"); }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["grid.ell"] = real(&RunConfig::ell);
        t["grid.M"] = integer_at<int>([](auto& c) -> auto& { return c.M; });
        t["grid.s"] = real(&RunConfig::s);

        t["regions.omega_lo"] = real_at([](auto& c) -> auto& { return c.regions.omega.lo; });
        t["regions.omega_hi"] = real_at([](auto& c) -> auto& { return c.regions.omega.hi; });
        t["regions.o_lo"] = real_at([](auto& c) -> auto& { return c.regions.oo.lo; });
        t["regions.o_hi"] = real_at([](auto& c) -> auto& { return c.regions.oo.hi; });
        t["regions.d_left_lo"] = real_at([](auto& c) -> auto& { return c.regions.d_left.lo; });
        t["regions.d_left_hi"] = real_at([](auto& c) -> auto& { return c.regions.d_left.hi; });
        t["regions.d_right_lo"] = real_at([](auto& c) -> auto& { return c.regions.d_right.lo; });
        t["regions.d_right_hi"] = real_at([](auto& c) -> auto& { return c.regions.d_right.hi; });
        t["phi.support_lo"] = real_at([](auto& c) -> auto& { return c.regions.phi_support.lo; });
        t["phi.support_hi"] = real_at([](auto& c) -> auto& { return c.regions.phi_support.hi; });
        t["phi.amplitude"] = real_at([](auto& c) -> auto& { return c.regions.phi_amplitude; });

        t["truth.preset"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.truth.preset = v; },
                             [](const RunConfig& c) { return c.truth.preset; }};
        t["truth.cells"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                c.truth.cells.clear();
                                for (const auto& item : split_list(v)) c.truth.cells.push_back(to_double(k, item));
                            },
                            [](const RunConfig& c) { return join(c.truth.cells, format_double); }};

        t["observation.n"] = integer_at<std::size_t>([](auto& c) -> auto& { return c.n; });
        t["observation.sigma"] = real(&RunConfig::sigma);
        t["observation.seed"] = integer_at<std::uint64_t>([](auto& c) -> auto& { return c.data_seed; });

        t["prior.family"] = {[](RunConfig& c, const std::string&, const std::string& v) {
                                 c.sampler.prior.family = parse_prior_family(v);
                             },
                             [](const RunConfig& c) { return to_string(c.sampler.prior.family); }};
        t["prior.j0"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                             c.auto_level = v == "auto";
                             if (!c.auto_level) c.sampler.prior.j0 = to_int<int>(k, v);
                         },
                         [](const RunConfig& c) {
                             return c.auto_level ? std::string("auto") : std::to_string(c.sampler.prior.j0);
                         }};
        t["prior.t"] = real_at([](auto& c) -> auto& { return c.sampler.prior.t; });
        t["prior.alpha"] = real_at([](auto& c) -> auto& { return c.sampler.prior.alpha; });
        t["prior.rescale"] = boolean_at([](auto& c) -> auto& { return c.rescale; });
        t["prior.half_cell"] = boolean_at([](auto& c) -> auto& { return c.sampler.prior.half_cell; });
        t["prior.core_lo"] = real_at([](auto& c) -> auto& { return c.sampler.prior.haar_core.lo; });
        t["prior.core_hi"] = real_at([](auto& c) -> auto& { return c.sampler.prior.haar_core.hi; });

        t["sampler.beta"] = real_at([](auto& c) -> auto& { return c.sampler.step_beta; });
        t["sampler.iterations"] =
            integer_at<std::size_t>([](auto& c) -> auto& { return c.sampler.iterations; });
        t["sampler.rule"] = {[](RunConfig& c, const std::string&, const std::string& v) {
                                 c.sampler.rule = parse_accept_rule(v);
                             },
                             [](const RunConfig& c) { return to_string(c.sampler.rule); }};
        t["sampler.thinning"] =
            integer_at<std::size_t>([](auto& c) -> auto& { return c.sampler.thinning; });
        t["sampler.seed"] = integer_at<std::uint64_t>([](auto& c) -> auto& { return c.sampler.seed; });
        t["sampler.space"] = {[](RunConfig& c, const std::string&, const std::string& v) {
                                  c.sampler.space = parse_chain_space(v);
                              },
                              [](const RunConfig& c) { return to_string(c.sampler.space); }};
        t["sampler.link_m0"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                    c.sampler.link = LinkFunction(to_double(k, v), c.sampler.link.steepness());
                                },
                                [](const RunConfig& c) { return format_double(c.sampler.link.m0()); }};
        t["sampler.link_k"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                   c.sampler.link = LinkFunction(c.sampler.link.m0(), to_double(k, v));
                               },
                               [](const RunConfig& c) { return format_double(c.sampler.link.steepness()); }};
        t["sampler.flat"] = boolean_at([](auto& c) -> auto& { return c.sampler.flat_likelihood; });

        t["rate.n_values"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                  c.rate_n.clear();
                                  for (const auto& item : split_list(v)) c.rate_n.push_back(to_int<std::size_t>(k, item));
                              },
                              [](const RunConfig& c) {
                                  return join(c.rate_n, [](std::size_t x) { return std::to_string(x); });
                              }};
        t["rate.seeds"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                               c.rate_seeds.clear();
                               for (const auto& item : split_list(v)) {
                                   c.rate_seeds.push_back(to_int<std::uint64_t>(k, item));
                               }
                           },
                           [](const RunConfig& c) {
                               return join(c.rate_seeds, [](std::uint64_t x) { return std::to_string(x); });
                           }};
        t["rate.threads"] = integer_at<unsigned>([](auto& c) -> auto& { return c.threads; });

        t["output.dir"] = {[](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
                           [](const RunConfig& c) { return c.out_dir.string(); }};
        return t;
    }();
    return table;
}

}  // namespace

void RunConfig::validate() const {
    const GridSpec spec = build_grid(ell, M, s);
    regions.validate(ell);
    const RegionMap map = classify_regions(spec, regions);
    if (map.oo.empty()) throw std::invalid_argument("config: grid too coarse, O contains no node");
    if (map.dd_left.size() < 2 || map.dd_right.size() < 2) {
        throw std::invalid_argument("config: grid too coarse, each part of D needs two nodes");
    }
    static const std::vector<std::string> presets{"bump", "step", "paper-like", "custom"};
    if (std::find(presets.begin(), presets.end(), truth.preset) == presets.end()) {
        throw std::invalid_argument("config: unknown truth preset '" + truth.preset + "'");
    }
    if (truth.preset == "custom") {
        if (truth.cells.empty()) throw std::invalid_argument("config: custom truth needs truth.cells");
        for (double v : truth.cells) {
            if (!(v >= 0.0)) throw std::invalid_argument("config: truth.cells must be nonnegative");
            if (sampler.space == ChainSpace::link && !(v > 0.0 && v < sampler.link.m0())) {
                throw std::invalid_argument("config: truth must lie in (0, link_m0) in link space");
            }
        }
    }
    if (n == 0) throw std::invalid_argument("config: observation.n must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("config: observation.sigma must be positive");
    if (rate_n.size() < 3) throw std::invalid_argument("config: rate.n_values needs at least 3 values");
    for (std::size_t k = 1; k < rate_n.size(); ++k) {
        if (rate_n[k] <= rate_n[k - 1]) throw std::invalid_argument("config: rate.n_values must increase strictly");
    }
    if (rate_n.front() < 2) throw std::invalid_argument("config: rate.n_values must be >= 2");
    std::vector<std::uint64_t> seeds = rate_seeds;
    std::sort(seeds.begin(), seeds.end());
    if (seeds.size() < 3 || std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end()) {
        throw std::invalid_argument("config: rate.seeds needs at least 3 distinct seeds");
    }
    resolved_sampler().validate();
}

SamplerConfig RunConfig::resolved_sampler() const {
    SamplerConfig out = sampler;
    if (auto_level) out.prior.j0 = sieve_level(n, out.prior.alpha);
    out.prior.rescale_n = rescale ? std::optional<std::size_t>(n) : std::nullopt;
    return out;
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
    KeyValues kv;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = source + ":" + std::to_string(number);
        if (eq == std::string::npos) throw std::invalid_argument(where + ": expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw std::invalid_argument(where + ": empty key");
        if (!kv.emplace(key, value).second) throw std::invalid_argument(where + ": duplicate key '" + key + "'");
    }
    return kv;
}

void apply_config(RunConfig& cfg, const KeyValues& kv) {
    const auto& table = fields();
    for (const auto& [key, value] : kv) {
        const auto it = table.find(key);
        if (it == table.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
        it->second.set(cfg, key, value);
    }
}

std::vector<std::string> preset_names() { return {"smoke", "desk", "paper", "rate", "verify"}; }

RunConfig preset_config(const std::string& name) {
    // Desk scale: Haar sieve at j(N) with the rescaled prior.
    RunConfig cfg;
    cfg.M = 20;
    cfg.n = 100;
    cfg.sigma = 0.001;
    cfg.sampler.step_beta = 0.1;
    cfg.sampler.iterations = 200000;
    cfg.sampler.rule = AcceptRule::greedy;
    cfg.sampler.seed = 1;
    cfg.sampler.prior.family = PriorFamily::haar;
    cfg.sampler.prior.alpha = 3.0;
    cfg.sampler.prior.t = 1.0;
    cfg.auto_level = true;
    cfg.rescale = true;
    if (name == "desk" || name == "rate") return cfg;
    if (name == "smoke") {
        cfg.M = 10;
        cfg.n = 20;
        cfg.sampler.iterations = 1000;
        cfg.rate_n = {10, 20, 40};
        cfg.rate_seeds = {1, 2, 3};
        return cfg;
    }
    if (name == "verify") {
        cfg.M = 50;
        return cfg;
    }
    if (name == "paper") {
        cfg.M = 50;
        cfg.n = 150;
        cfg.truth.preset = "paper-like";
        cfg.sampler.iterations = 5000000;
        cfg.sampler.prior.family = PriorFamily::piecewise;
        cfg.sampler.prior.j0 = 3;
        cfg.auto_level = false;
        cfg.rescale = false;
        cfg.sampler.thinning = 100;
        return cfg;
    }
    throw std::invalid_argument("config: unknown preset '" + name + "'");
}

RunConfig load_config(const std::optional<std::filesystem::path>& path, const std::string& preset) {
    RunConfig cfg = preset_config(preset);
    if (path) {
        std::ifstream in(*path);
        if (!in) throw std::invalid_argument("config: cannot open " + path->string());
        apply_config(cfg, parse_key_values(in, path->string()));
    }
    cfg.validate();
    return cfg;
}

std::string render_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, field] : fields()) out += key + " = " + field.get(cfg) + "\n";
    return out;
}

}  // namespace fraccal
