#include "kernelid/spec_json.hpp"

#include "kernelid/algebra.hpp"
#include "kernelid/error.hpp"
#include "kernelid/signal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kernelid {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
    throw SpecParseError("field '" + field + "': " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) parse_fail(path + key, "missing");
    return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& path) {
    const json& v = member(obj, key, path);
    if (!v.is_number()) parse_fail(path + key, "expected a number");
    return v.get<double>();
}

std::vector<double> number_array(const json& obj, const std::string& key, const std::string& path) {
    const json& v = member(obj, key, path);
    if (!v.is_array()) parse_fail(path + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) parse_fail(path + key, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Eigen::MatrixXd matrix(const json& obj, const std::string& key, const std::string& path) {
    const json& v = member(obj, key, path);
    if (!v.is_array() || v.empty()) parse_fail(path + key, "expected a nonempty row-major nested array");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    for (const auto& row : v) {
        if (!row.is_array()) parse_fail(path + key, "expected a nonempty row-major nested array");
        if (cols == 0) cols = row.size();
        if (row.size() != cols || cols == 0) parse_fail(path + key, "rows of unequal length");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!v[i][j].is_number()) parse_fail(path + key, "entries must be numbers");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
        }
    }
    return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

TimeDomain domain_of(const json& spec, const std::string& path, std::optional<TimeDomain> fallback = std::nullopt) {
    if (!spec.contains("domain")) {
        if (fallback) return *fallback;
        parse_fail(path + "domain", "missing");
    }
    const json& d = spec.at("domain");
    if (!d.is_string()) parse_fail(path + "domain", "expected \"discrete\" or \"continuous\"");
    try {
        return time_domain_from_string(d.get<std::string>());
    } catch (const Error&) {
        parse_fail(path + "domain", "expected \"discrete\" or \"continuous\"");
    }
}

Signal signal_field(const json& params, const std::string& key, const std::string& path) {
    const json& doc = member(params, key, path);
    try {
        return Signal::from_json(doc);
    } catch (const SpecParseError& e) {
        parse_fail(path + key, e.what());
    }
}

double affine_field(const json& obj, const std::string& key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    return number(obj, key, path);
}

Kernel build(const json& spec, const std::string& path);

Kernel build_atomic(const std::string& family, const json& spec, const std::string& path) {
    static const json empty = json::object();
    const json& params = spec.contains("params") ? spec.at("params") : empty;
    if (!params.is_object()) parse_fail(path + "params", "expected an object");
    const std::string pp = path + "params.";

    using zoo::ClassicFamily;
    const std::pair<const char*, ClassicFamily> classics[] = {
        {"DI", ClassicFamily::DI},   {"DC", ClassicFamily::DC},   {"TC", ClassicFamily::TC}, {"SS", ClassicFamily::SS},
        {"iTC", ClassicFamily::iTC}, {"iSS", ClassicFamily::iSS}, {"iTS", ClassicFamily::iTS}};
    for (const auto& [name, fam] : classics) {
        if (family != name) continue;
        zoo::ClassicParams p;
        p.alpha = number(params, "alpha", pp);
        if (fam == ClassicFamily::DC) p.gamma = number(params, "gamma", pp);
        if (fam == ClassicFamily::iTC || fam == ClassicFamily::iSS || fam == ClassicFamily::iTS) {
            p.beta = number(params, "beta", pp);
        }
        return zoo::make_classic(fam, p, domain_of(spec, path));
    }
    if (family == "RnE") {
        return zoo::make_rank_n_exponential(number_array(params, "lambda", pp), number_array(params, "alpha", pp),
                                            domain_of(spec, path));
    }
    if (family == "SSn") {
        if (domain_of(spec, path, TimeDomain::Continuous) != TimeDomain::Continuous) {
            parse_fail(path + "domain", "SSn is defined on the continuous domain only");
        }
        const double n = number(params, "n", pp);
        if (n != std::floor(n)) parse_fail(pp + "n", "expected an integer");
        return zoo::make_stable_spline_n(static_cast<int>(n), number(params, "beta", pp));
    }
    if (family == "Kv") return zoo::make_kv(signal_field(params, "v", pp), domain_of(spec, path));
    if (family == "AMLS") {
        Kernel base = build(member(params, "base", pp), pp + "base.");
        return zoo::make_amls(base, signal_field(params, "v", pp));
    }
    if (family == "SI") {
        zoo::SimulationInducedOptions options;
        if (params.contains("memo_horizon")) {
            options.memo_horizon = static_cast<std::size_t>(number(params, "memo_horizon", pp));
        }
        return zoo::make_simulation_induced(realization_from_json(params), domain_of(spec, path), options);
    }
    if (family == "CounterexDiscrete") return zoo::make_counterexample(TimeDomain::Discrete);
    if (family == "CounterexContinuous") return zoo::make_counterexample(TimeDomain::Continuous);
    if (family == "Custom") {
        const json& kind = member(params, "kind", pp);
        if (!kind.is_string()) parse_fail(pp + "kind", "expected a string");
        const std::string k = kind.get<std::string>();
        const TimeDomain domain = domain_of(spec, path);
        if (k == "zero") return zoo::make_zero(domain);
        if (k == "constant") return zoo::make_constant(number(params, "value", pp), domain);
        if (k == "exponential") return zoo::make_exponential_stationary(number(params, "gamma", pp), domain);
        if (k == "gaussian") return zoo::make_gaussian_stationary(number(params, "length_scale", pp), domain);
        throw UnknownFamily("custom kind '" + k + "' at " + pp + "kind");
    }
    throw UnknownFamily("'" + family + "' at " + path + "family");
}

Kernel build(const json& spec, const std::string& path) {
    if (!spec.is_object()) parse_fail(path.empty() ? "<root>" : path, "kernel spec must be an object");
    const json& fam = member(spec, "family", path);
    if (!fam.is_string()) parse_fail(path + "family", "expected a string");
    const std::string family = fam.get<std::string>();

    if (family == "sum" || family == "product") {
        const json& terms = member(spec, "terms", path);
        if (!terms.is_array() || terms.empty()) parse_fail(path + "terms", "expected a nonempty array");
        std::vector<Kernel> kernels;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            kernels.push_back(build(terms[i], path + "terms[" + std::to_string(i) + "]."));
        }
        if (family == "product") {
            Kernel out = kernels[0];
            for (std::size_t i = 1; i < kernels.size(); ++i) out = combine_product(out, kernels[i]);
            return out;
        }
        std::vector<double> coeffs(kernels.size(), 1.0);
        if (spec.contains("coefficients")) {
            coeffs = number_array(spec, "coefficients", path);
            if (coeffs.size() != kernels.size()) parse_fail(path + "coefficients", "length must match terms");
        }
        Kernel out = kernels[0];
        if (kernels.size() == 1) return combine_linear(out, out, coeffs[0], 0.0);
        out = combine_linear(kernels[0], kernels[1], coeffs[0], coeffs[1]);
        for (std::size_t i = 2; i < kernels.size(); ++i) out = combine_linear(out, kernels[i], 1.0, coeffs[i]);
        return out;
    }
    if (family == "sampled") {
        Kernel inner = build(member(spec, "kernel", path), path + "kernel.");
        const json& sigma = member(spec, "sigma", path);
        const std::string sp = path + "sigma.";
        return sample_kernel(inner, SamplingMap::affine_map(affine_field(sigma, "scale", sp, 1.0),
                                                            affine_field(sigma, "offset", sp, 0.0)));
    }
    if (family == "reparameterized") {
        Kernel inner = build(member(spec, "kernel", path), path + "kernel.");
        const json& rho = member(spec, "rho", path);
        const std::string rp = path + "rho.";
        return reparameterize(inner, ReparamMap::affine_map(affine_field(rho, "scale", rp, 1.0),
                                                            affine_field(rho, "offset", rp, 0.0), inner.domain()));
    }
    return build_atomic(family, spec, path);
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < text.size() && i < byte; ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

}  // namespace

KernelSpec parse_spec_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecParseError(source + ": line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                             e.what());
    }
}

KernelSpec load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecParseError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec_text(buffer.str(), path);
}

Kernel build_kernel(const KernelSpec& spec) { return build(spec, ""); }

std::string canonical_spec(const KernelSpec& spec) { return spec.dump(); }

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string spec_hash(const KernelSpec& spec) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_spec(spec))));
    return buf;
}

zoo::StateSpaceRealization realization_from_json(const nlohmann::json& params) {
    const std::string pp = "params.";
    zoo::StateSpaceRealization r;
    r.A = matrix(params, "A", pp);
    const auto b = number_array(params, "b", pp);
    const auto c = number_array(params, "c", pp);
    r.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    r.c = Eigen::Map<const Eigen::RowVectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    r.d = params.contains("d") ? number(params, "d", pp) : 0.0;
    r.Q = matrix(params, "Q", pp);
    r.v = params.contains("v") ? signal_field(params, "v", pp) : Signal::zero();
    return r;
}

nlohmann::json realization_to_json(const zoo::StateSpaceRealization& r) {
    json out;
    out["A"] = matrix_json(r.A);
    out["b"] = std::vector<double>(r.b.data(), r.b.data() + r.b.size());
    out["c"] = std::vector<double>(r.c.data(), r.c.data() + r.c.size());
    out["d"] = r.d;
    out["Q"] = matrix_json(r.Q);
    out["v"] = r.v.to_json();
    return out;
}

std::vector<ZooEntry> standard_zoo() {
    auto atomic = [](const std::string& family, const std::string& domain, json params) {
        return json{{"family", family}, {"domain", domain}, {"params", std::move(params)}};
    };
    const json geometric_08 = {{"type", "geometric"}, {"scale", 1.0}, {"rate", 0.8}};
    std::vector<ZooEntry> zoo;
    zoo.push_back({"DI", atomic("DI", "discrete", {{"alpha", 0.5}}), true});
    zoo.push_back({"DC", atomic("DC", "discrete", {{"alpha", 0.5}, {"gamma", 0.5}}), true});
    zoo.push_back({"TC", atomic("TC", "discrete", {{"alpha", 0.5}}), true});
    zoo.push_back({"SS", atomic("SS", "discrete", {{"alpha", 0.5}}), true});
    zoo.push_back({"iTC", atomic("iTC", "discrete", {{"alpha", 0.6}, {"beta", 0.3}}), true});
    zoo.push_back({"iSS", atomic("iSS", "discrete", {{"alpha", 0.6}, {"beta", 0.3}}), true});
    zoo.push_back({"iTS", atomic("iTS", "discrete", {{"alpha", 0.6}, {"beta", 0.3}}), true});
    zoo.push_back({"RnE", atomic("RnE", "discrete", {{"lambda", {1.0, 2.0}}, {"alpha", {0.25, 0.5}}}), true});
    zoo.push_back({"Kv", atomic("Kv", "discrete", {{"v", geometric_08}}), true});
    zoo.push_back({"AMLS",
                   atomic("AMLS", "discrete",
                          {{"base", atomic("Custom", "discrete", {{"kind", "exponential"}, {"gamma", 0.5}})},
                           {"v", {{"type", "geometric"}, {"scale", 1.0}, {"rate", 0.7}}}}),
                   true});
    zoo.push_back({"SI",
                   atomic("SI", "discrete",
                          {{"A", {{0.5}}}, {"b", {1.0}}, {"c", {1.0}}, {"d", 0.5}, {"Q", {{1.0}}}, {"v", geometric_08}}),
                   true});
    zoo.push_back({"TC-continuous", atomic("TC", "continuous", {{"alpha", 0.5}}), true});
    zoo.push_back({"DC-continuous", atomic("DC", "continuous", {{"alpha", 0.5}, {"gamma", 0.5}}), true});
    zoo.push_back({"RnE-continuous", atomic("RnE", "continuous", {{"lambda", {1.0}}, {"alpha", {std::exp(-2.0)}}}), true});
    zoo.push_back({"SS1", atomic("SSn", "continuous", {{"n", 1}, {"beta", 1.0}}), true});
    zoo.push_back({"SS2", atomic("SSn", "continuous", {{"n", 2}, {"beta", 1.0}}), true});
    zoo.push_back({"zero", atomic("Custom", "discrete", {{"kind", "zero"}}), true});
    zoo.push_back({"counterexample", json{{"family", "CounterexDiscrete"}}, false});
    zoo.push_back({"counterexample-continuous", json{{"family", "CounterexContinuous"}}, false});
    return zoo;
}

}  // namespace kernelid
