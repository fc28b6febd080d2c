#include "kernelid/signal.hpp"

#include "kernelid/error.hpp"

#include <algorithm>
#include <cmath>

namespace kernelid {

Signal::Signal(std::function<double(double)> fn, std::string label, nlohmann::json doc)
    : fn_(std::move(fn)), label_(std::move(label)), doc_(std::move(doc)) {}

Signal Signal::zero() {
    Signal s([](double) { return 0.0; }, "zero", {{"type", "zero"}});
    s.envelope_ = TailEnvelope::geometric(0.0, 0.5);
    s.sup_bound_ = 0.0;
    return s;
}

Signal Signal::constant(double value) {
    if (!std::isfinite(value)) throw InvalidArgument("constant signal must be finite");
    Signal s([value](double) { return value; }, "constant(" + std::to_string(value) + ")",
             {{"type", "constant"}, {"value", value}});
    if (value == 0.0) s.envelope_ = TailEnvelope::geometric(0.0, 0.5);
    s.sup_bound_ = std::fabs(value);
    return s;
}

Signal Signal::geometric(double scale, double rate) {
    if (!std::isfinite(scale) || !(rate >= 0.0 && rate < 1.0)) {
        throw ParameterOutOfRange("geometric signal needs finite scale and rate in [0,1)");
    }
    Signal s([scale, rate](double t) { return scale * std::pow(rate, t); },
             "geometric(" + std::to_string(scale) + "," + std::to_string(rate) + ")",
             {{"type", "geometric"}, {"scale", scale}, {"rate", rate}});
    s.envelope_ = TailEnvelope::geometric(std::fabs(scale), rate);
    s.sup_bound_ = std::fabs(scale);
    return s;
}

Signal Signal::power_law(double scale, double exponent) {
    if (!std::isfinite(scale) || !(exponent >= 0.0)) {
        throw ParameterOutOfRange("power-law signal needs finite scale and exponent >= 0");
    }
    Signal s([scale, exponent](double t) { return scale * std::pow(1.0 + t, -exponent); },
             "power_law(" + std::to_string(scale) + "," + std::to_string(exponent) + ")",
             {{"type", "power"}, {"scale", scale}, {"exponent", exponent}});
    s.envelope_ = TailEnvelope::power_law(std::fabs(scale), exponent, 1.0);
    s.sup_bound_ = std::fabs(scale);
    return s;
}

Signal Signal::values(std::vector<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("signal values must be finite");
    }
    const double n = static_cast<double>(values.size());
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, std::fabs(v));
    nlohmann::json doc{{"type", "values"}, {"values", values}};
    Signal s(
        [values = std::move(values)](double t) {
            if (t < 0.0) return 0.0;
            const auto i = static_cast<std::size_t>(std::floor(t));
            return i < values.size() ? values[i] : 0.0;
        },
        "values[" + std::to_string(static_cast<std::size_t>(n)) + "]", std::move(doc));
    s.envelope_ = TailEnvelope::geometric(0.0, 0.5, n);
    s.sup_bound_ = sup;
    return s;
}

Signal Signal::alternating(double amplitude) {
    Signal s([amplitude](double t) { return (static_cast<long long>(std::floor(t)) % 2 == 0) ? amplitude : -amplitude; },
             "alternating(" + std::to_string(amplitude) + ")", {{"type", "alternating"}, {"amplitude", amplitude}});
    s.sup_bound_ = std::fabs(amplitude);
    return s;
}

Signal Signal::impulse(double at) {
    Signal s([at](double t) { return t == at ? 1.0 : 0.0; }, "impulse(" + std::to_string(at) + ")",
             {{"type", "impulse"}, {"at", at}});
    s.sup_bound_ = 1.0;
    if (at >= 0.0) s.envelope_ = TailEnvelope::geometric(0.0, 0.5, std::floor(at) + 1.0);
    return s;
}

Signal Signal::from_function(std::function<double(double)> fn, std::string label, std::optional<double> sup_bound) {
    Signal s(std::move(fn), std::move(label), nullptr);
    s.sup_bound_ = sup_bound;
    return s;
}

Signal Signal::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
        throw SpecParseError("signal must be an object with a string field 'type'");
    }
    const std::string type = doc["type"];
    auto number = [&](const char* field) -> double {
        if (!doc.contains(field) || !doc[field].is_number()) {
            throw SpecParseError("signal '" + type + "' needs numeric field '" + field + "'");
        }
        return doc[field].get<double>();
    };
    if (type == "zero") return zero();
    if (type == "constant") return constant(number("value"));
    if (type == "geometric") return geometric(number("scale"), number("rate"));
    if (type == "power") return power_law(number("scale"), number("exponent"));
    if (type == "alternating") return alternating(number("amplitude"));
    if (type == "impulse") return impulse(number("at"));
    if (type == "values") {
        if (!doc.contains("values") || !doc["values"].is_array()) {
            throw SpecParseError("signal 'values' needs an array field 'values'");
        }
        std::vector<double> values;
        for (const auto& v : doc["values"]) {
            if (!v.is_number()) throw SpecParseError("signal 'values' entries must be numbers");
            values.push_back(v.get<double>());
        }
        return Signal::values(std::move(values));
    }
    throw SpecParseError("unknown signal type '" + type + "'");
}

nlohmann::json Signal::to_json() const {
    if (doc_.is_null()) throw InvalidArgument("signal '" + label_ + "' has no serializable form");
    return doc_;
}

std::optional<double> Signal::l1_norm(TimeDomain domain) const {
    if (doc_.is_null()) return std::nullopt;
    const std::string type = doc_["type"];
    if (type == "zero") return 0.0;
    if (type == "geometric") {
        const double c = std::fabs(doc_["scale"].get<double>());
        const double r = doc_["rate"].get<double>();
        if (domain == TimeDomain::Discrete) return c / (1.0 - r);
        return r == 0.0 ? 0.0 : c / -std::log(r);
    }
    if (type == "values") {
        double sum = 0.0;
        for (const auto& v : doc_["values"]) sum += std::fabs(v.get<double>());
        return sum;
    }
    if (type == "constant" && doc_["value"].get<double>() == 0.0) return 0.0;
    return std::nullopt;
}

}  // namespace kernelid
