#pragma once

#include "kernelid/core.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kernelid {

// A real signal on the time domain: envelopes v for k_v / AMLS /
// simulation-induced kernels, GP means, and bounded test inputs. Signals
// built from a named form carry an envelope on |v| and serialize to JSON.
class Signal {
public:
    static Signal zero();
    static Signal constant(double value);
    // scale * rate^t
    static Signal geometric(double scale, double rate);
    // scale * (1 + t)^(-exponent)
    static Signal power_law(double scale, double exponent);
    // values[floor(t)] while t < size, then 0.
    static Signal values(std::vector<double> values);
    // amplitude * (-1)^floor(t)
    static Signal alternating(double amplitude);
    // 1 at t == at, 0 elsewhere.
    static Signal impulse(double at);
    static Signal from_function(std::function<double(double)> fn, std::string label,
                                std::optional<double> sup_bound = std::nullopt);

    static Signal from_json(const nlohmann::json& doc);
    // Throws InvalidArgument for signals built from arbitrary functions.
    nlohmann::json to_json() const;

    double operator()(double t) const { return fn_(t); }
    const std::string& label() const { return label_; }
    // Envelope on |v(t)|, when the form admits one.
    const std::optional<TailEnvelope>& envelope() const { return envelope_; }
    // sup_t |v(t)| when known in closed form.
    const std::optional<double>& sup_bound() const { return sup_bound_; }
    // l1 norm in closed form when known (sum or integral by domain).
    std::optional<double> l1_norm(TimeDomain domain) const;

private:
    Signal(std::function<double(double)> fn, std::string label, nlohmann::json doc);

    std::function<double(double)> fn_;
    std::string label_;
    nlohmann::json doc_;
    std::optional<TailEnvelope> envelope_;
    std::optional<double> sup_bound_;
};

}  // namespace kernelid
