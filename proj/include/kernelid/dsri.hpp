#pragma once

#include "kernelid/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kernelid {

enum class MeasureStatus { Finite, Divergent, Unknown };
enum class MeasureMethod { ClosedForm, SeriesWithTail, QuadratureWithTail, Heuristic };

std::string_view to_string(MeasureStatus status);
std::string_view to_string(MeasureMethod method);

struct TracePoint {
    double horizon = 0.0;
    double partial = 0.0;
    double tail_bound = 0.0;  // +inf when no tail bound is available
};

struct MeasureResult {
    MeasureStatus status = MeasureStatus::Unknown;
    double value = 0.0;        // meaningful when Finite
    MeasureMethod method = MeasureMethod::SeriesWithTail;
    double error_bound = 0.0;  // absolute; honest for every method but Heuristic
    std::vector<TracePoint> partial_sum_trace;
    std::optional<TailEnvelope> envelope_used;
    std::string note;

    bool finite() const { return status == MeasureStatus::Finite; }
    bool certified() const { return finite() && method != MeasureMethod::Heuristic; }
    double upper_bound() const { return value + error_bound; }
};

struct MeasureOptions {
    double tol = 1e-10;                 // target tail bound
    double divergence_epsilon = 1e-4;   // minimum increment per doubling to call Divergent
    double discrete_start = 64.0;
    double discrete_max = 1048576.0;    // 2^20
    double continuous_start = 12.5;
    double continuous_max = 200.0;
    std::size_t double_sum_cap = 4096;  // max horizon for dense discrete double sums
    bool allow_closed_form = true;
    bool verify_envelope = true;
};

// M(k): sum / integral of k(t,t)^(1/2). Without an explicit envelope the
// kernel's own envelope (if any) is used.
MeasureResult dsri_measure(const Kernel& k, std::optional<TailEnvelope> envelope = std::nullopt,
                           const MeasureOptions& options = {});
// Double sum / integral of |k(s,t)|.
MeasureResult integrability_measure(const Kernel& k, std::optional<TailEnvelope> envelope = std::nullopt,
                                    const MeasureOptions& options = {});
// Sum / integral of k(t,t).
MeasureResult finite_trace_measure(const Kernel& k, std::optional<TailEnvelope> envelope = std::nullopt,
                                   const MeasureOptions& options = {});
// Double sum / integral of k(s,t)^2.
MeasureResult square_integrability_measure(const Kernel& k, std::optional<TailEnvelope> envelope = std::nullopt,
                                           const MeasureOptions& options = {});

// Compensated sum of k(t,t)^(1/2) over t < T (Discrete) or the integral on [0, T].
double dsri_partial_sum(const Kernel& k, double horizon);
// Sum over s, t < T of |k(s,t)|^p (Discrete only).
double double_partial_sum(const Kernel& k, std::size_t horizon, double p);

// Throws EnvelopeRejected when profile(t) = k(t,t)^(q/2) exceeds env^q at a probe point.
void verify_envelope(const Kernel& k, const TailEnvelope& envelope, double q = 1.0);

// Log-linear fit of k(t,t)^(1/2) over [horizon/10, horizon]; tagged uncertified.
std::optional<TailEnvelope> fit_envelope(const Kernel& k, double horizon);

enum class ProbeVerdict { ConsistentWithStable, ProbeDiverged };
std::string_view to_string(ProbeVerdict verdict);

struct ProbeTrace {
    std::string input;
    std::vector<TracePoint> trace;  // horizon, truncated l1 of the response
    double relative_increment = 0.0;
};

struct ProbeResult {
    ProbeVerdict verdict = ProbeVerdict::ConsistentWithStable;
    std::vector<ProbeTrace> inputs;
    std::string witness;  // input that failed, if any
};

struct ProbeOptions {
    std::size_t max_points = 1024;
    std::size_t start_points = 64;
    double continuous_step = 0.1;
    double relative_tolerance = 1e-2;
    std::uint64_t seed = 42;
};

// Necessary-condition probe: responses to u = 1, (-1)^t and seeded random
// signs must have Cauchy-converging truncated l1 norms.
ProbeResult stability_probe(const Kernel& k, const ProbeOptions& options = {});

enum class FlagState { Yes, No, Unknown };
std::string_view to_string(FlagState state);

struct ClassFlag {
    FlagState state = FlagState::Unknown;
    double bound = 0.0;  // certified upper bound when Yes
    MeasureResult measure;
};

struct ClassReport {
    std::string kernel;
    ClassFlag dsri;
    ClassFlag integrable;
    ClassFlag finite_trace;
    ClassFlag square_integrable;
    ProbeResult stable_probe;
};

// Runs all measures and the probe. A chain inconsistency raises ChainViolation.
ClassReport classify(const Kernel& k, std::optional<TailEnvelope> envelope = std::nullopt,
                     const MeasureOptions& options = {}, const ProbeOptions& probe = {});

void check_chain(const ClassReport& report);

}  // namespace kernelid
