#include "kernelid/report_io.hpp"

#include <cmath>
#include <cstdio>

namespace kernelid {

using nlohmann::json;

json number_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

namespace {

json trace_json(const std::vector<TracePoint>& trace) {
    json out = json::array();
    for (const auto& tp : trace) {
        out.push_back({{"horizon", tp.horizon}, {"partial", number_json(tp.partial)}, {"tail_bound", number_json(tp.tail_bound)}});
    }
    return out;
}

std::string_view form_name(TailEnvelope::Form form) {
    switch (form) {
        case TailEnvelope::Form::Geometric: return "geometric";
        case TailEnvelope::Form::PowerLaw: return "power_law";
        case TailEnvelope::Form::None: return "none";
    }
    return "none";
}

}  // namespace

json to_json(const TailEnvelope& e) {
    json out{{"form", form_name(e.form)}, {"scale", number_json(e.scale)}, {"onset", e.onset}, {"certified", e.certified}};
    if (e.form == TailEnvelope::Form::Geometric) out["rate"] = e.rate;
    if (e.form == TailEnvelope::Form::PowerLaw) out["exponent"] = e.exponent;
    return out;
}

json to_json(const MeasureResult& r) {
    json out{{"status", to_string(r.status)},
             {"method", to_string(r.method)},
             {"value", r.status == MeasureStatus::Divergent ? json("divergent") : number_json(r.value)},
             {"error_bound", number_json(r.error_bound)},
             {"partial_sum_trace", trace_json(r.partial_sum_trace)}};
    if (r.status == MeasureStatus::Divergent) out["last_partial"] = number_json(r.value);
    if (r.envelope_used) out["envelope"] = to_json(*r.envelope_used);
    if (!r.note.empty()) out["note"] = r.note;
    return out;
}

json to_json(const ClassFlag& f) {
    json out{{"state", to_string(f.state)}, {"measure", to_json(f.measure)}};
    if (f.state == FlagState::Yes) out["bound"] = number_json(f.bound);
    return out;
}

json to_json(const ProbeResult& p) {
    json inputs = json::array();
    for (const auto& in : p.inputs) {
        inputs.push_back({{"input", in.input},
                          {"relative_increment", number_json(in.relative_increment)},
                          {"trace", trace_json(in.trace)}});
    }
    json out{{"verdict", to_string(p.verdict)}, {"inputs", inputs}};
    if (!p.witness.empty()) out["witness"] = p.witness;
    return out;
}

json to_json(const ClassReport& r) {
    return {{"kernel", r.kernel},
            {"dsri", to_json(r.dsri)},
            {"integrable", to_json(r.integrable)},
            {"finite_trace", to_json(r.finite_trace)},
            {"square_integrable", to_json(r.square_integrable)},
            {"stable_probe", to_json(r.stable_probe)}};
}

json to_json(const DominanceCertificate& c) {
    return {{"dominated", c.dominated},
            {"dominating", c.dominating},
            {"constant_C", number_json(c.constant_C)},
            {"mode", to_string(c.mode)},
            {"probe_horizon", c.probe_horizon},
            {"max_ratio_observed", number_json(c.max_ratio_observed)},
            {"witness", {c.witness_s, c.witness_t}}};
}

json to_json(const DichotomyReport& r) {
    json trace = json::array();
    for (const auto& cp : r.trace) {
        trace.push_back({{"horizon", cp.horizon}, {"mean_l1", cp.mean_l1}, {"se", cp.se}, {"root_sum", cp.root_sum}});
    }
    return {{"kernel", r.kernel},
            {"n_paths", r.n_paths},
            {"seed", r.seed},
            {"jitter", r.jitter},
            {"saturation", number_json(r.saturation)},
            {"slope", number_json(r.slope)},
            {"slope_target", r.slope_target},
            {"slope_within_tolerance", r.slope_within_tolerance},
            {"verdict", to_string(r.verdict)},
            {"trace", trace}};
}

json to_json(const ConfidenceRegion& r) {
    return {{"epsilon", r.epsilon}, {"delta_eps", r.delta_eps}, {"mean", r.mean.label()}, {"area", to_json(r.area)}};
}

json to_json(const OperatorBoundReport& r) {
    return {{"operator", r.operator_label},
            {"kernel", r.kernel},
            {"l1_norm_bound", r.l1_norm_bound},
            {"m_of_k", r.m_of_k},
            {"m_error_bound", r.m_error_bound},
            {"rkhs_bound", r.rkhs_bound},
            {"max_observed_ratio", r.max_observed_ratio},
            {"max_embedding_ratio", r.max_embedding_ratio},
            {"n_samples", r.n_samples},
            {"violations", r.violations},
            {"embedding_violations", r.embedding_violations}};
}

std::string csv_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
    out << "horizon,partial_value,tail_bound\n";
    for (const auto& tp : trace) {
        out << csv_number(tp.horizon) << ',' << csv_number(tp.partial) << ',' << csv_number(tp.tail_bound) << '\n';
    }
}

void write_paths_csv(std::ostream& out, const GpEnsemble& ensemble) {
    out << 't';
    for (Eigen::Index r = 0; r < ensemble.paths.rows(); ++r) out << ",path_" << r;
    out << '\n';
    for (std::size_t i = 0; i < ensemble.grid.size(); ++i) {
        out << csv_number(ensemble.grid.point(i));
        for (Eigen::Index r = 0; r < ensemble.paths.rows(); ++r) {
            out << ',' << csv_number(ensemble.paths(r, static_cast<Eigen::Index>(i)));
        }
        out << '\n';
    }
}

void write_region_csv(std::ostream& out, const ConfidenceRegion& region, const Grid& grid) {
    out << "t,lower,upper,mean\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.point(i);
        out << csv_number(t) << ',' << csv_number(region.lower(t)) << ',' << csv_number(region.upper(t)) << ','
            << csv_number(region.mean(t)) << '\n';
    }
}

void write_dichotomy_csv(std::ostream& out, const DichotomyReport& report) {
    out << "horizon,mean_l1,se,tail_stat\n";
    for (std::size_t i = 0; i < report.trace.size(); ++i) {
        const auto& cp = report.trace[i];
        double stat = 0.0;
        if (i > 0 && cp.mean_l1 > 0.0) stat = (cp.mean_l1 - report.trace[i - 1].mean_l1) / cp.mean_l1;
        out << csv_number(cp.horizon) << ',' << csv_number(cp.mean_l1) << ',' << csv_number(cp.se) << ','
            << csv_number(stat) << '\n';
    }
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

}  // namespace kernelid
