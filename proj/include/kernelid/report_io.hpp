#pragma once

#include "kernelid/algebra.hpp"
#include "kernelid/dsri.hpp"
#include "kernelid/gp.hpp"
#include "kernelid/operators.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace kernelid {

inline constexpr const char* kToolName = "kernelid";
inline constexpr const char* kToolVersion = "1.0.0";

// Non-finite doubles become JSON null.
nlohmann::json number_json(double x);

nlohmann::json to_json(const TailEnvelope& envelope);
nlohmann::json to_json(const MeasureResult& result);
nlohmann::json to_json(const ClassFlag& flag);
nlohmann::json to_json(const ProbeResult& probe);
nlohmann::json to_json(const ClassReport& report);
nlohmann::json to_json(const DominanceCertificate& certificate);
nlohmann::json to_json(const DichotomyReport& report);
nlohmann::json to_json(const ConfidenceRegion& region);
nlohmann::json to_json(const OperatorBoundReport& report);

// %.17g; "inf", "-inf", "nan" for non-finite values.
std::string csv_number(double x);

// horizon, partial_value, tail_bound
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace);
// t, path_0, ..., path_{N-1}
void write_paths_csv(std::ostream& out, const GpEnsemble& ensemble);
// t, lower, upper, mean
void write_region_csv(std::ostream& out, const ConfidenceRegion& region, const Grid& grid);
// horizon, mean_l1, se, tail_stat (relative increment from the previous checkpoint)
void write_dichotomy_csv(std::ostream& out, const DichotomyReport& report);

// Pretty JSON with a trailing newline; byte-stable for equal documents.
std::string dump_report(const nlohmann::json& report);

}  // namespace kernelid
