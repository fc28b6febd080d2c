#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>

namespace kernelid {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;      // validation / usage errors
inline constexpr int kExitAssertion = 2;  // ChainViolation, BoundViolated

struct RunConfig {
    std::string command;  // measure, classify, sample-gp, dichotomy, region, operators, verify-all
    std::optional<std::string> kernel_spec_path;
    std::string output_dir = ".";
    std::uint64_t master_seed = 42;
    std::optional<std::size_t> paths;
    std::optional<std::string> grid;  // "start:step:end"
    std::optional<double> epsilon;
    std::set<std::string> emit = {"json"};
    std::optional<double> horizon;
    std::optional<double> tol;
};

// Throws InvalidArgument for an unknown command, a tolerance below machine
// epsilon, an empty emit set, or malformed numeric overrides.
void validate_config(const RunConfig& config);

// Dispatches config.command, writes <output_dir>/report.json (always), CSVs
// per the emit set and a timing sidecar run.log. Returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace kernelid
