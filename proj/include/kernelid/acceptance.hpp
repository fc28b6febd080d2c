#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kernelid {

struct CriterionResult {
    int id = 0;
    std::string module;
    std::string title;
    bool pass = false;
    nlohmann::json detail;  // deterministic content only
    double seconds = 0.0;   // wall clock; kept out of report.json
};

// Criteria 1-9; each is self-contained and seeded from master_seed.
CriterionResult criterion_closed_form_series(std::uint64_t seed);
CriterionResult criterion_counterexample_double_sum(std::uint64_t seed);
CriterionResult criterion_hierarchy(std::uint64_t seed);
CriterionResult criterion_dominance(std::uint64_t seed);
CriterionResult criterion_stable_spline_diagonal(std::uint64_t seed);
CriterionResult criterion_gp_mean_l1(std::uint64_t seed);
CriterionResult criterion_dichotomy(std::uint64_t seed);
CriterionResult criterion_confidence_region(std::uint64_t seed);
CriterionResult criterion_operator_bound(std::uint64_t seed);

// Runs the function behind criterion `id` (1-9).
CriterionResult run_criterion(int id, std::uint64_t seed);
// Criteria 1-9 in order.
std::vector<CriterionResult> run_core_criteria(std::uint64_t seed);

// Deterministic report document for a set of criterion results.
nlohmann::json acceptance_report(const std::vector<CriterionResult>& results, std::uint64_t seed);

// Criteria 1-9, then a second full run whose report bytes must match
// (criterion 10). Returns all ten results.
std::vector<CriterionResult> run_all_criteria(std::uint64_t seed);

}  // namespace kernelid
