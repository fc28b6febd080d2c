#pragma once

#include "kernelid/core.hpp"
#include "kernelid/zoo.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace kernelid {

// Kernel specs are JSON documents. Atomic:
//   {"family": "TC", "domain": "discrete", "params": {"alpha": 0.5}}
// Composite:
//   {"family": "sum", "terms": [...], "coefficients": [1.0, 2.0]}
//   {"family": "product", "terms": [...]}
//   {"family": "sampled", "kernel": {...}, "sigma": {"scale": 1, "offset": 0}}
//   {"family": "reparameterized", "kernel": {...}, "rho": {"scale": 2, "offset": 0}}
using KernelSpec = nlohmann::json;

// Parses JSON text; syntax errors become SpecParseError with the line number.
KernelSpec parse_spec_text(const std::string& text, const std::string& source = "<input>");
KernelSpec load_spec_file(const std::string& path);

Kernel build_kernel(const KernelSpec& spec);

// Canonical serialization (sorted keys, no whitespace) and its FNV-1a hash.
std::string canonical_spec(const KernelSpec& spec);
std::uint64_t fnv1a64(const std::string& bytes);
std::string spec_hash(const KernelSpec& spec);

zoo::StateSpaceRealization realization_from_json(const nlohmann::json& params);
nlohmann::json realization_to_json(const zoo::StateSpaceRealization& realization);

struct ZooEntry {
    std::string name;
    KernelSpec spec;
    bool dsri = true;  // membership expected from the closed-form analysis
};

// The fixed catalogue exercised by classify, the dichotomy and verify-all.
std::vector<ZooEntry> standard_zoo();

}  // namespace kernelid
