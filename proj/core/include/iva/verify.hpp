#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "iva/vertex.hpp"
#include "iva/virasoro.hpp"

namespace iva::verify {

struct CheckReport {
    std::string id;
    std::string params;  // rendered parameter summary (deterministic)
    bool pass = true;
    std::vector<std::string> failures;  // located: first differing power and both values

    void fail(std::string what) {
        pass = false;
        failures.push_back(std::move(what));
    }
    void merge(const CheckReport& o);

    nlohmann::ordered_json to_json() const;
    std::string to_text() const;
};

struct VerifyOptions {
    int bound = 4;          // mode bound for bracket sweeps
    int state_weight = 4;   // max weight of sampled/exhausted states
    int trunc = 6;          // series truncation for one-variable checks
    int trunc_z = 6;        // two-variable windows
    int trunc_w = 4;
    // Parameter-monomial degree bound G for the two-variable expansion checks
    // (the sampling is exhaustive in the partition basis up to the weight
    // bound and in parameter monomials up to G).
    int degree_cap = 10;
    uint64_t seed = 1;
};

CheckReport check_algebra_relations(const EngineConfig& cfg, const VerifyOptions& opt);
CheckReport check_iva_axioms(const EngineConfig& cfg, const VerifyOptions& opt);
// One triple of states.
CheckReport check_locality_assoc_ope(const EngineConfig& cfg, const ModuleElement& A,
                                     const ModuleElement& B, const ModuleElement& C,
                                     const VerifyOptions& opt);
// Exhaustive partition basis through the given weights.
CheckReport check_locality_assoc_ope_suite(const EngineConfig& cfg, int weight_a, int weight_b,
                                           int weight_c, const VerifyOptions& opt);
CheckReport check_conformal(const EngineConfig& cfg, const VerifyOptions& opt);
CheckReport check_module_axioms(const EngineConfig& cfg, const VerifyOptions& opt);

// suite in {"algebra", "iva", "locality", "conformal", "module", "series", "all"}
std::vector<CheckReport> run_suite(const EngineConfig& cfg, const std::string& suite,
                                   const VerifyOptions& opt);

// Exp-ratio (locality kernel) invariants: direct product vs recursion, z-floor.
CheckReport check_series_kernel(const EngineConfig& cfg, const VerifyOptions& opt);

}  // namespace iva::verify
