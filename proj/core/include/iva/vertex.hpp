#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "iva/series.hpp"

namespace iva {

// Untwisted body of Y(A, var) applied to `target`: the exact Laurent series
// B(var) with Y(A,var)target = e^{f(var; fam(A), fam(target))} B(var).
// Exact on (-inf, hi]; all singular coefficients are complete.
StateSeries y_body(const EngineConfig& cfg, const ModuleElement& A, const ModuleElement& target,
                   int var, int hi);

TwistedSeries vertex_act(const EngineConfig& cfg, const ModuleElement& A, const ModuleElement& B,
                         int hi);

struct OpeResult {
    // singular[n] = C_n = A'_(n) B for n >= 0 (trailing zeros trimmed)
    std::vector<ModuleElement> singular;
    // C_{-1} = A'_(-1) B: the normally ordered product state
    ModuleElement nop;
};
OpeResult ope_extract(const EngineConfig& cfg, const ModuleElement& A, const ModuleElement& B);

TwistedBiSeries compose_act(const EngineConfig& cfg, const ModuleElement& A, const ModuleElement& B,
                            const ModuleElement& C, Domain dom, int z_hi, int w_hi);

// e^{-f(z-w)}-twisted commutator of Y(A,z), Y(B,w) applied to C, with the
// common prefactor e^{f(z;.,.)+f(w;.,.)} stripped into the tag.
TwistedBiSeries twisted_bracket_act(const EngineConfig& cfg, const ModuleElement& A,
                                    const ModuleElement& B, const ModuleElement& C, int z_hi, int w_hi);

StateSeries exp_zT(const EngineConfig& cfg, const ModuleElement& v, int hi);
// Apply the operator e^{var T} to a series coefficient-wise.
StateSeries apply_exp_T(const EngineConfig& cfg, const StateSeries& s, int hi);

// A field with internal parameter shift `fams`: act(target, var, hi) returns
// the untwisted body, exact on (-inf, hi].
struct Field {
    FamilySet fams;
    std::function<StateSeries(const ModuleElement&, int, int)> act;
};

Field state_field(const EngineConfig& cfg, const ModuleElement& A);
// The divided derivative field d^{(n)}: untwisted part of d_var^{(n)} Y(A, var).
Field divided_derivative_field(const EngineConfig& cfg, const Field& base, int n);
// Normally ordered product of two fields, restricted to equal arguments.
Field nop_field(const EngineConfig& cfg, const Field& F, const Field& G);

// Grid of F1(z) F2(w) probe (untwisted bodies composed; prefactor implied).
StateBiSeries field_compose(const EngineConfig& cfg, const Field& f1, const Field& f2,
                            const ModuleElement& probe, int z_hi, int w_hi);

// The two orderings, each multiplied by its domain expansion of
// e^{-f(z-w)} (with the common prefactor e^{f(z;S1,S3)+f(w;S2,S3)} stripped):
// first = E1 * F1(z)F2(w)probe, second = E2 * F2(w)F1(z)probe.
std::pair<StateBiSeries, StateBiSeries> twisted_orderings(const EngineConfig& cfg, const Field& f1,
                                                          const Field& f2, const ModuleElement& probe,
                                                          int z_hi, int w_hi);

// E-twisted difference of the two orderings (the f-twisted Lie bracket with
// the common exponential prefactor stripped).
StateBiSeries field_bracket(const EngineConfig& cfg, const Field& f1, const Field& f2,
                            const ModuleElement& probe, int z_hi, int w_hi);

// The two-variable normally ordered product grid F(z)_+ G(w) + G(w) F(z)_-
// applied to `target` (the untwisted bodies; Definition-NOP helper slots are
// implied by the targets each factor acts on).
StateBiSeries nop_two_variable_grid(const EngineConfig& cfg, const Field& F, const Field& G,
                                    const ModuleElement& target, int z_hi, int w_hi);

// Smallest N <= n_max with (z-w)^N * bracket = 0 on the window.
std::optional<int> locality_order(const EngineConfig& cfg, const Field& f1, const Field& f2,
                                  const ModuleElement& probe, int z_hi, int w_hi, int n_max);

// Coefficient-wise subtraction ignoring domain markers (formal grids).
StateBiSeries grid_sub(const StateBiSeries& a, const StateBiSeries& b);

}  // namespace iva
