#pragma once

#include <map>
#include <string>
#include <vector>

#include "iva/fock.hpp"

namespace iva {

// L_n = 1/2 sum_k :a_k a_{n-k}: - rho (n+1) a_n on the free-field module.
// Requires kappa = 1/2 (the conformal normalization).
ModuleElement apply_L(const EngineConfig& cfg, int n, const ModuleElement& v);

// h_k(lam) = 1/2 sum_{j=0}^k lam_j lam_{k-j} - rho (k+1) lam_k (lam_0 = 0,
// lam_l = 0 beyond r); zero for k > 2r.
GradedPoly h_poly(const EngineConfig& cfg, Family fam, int k);

// D_k = sum_{j=1}^{r-k} j lam_{j+k} d/d lam_j acting on polynomials; zero for k >= r.
GradedPoly der0_Dk(const EngineConfig& cfg, Family fam, int k, const GradedPoly& p);

// ScriptL_k = h_k + D_k.
GradedPoly apply_scriptL(const EngineConfig& cfg, Family fam, int k, const GradedPoly& p);
ModuleElement apply_scriptL(const EngineConfig& cfg, Family fam, int k, const ModuleElement& v);

// One term: coeff * L_{-m1} ... L_{-mp} d^{e1}_{lam_{j1}} ... |coh>, with
// the L-word stored outermost-first and the D-word as a sorted multiset.
struct VirasoroTerm {
    LocalizedPoly coeff;
    std::vector<int> l_word;  // values m >= 1, meaning L_{-m}; applied right-to-left
    std::vector<int> d_word;  // indices j, meaning d/d lam_j; sorted
};

class VirasoroExpression {
  public:
    VirasoroExpression() = default;
    explicit VirasoroExpression(Family fam) : fam_(fam) {}

    Family family() const { return fam_; }
    const std::vector<VirasoroTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add(VirasoroTerm t);
    void add_all(const VirasoroExpression& o);
    VirasoroExpression scaled(const LocalizedPoly& c) const;
    // Compose with an outer operator.
    VirasoroExpression with_L_prefix(int m) const;
    VirasoroExpression with_derivative(int j, const EngineConfig& cfg) const;

    int max_pole_order() const;

    std::string to_string() const;

  private:
    Family fam_ = Family::lam;
    std::vector<VirasoroTerm> terms_;
};

// Rewrites a single-family state into a Virasoro-and-derivative expression with
// denominators only in powers of lam_r; eval_vir_expr inverts it exactly.
// Requires kappa = 1/2.
VirasoroExpression saturation_rewrite(const EngineConfig& cfg, const ModuleElement& v);

ModuleElement eval_vir_expr(const EngineConfig& cfg, const VirasoroExpression& e);

}  // namespace iva
