#include "iva/virasoro.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace iva {

ModuleElement apply_L(const EngineConfig& cfg, int n, const ModuleElement& v) {
    cfg.require_conformal_kappa();
    if (v.is_zero()) return v;
    // Highest annihilation index that acts non-trivially on v.
    int M = std::max(v.max_weight(), cfg.r);
    ModuleElement acc = ModuleElement::basis_state(v.families(), Partition{}, LocalizedPoly{});
    for (int k = n - M; k <= M; ++k) {
        int i = std::min(k, n - k), j = std::max(k, n - k);  // :a_i a_j: = a_i a_j, i <= j
        ModuleElement term = apply_a(cfg, i, apply_a(cfg, j, v));
        acc += term.scaled(Rational(1, 2));
    }
    Rational rho_coef = -cfg.rho * (n + 1);
    if (cfg.mutation == Mutation::flip_rho_sign_in_virasoro_modes) rho_coef = -rho_coef;
    if (rho_coef != 0) acc += apply_a(cfg, n, v).scaled(rho_coef);
    return acc;
}

GradedPoly h_poly(const EngineConfig& cfg, Family fam, int k) {
    GradedPoly h;
    if (k > 2 * cfg.r) return h;
    for (int j = 0; j <= k; ++j) {
        // lam_0 = 0 and lam_l = 0 for l > r
        if (j < 1 || j > cfg.r) continue;
        if (k - j < 1 || k - j > cfg.r) continue;
        h += GradedPoly::var(fam, j) * GradedPoly::var(fam, k - j) * Rational(1, 2);
    }
    if (k >= 1 && k <= cfg.r) h += GradedPoly::var(fam, k) * (-cfg.rho * (k + 1));
    return h;
}

GradedPoly der0_Dk(const EngineConfig& cfg, Family fam, int k, const GradedPoly& p) {
    GradedPoly out;
    if (k >= cfg.r) return out;
    for (int j = 1; j <= cfg.r - k; ++j)
        out += GradedPoly::var(fam, j + k) * p.derive(ParamVar{fam, j}) * Rational(j);
    return out;
}

GradedPoly apply_scriptL(const EngineConfig& cfg, Family fam, int k, const GradedPoly& p) {
    return h_poly(cfg, fam, k) * p + der0_Dk(cfg, fam, k, p);
}

ModuleElement apply_scriptL(const EngineConfig& cfg, Family fam, int k, const ModuleElement& v) {
    ModuleElement acc = v.scaled(LocalizedPoly(h_poly(cfg, fam, k)));
    if (k < cfg.r) {
        for (int j = 1; j <= cfg.r - k; ++j) {
            ModuleElement d = apply_dlam(cfg, fam, j, v);
            acc += d.scaled(LocalizedPoly(GradedPoly::var(fam, j + k) * Rational(j)));
        }
    }
    return acc;
}

void VirasoroExpression::add(VirasoroTerm t) {
    if (t.coeff.is_zero()) return;
    std::sort(t.d_word.begin(), t.d_word.end());
    for (auto& u : terms_) {
        if (u.l_word == t.l_word && u.d_word == t.d_word) {
            u.coeff = u.coeff + t.coeff;
            return;
        }
    }
    terms_.push_back(std::move(t));
}

void VirasoroExpression::add_all(const VirasoroExpression& o) {
    for (auto& t : o.terms_) add(t);
}

VirasoroExpression VirasoroExpression::scaled(const LocalizedPoly& c) const {
    VirasoroExpression out(fam_);
    for (auto& t : terms_) {
        VirasoroTerm u = t;
        u.coeff = u.coeff * c;
        out.add(std::move(u));
    }
    return out;
}

VirasoroExpression VirasoroExpression::with_L_prefix(int m) const {
    // L_{-m} is O_S-linear and commutes with the d/d lam's, so it simply
    // prepends to the word.
    VirasoroExpression out(fam_);
    for (auto& t : terms_) {
        VirasoroTerm u = t;
        u.l_word.insert(u.l_word.begin(), m);
        out.add(std::move(u));
    }
    return out;
}

VirasoroExpression VirasoroExpression::with_derivative(int j, const EngineConfig& cfg) const {
    (void)cfg;
    // d_{lam_j} (c * Lw * Dw * coh) = (dc) Lw Dw coh + c Lw (Dw + {j}) coh.
    VirasoroExpression out(fam_);
    ParamVar var{fam_, j};
    for (auto& t : terms_) {
        VirasoroTerm u = t;
        u.coeff = t.coeff.derive(var);
        out.add(std::move(u));
        VirasoroTerm w = t;
        w.d_word.push_back(j);
        out.add(std::move(w));
    }
    return out;
}

int VirasoroExpression::max_pole_order() const {
    int m = 0;
    for (auto& t : terms_) m = std::max(m, t.coeff.pole_order());
    return m;
}

std::string VirasoroExpression::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& t : terms_) {
        if (!first) os << " + ";
        first = false;
        std::string c = t.coeff.to_string();
        if (c != "1") {
            bool paren = c.find(' ') != std::string::npos || t.coeff.pole_order() > 0;
            os << (paren && c.front() != '(' ? "(" + c + ")" : c) << " ";
        }
        for (int m : t.l_word) os << "L(-" << m << ") ";
        for (int j : t.d_word) os << "d(" << family_name(fam_) << "," << j << ") ";
        os << "coh";
    }
    return os.str();
}

namespace {

class SaturationRewriter {
  public:
    SaturationRewriter(const EngineConfig& cfg, Family fam) : cfg_(cfg), fam_(fam) {}

    VirasoroExpression rewrite_element(const ModuleElement& v) {
        VirasoroExpression out(fam_);
        for (auto& [p, c] : v.terms()) out.add_all(rewrite_partition(p).scaled(c));
        return out;
    }

    // Rewrite the basis state a_{-n1}...a_{-nk}|coh> (coefficient one).
    VirasoroExpression rewrite_partition(const Partition& p) {
        auto it = memo_.find(p);
        if (it != memo_.end()) return it->second;
        VirasoroExpression out(fam_);
        if (p.empty()) {
            out.add(VirasoroTerm{LocalizedPoly::one(), {}, {}});
        } else {
            int n1 = p.parts().front();
            Partition rest = p.without_index(0);
            if (n1 <= cfg_.r) {
                // a_{-n1} X = n1 d_{lam_{n1}} X for lam-free X (kappa = 1/2)
                out = rewrite_partition(rest).with_derivative(n1, cfg_).scaled(
                    LocalizedPoly(Rational(n1)));
            } else {
                // lam_r a_{-n1} X = L_{-(n1-r)}(X) - correction, all of lower weight
                int k = n1 - cfg_.r;
                ModuleElement rest_state = ModuleElement::basis_state(FamilySet(fam_), rest);
                GradedPoly lam_r = GradedPoly::var(fam_, cfg_.r);
                ModuleElement correction =
                    apply_L(cfg_, -k, rest_state) -
                    apply_a(cfg_, -n1, rest_state).scaled(LocalizedPoly(lam_r));
                VirasoroExpression acc = rewrite_partition(rest).with_L_prefix(k);
                VirasoroExpression corr = rewrite_element(correction);
                for (auto& t : corr.terms()) {
                    VirasoroTerm u = t;
                    u.coeff = u.coeff * Rational(-1);
                    acc.add(std::move(u));
                }
                LocalizedPoly inv_lam_r(GradedPoly::constant(1), lam_r, 1);
                out = acc.scaled(inv_lam_r);
            }
        }
        memo_.emplace(p, out);
        return out;
    }

  private:
    const EngineConfig& cfg_;
    Family fam_;
    std::map<Partition, VirasoroExpression> memo_;
};

}  // namespace

VirasoroExpression saturation_rewrite(const EngineConfig& cfg, const ModuleElement& v) {
    cfg.require_conformal_kappa();
    if (v.families().size() != 1)
        throw std::invalid_argument("saturation_rewrite: single-family states only");
    Family fam = v.families().members().front();
    SaturationRewriter rw(cfg, fam);
    return rw.rewrite_element(v);
}

ModuleElement eval_vir_expr(const EngineConfig& cfg, const VirasoroExpression& e) {
    ModuleElement acc = ModuleElement::basis_state(FamilySet(e.family()), Partition{}, LocalizedPoly{});
    for (auto& t : e.terms()) {
        ModuleElement cur = ModuleElement::coherent(e.family());
        for (int j : t.d_word) cur = apply_dlam(cfg, e.family(), j, cur);
        for (auto it = t.l_word.rbegin(); it != t.l_word.rend(); ++it)
            cur = apply_L(cfg, -*it, cur);
        acc += cur.scaled(t.coeff);
    }
    return acc;
}

}  // namespace iva
