#include "iva/render.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace iva {

RenderFormat parse_format(const std::string& s) {
    if (s == "text") return RenderFormat::text;
    if (s == "json") return RenderFormat::json;
    if (s == "latex") return RenderFormat::latex;
    throw std::invalid_argument("unknown format: " + s);
}

nlohmann::ordered_json config_json(const EngineConfig& cfg) {
    nlohmann::ordered_json j;
    j["r"] = cfg.r;
    j["kappa"] = to_string(cfg.kappa);
    j["rho"] = to_string(cfg.rho);
    j["c"] = to_string(cfg.central_charge());
    return j;
}

nlohmann::ordered_json prefactor_json(const EngineConfig& cfg, const PrefactorTag& tag,
                                      bool two_variable) {
    // Collect the irregularity polynomial per variable: sum over atoms of
    // f(parity*var; a, b), grouped by pole order k.
    std::map<int, std::map<int, GradedPoly>> per_var;  // var -> k -> coeff
    for (auto& [atom, count] : tag.atoms()) {
        Irregularity f = Irregularity::f_kappa(cfg, FamilySet(atom.a), FamilySet(atom.b));
        for (auto& [k, c] : f.coeffs()) {
            GradedPoly g = c * Rational(count);
            if (atom.parity < 0 && k % 2 == 1) g = -g;
            auto& slot = per_var[atom.var][k];
            slot += g;
            if (slot.is_zero()) per_var[atom.var].erase(k);
        }
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto& [var, coeffs] : per_var) {
        for (auto& [k, c] : coeffs) {
            nlohmann::ordered_json e;
            e["k"] = k;
            e["coeff"] = c.to_string();
            if (two_variable) e["var"] = var_symbol(var);
            arr.push_back(e);
        }
    }
    return arr;
}

nlohmann::ordered_json state_json(const ModuleElement& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto& [p, c] : v.terms()) {
        nlohmann::ordered_json e;
        e["partition"] = p.parts();
        e["coeff"] = c.pole_order() == 0 ? c.numerator().to_string() : c.to_string();
        e["pole_order"] = c.pole_order();
        arr.push_back(e);
    }
    return arr;
}

nlohmann::ordered_json series_json(const EngineConfig& cfg, const TwistedSeries& s) {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    j["prefactor"] = prefactor_json(cfg, s.tag, false);
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (auto& [p, v] : s.body.coeffs()) {
        nlohmann::ordered_json e;
        e["z"] = p;
        e["state"] = state_json(v);
        terms.push_back(e);
    }
    j["terms"] = terms;
    j["valid_through"] = nlohmann::ordered_json{{"z", s.body.hi() >= kPosInf ? nlohmann::ordered_json() : nlohmann::ordered_json(s.body.hi())}};
    return j;
}

nlohmann::ordered_json biseries_json(const EngineConfig& cfg, const TwistedBiSeries& s) {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    j["prefactor"] = prefactor_json(cfg, s.tag, true);
    j["domain"] = domain_name(s.body.domain());
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (auto& [pq, v] : s.body.coeffs()) {
        nlohmann::ordered_json e;
        e["z"] = pq.first;
        e["w"] = pq.second;
        e["state"] = state_json(v);
        terms.push_back(e);
    }
    j["terms"] = terms;
    j["valid_through"] = nlohmann::ordered_json{{"z", s.body.hi1()}, {"w", s.body.hi2()}};
    return j;
}

nlohmann::ordered_json ope_json(const EngineConfig& cfg, const OpeResult& ope) {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (size_t n = 0; n < ope.singular.size(); ++n) {
        nlohmann::ordered_json e;
        e["z"] = -int(n) - 1;
        e["state"] = state_json(ope.singular[n]);
        terms.push_back(e);
    }
    nlohmann::ordered_json e;
    e["z"] = 0;
    e["state"] = state_json(ope.nop);
    terms.push_back(e);
    j["terms"] = terms;
    return j;
}

nlohmann::ordered_json vir_expr_json(const EngineConfig& cfg, const VirasoroExpression& e) {
    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    j["family"] = family_name(e.family());
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (auto& t : e.terms()) {
        nlohmann::ordered_json te;
        te["coeff"] = t.coeff.to_string();
        te["pole_order"] = t.coeff.pole_order();
        te["L"] = t.l_word;
        te["d"] = t.d_word;
        terms.push_back(te);
    }
    j["terms"] = terms;
    return j;
}

namespace {

std::string latex_poly(const LocalizedPoly& c) {
    // plain text with latexified variable names
    std::string s = c.to_string();
    std::string out;
    for (size_t i = 0; i < s.size();) {
        bool hit = false;
        for (Family f : kFamilies) {
            std::string n = family_name(f);
            if (s.compare(i, n.size(), n) == 0 && i + n.size() < s.size() &&
                std::isdigit(uint8_t(s[i + n.size()]))) {
                size_t q = i + n.size();
                std::string idx;
                while (q < s.size() && std::isdigit(uint8_t(s[q]))) idx += s[q++];
                out += std::string(family_latex(f)) + "_{" + idx + "}";
                i = q;
                hit = true;
                break;
            }
        }
        if (!hit) {
            if (s[i] == '*') out += " ";
            else out += s[i];
            ++i;
        }
    }
    return out;
}

std::string latex_families(FamilySet fams) {
    std::string out;
    for (Family f : fams.members()) {
        if (!out.empty()) out += "+";
        out += family_latex(f);
    }
    return out;
}

std::string latex_prefactor(const EngineConfig& cfg, const PrefactorTag& tag) {
    if (tag.atoms().empty()) return "";
    std::map<int, std::map<int, GradedPoly>> per_var;
    for (auto& [atom, count] : tag.atoms()) {
        Irregularity f = Irregularity::f_kappa(cfg, FamilySet(atom.a), FamilySet(atom.b));
        for (auto& [k, c] : f.coeffs()) {
            GradedPoly g = c * Rational(count);
            if (atom.parity < 0 && k % 2 == 1) g = -g;
            per_var[atom.var][k] += g;
        }
    }
    std::string out = "e^{";
    bool first = true;
    for (auto& [var, coeffs] : per_var) {
        for (auto& [k, c] : coeffs) {
            if (c.is_zero()) continue;
            if (!first) out += " + ";
            first = false;
            out += "\\frac{" + latex_poly(LocalizedPoly(c)) + "}{" + var_symbol(var) + "^{" +
                   std::to_string(k) + "}}";
        }
    }
    out += "}";
    return out;
}

std::string power_label(const char* var, int p) {
    if (p == 0) return "";
    std::string s = var;
    if (p != 1) s += "^{" + std::to_string(p) + "}";
    return s;
}

}  // namespace

std::string latex_state(const ModuleElement& v) {
    if (v.is_zero()) return "0";
    std::string ket =
        v.families().empty() ? "|0\\rangle" : "|" + latex_families(v.families()) + "\\rangle";
    std::string out;
    bool first = true;
    for (auto& [p, c] : v.terms()) {
        if (!first) out += " + ";
        first = false;
        std::string cs = c.to_string();
        if (cs != "1") out += "\\left(" + latex_poly(c) + "\\right)";
        for (int n : p.parts()) out += "a_{-" + std::to_string(n) + "}";
        out += ket;
    }
    return out;
}

std::string render_series(const EngineConfig& cfg, const TwistedSeries& s, RenderFormat fmt) {
    if (fmt == RenderFormat::json) return series_json(cfg, s).dump();
    std::ostringstream os;
    if (fmt == RenderFormat::text) {
        os << "prefactor: " << s.tag.to_string(cfg) << "\n";
        for (auto& [p, v] : s.body.coeffs()) os << "z^" << p << ": " << v.to_string() << "\n";
        if (s.body.hi() < kPosInf) os << "valid through z^" << s.body.hi() << "\n";
        else os << "exact at every order\n";
        return os.str();
    }
    os << latex_prefactor(cfg, s.tag) << "\\left(";
    bool first = true;
    for (auto& [p, v] : s.body.coeffs()) {
        if (!first) os << " + ";
        first = false;
        std::string pw = power_label("z", p);
        os << "(" << latex_state(v) << ")" << pw;
    }
    os << "\\right)";
    return os.str();
}

std::string render_biseries(const EngineConfig& cfg, const TwistedBiSeries& s, RenderFormat fmt) {
    if (fmt == RenderFormat::json) return biseries_json(cfg, s).dump();
    std::ostringstream os;
    if (fmt == RenderFormat::text) {
        os << "prefactor: " << s.tag.to_string(cfg) << "\n";
        os << "domain: " << domain_name(s.body.domain()) << "\n";
        for (auto& [pq, v] : s.body.coeffs())
            os << "z^" << pq.first << " w^" << pq.second << ": " << v.to_string() << "\n";
        os << "valid through z^" << s.body.hi1() << ", w^" << s.body.hi2() << "\n";
        return os.str();
    }
    os << latex_prefactor(cfg, s.tag) << "\\left(";
    bool first = true;
    for (auto& [pq, v] : s.body.coeffs()) {
        if (!first) os << " + ";
        first = false;
        os << "(" << latex_state(v) << ")" << power_label("z", pq.first) << power_label("w", pq.second);
    }
    os << "\\right)";
    return os.str();
}

std::string render_ope(const EngineConfig& cfg, const OpeResult& ope, RenderFormat fmt) {
    if (fmt == RenderFormat::json) return ope_json(cfg, ope).dump();
    std::ostringstream os;
    if (fmt == RenderFormat::text) {
        for (size_t n = 0; n < ope.singular.size(); ++n)
            os << "C_" << n << " = " << ope.singular[n].to_string() << "\n";
        os << "nop = " << ope.nop.to_string() << "\n";
        return os.str();
    }
    for (size_t n = 0; n < ope.singular.size(); ++n) {
        if (ope.singular[n].is_zero()) continue;
        os << "\\frac{Y(" << latex_state(ope.singular[n]) << ", w)}{(z-w)^{" << (n + 1) << "}} + ";
    }
    os << "{:}Y..Y{:}\\ \\text{with}\\ {:}\\cdot{:}|0\\rangle|_{w=0} = " << latex_state(ope.nop);
    return os.str();
}

std::string render_vir_expr(const EngineConfig& cfg, const VirasoroExpression& e, RenderFormat fmt) {
    if (fmt == RenderFormat::json) return vir_expr_json(cfg, e).dump();
    if (fmt == RenderFormat::text) return e.to_string();
    std::ostringstream os;
    bool first = true;
    for (auto& t : e.terms()) {
        if (!first) os << " + ";
        first = false;
        os << "\\left(" << latex_poly(t.coeff) << "\\right)";
        for (int m : t.l_word) os << "L_{-" << m << "}";
        for (int j : t.d_word)
            os << "\\partial_{" << family_latex(e.family()) << "_{" << j << "}}";
        os << "|" << family_latex(e.family()) << "\\rangle";
    }
    return os.str();
}

}  // namespace iva
