#include "iva/graded_poly.hpp"

#include <algorithm>
#include <sstream>

namespace iva {

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial out;
    auto a = vars_.begin(), b = o.vars_.begin();
    while (a != vars_.end() || b != o.vars_.end()) {
        if (b == o.vars_.end() || (a != vars_.end() && a->first < b->first)) {
            out.vars_.push_back(*a++);
        } else if (a == vars_.end() || b->first < a->first) {
            out.vars_.push_back(*b++);
        } else {
            out.vars_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    return out;
}

int Monomial::exponent(ParamVar v) const {
    for (auto& [w, e] : vars_)
        if (w == v) return e;
    return 0;
}

std::optional<Monomial> Monomial::divide_by(ParamVar v) const {
    Monomial out;
    bool found = false;
    for (auto& [w, e] : vars_) {
        if (w == v) {
            found = true;
            if (e > 1) out.vars_.emplace_back(w, e - 1);
        } else {
            out.vars_.push_back({w, e});
        }
    }
    if (!found) return std::nullopt;
    return out;
}

bool Monomial::involves(Family f) const {
    for (auto& [v, e] : vars_)
        if (v.fam == f) return true;
    return false;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
    int da = -a.weighted_degree(), db = -b.weighted_degree();
    if (da != db) return da < db;
    return a.vars_ < b.vars_;
}

GradedPoly GradedPoly::constant(const Rational& c) {
    GradedPoly p;
    if (c != 0) p.terms_.emplace(Monomial{}, c);
    return p;
}

GradedPoly GradedPoly::var(ParamVar v) {
    GradedPoly p;
    p.terms_.emplace(Monomial(v), Rational(1));
    return p;
}

bool GradedPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_constant());
}

void GradedPoly::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

GradedPoly& GradedPoly::operator+=(const GradedPoly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

GradedPoly& GradedPoly::operator-=(const GradedPoly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

GradedPoly GradedPoly::operator+(const GradedPoly& o) const {
    GradedPoly p = *this;
    p += o;
    return p;
}

GradedPoly GradedPoly::operator-(const GradedPoly& o) const {
    GradedPoly p = *this;
    p -= o;
    return p;
}

GradedPoly GradedPoly::operator-() const {
    GradedPoly p;
    for (auto& [m, c] : terms_) p.terms_.emplace(m, -c);
    return p;
}

GradedPoly GradedPoly::operator*(const GradedPoly& o) const {
    GradedPoly p;
    for (auto& [m1, c1] : terms_)
        for (auto& [m2, c2] : o.terms_) p.add_term(m1 * m2, c1 * c2);
    return p;
}

GradedPoly GradedPoly::operator*(const Rational& c) const {
    GradedPoly p;
    if (c == 0) return p;
    for (auto& [m, k] : terms_) p.terms_.emplace(m, k * c);
    return p;
}

GradedPoly GradedPoly::derive(ParamVar v) const {
    GradedPoly p;
    for (auto& [m, c] : terms_) {
        int e = m.exponent(v);
        if (e == 0) continue;
        p.add_term(*m.divide_by(v), c * e);
    }
    return p;
}

std::set<int> GradedPoly::weighted_degrees() const {
    std::set<int> out;
    for (auto& [m, c] : terms_) out.insert(m.weighted_degree());
    return out;
}

int GradedPoly::weighted_degree() const {
    if (terms_.empty()) throw std::logic_error("weighted_degree of zero polynomial");
    auto ds = weighted_degrees();
    if (ds.size() != 1) throw std::logic_error("weighted_degree of inhomogeneous polynomial");
    return *ds.begin();
}

GradedPoly GradedPoly::homogeneous_part(int wdeg) const {
    GradedPoly p;
    for (auto& [m, c] : terms_)
        if (m.weighted_degree() == wdeg) p.terms_.emplace(m, c);
    return p;
}

bool GradedPoly::involves(Family f) const {
    for (auto& [m, c] : terms_)
        if (m.involves(f)) return true;
    return false;
}

GradedPoly GradedPoly::eval_family(Family fam, const std::vector<Rational>& point) const {
    GradedPoly out;
    for (auto& [m, c] : terms_) {
        Rational coeff = c;
        Monomial rest;
        bool dead = false;
        for (auto& [v, e] : m.vars()) {
            if (v.fam == fam) {
                Rational val = (v.idx >= 1 && v.idx <= int(point.size())) ? point[v.idx - 1] : Rational(0);
                if (val == 0) {
                    dead = true;
                    break;
                }
                for (int i = 0; i < e; ++i) coeff *= val;
            } else {
                rest = rest * Monomial(v, e);
            }
        }
        if (!dead) out.add_term(rest, coeff);
    }
    return out;
}

GradedPoly GradedPoly::rename_family(Family from, Family to) const {
    GradedPoly out;
    for (auto& [m, c] : terms_) {
        Monomial nm;
        for (auto& [v, e] : m.vars()) {
            ParamVar w = v;
            if (w.fam == from) w.fam = to;
            nm = nm * Monomial(w, e);
        }
        out.add_term(nm, c);
    }
    return out;
}

namespace {
// Lex order on exponent vectors, used only for division pivoting.
const Monomial* lex_leading(const GradedPoly::TermMap& terms) {
    const Monomial* best = nullptr;
    for (auto& [m, c] : terms) {
        if (!best) {
            best = &m;
            continue;
        }
        if (best->vars() < m.vars()) best = &m;
    }
    return best;
}
}  // namespace

std::optional<GradedPoly> GradedPoly::try_divide(const GradedPoly& divisor) const {
    if (divisor.is_zero()) return std::nullopt;
    if (divisor.is_constant()) return *this * (Rational(1) / divisor.constant_term());
    GradedPoly rem = *this, quot;
    const Monomial* dlead = lex_leading(divisor.terms_);
    Rational dcoef = divisor.terms_.at(*dlead);
    while (!rem.is_zero()) {
        const Monomial* rlead = lex_leading(rem.terms_);
        // divide rlead by dlead
        Monomial q;
        bool ok = true;
        for (auto& [v, e] : rlead->vars()) {
            int de = dlead->exponent(v);
            if (e > de) q = q * Monomial(v, e - de);
        }
        for (auto& [v, e] : dlead->vars()) {
            if (rlead->exponent(v) < e) {
                ok = false;
                break;
            }
        }
        if (!ok) return std::nullopt;
        Rational qc = rem.terms_.at(*rlead) / dcoef;
        GradedPoly qterm;
        qterm.add_term(q, qc);
        quot += qterm;
        rem -= qterm * divisor;
    }
    return quot;
}

GradedPoly GradedPoly::truncated_degree(int cap) const {
    GradedPoly out;
    for (auto& [m, c] : terms_)
        if (-m.weighted_degree() <= cap) out.terms_.emplace(m, c);
    return out;
}

Rational GradedPoly::constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational GradedPoly::leading_coefficient() const {
    if (terms_.empty()) return Rational(0);
    return terms_.rbegin()->second;
}

std::string GradedPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : terms_) {
        Rational a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool coeff_shown = (a != 1) || m.is_constant();
        if (coeff_shown) os << iva::to_string(a);
        bool first_var = true;
        for (auto& [v, e] : m.vars()) {
            if (!first_var || coeff_shown) os << "*";
            os << var_name(v);
            if (e > 1) os << "^" << e;
            first_var = false;
        }
    }
    return os.str();
}

GradedPoly sigma_pullback(const GradedPoly& p, Family target, std::pair<Family, Family> sources) {
    for (Family f : kFamilies) {
        if (f != target && p.involves(f))
            throw std::invalid_argument("sigma_pullback: polynomial not expressed in the target family");
    }
    GradedPoly out;
    for (auto& [m, c] : p.terms()) {
        GradedPoly acc = GradedPoly::constant(c);
        for (auto& [v, e] : m.vars()) {
            GradedPoly factor;
            if (v.fam == target) {
                factor = GradedPoly::var(sources.first, v.idx) + GradedPoly::var(sources.second, v.idx);
            } else {
                factor = GradedPoly::var(v);
            }
            for (int i = 0; i < e; ++i) acc = acc * factor;
        }
        out += acc;
    }
    return out;
}

GradedPoly pole_linear_form(FamilySet fams, int r) {
    GradedPoly p;
    for (Family f : fams.members()) p += GradedPoly::var(f, r);
    return p;
}

}  // namespace iva
