#include "iva/parser.hpp"

#include <cctype>

namespace iva {

namespace {

class Lexer {
  public:
    Lexer(const EngineConfig& cfg, const std::string& s) : cfg_(cfg), s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(uint8_t(s_[pos_]))) ++pos_;
    }
    bool done() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    bool accept_word(const std::string& w) {
        skip_ws();
        if (s_.compare(pos_, w.size(), w) == 0) {
            // keyword must not be a prefix of a longer identifier
            size_t end = pos_ + w.size();
            if (end >= s_.size() || !std::isalnum(uint8_t(s_[end]))) {
                pos_ = end;
                return true;
            }
        }
        return false;
    }
    bool peek_word(const std::string& w) {
        skip_ws();
        if (s_.compare(pos_, w.size(), w) != 0) return false;
        size_t end = pos_ + w.size();
        return end >= s_.size() || !std::isalnum(uint8_t(s_[end]));
    }

    long parse_int() {
        skip_ws();
        size_t start = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        while (pos_ < s_.size() && std::isdigit(uint8_t(s_[pos_]))) ++pos_;
        if (pos_ == start || (pos_ == start + 1 && !std::isdigit(uint8_t(s_[start]))))
            fail("expected integer");
        return std::stol(s_.substr(start, pos_ - start));
    }

    // family name or fail
    Family parse_family() {
        for (Family f : kFamilies)
            if (accept_word(family_name(f))) return f;
        fail("expected family name (lam/mu/nu)");
        return Family::lam;
    }

    // lam3, mu1, ... (family name immediately followed by digits)
    bool try_var(ParamVar& out) {
        skip_ws();
        for (Family f : kFamilies) {
            std::string n = family_name(f);
            if (s_.compare(pos_, n.size(), n) == 0) {
                size_t q = pos_ + n.size();
                if (q < s_.size() && std::isdigit(uint8_t(s_[q]))) {
                    size_t start = q;
                    while (q < s_.size() && std::isdigit(uint8_t(s_[q]))) ++q;
                    int idx = std::stoi(s_.substr(start, q - start));
                    if (idx < 1 || idx > cfg_.r) fail("variable index out of range (r=" + std::to_string(cfg_.r) + ")");
                    pos_ = q;
                    out = ParamVar{f, idx};
                    return true;
                }
            }
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos_); }

    size_t pos() const { return pos_; }

  private:
    const EngineConfig& cfg_;
    const std::string& s_;
    size_t pos_ = 0;
};

class CoeffParser {
  public:
    CoeffParser(const EngineConfig& cfg, Lexer& lx) : cfg_(cfg), lx_(lx) {}

    // poly := mono (("+"|"-") mono)*
    LocalizedPoly parse_poly() {
        LocalizedPoly acc = parse_mono();
        while (true) {
            if (lx_.accept('+')) acc = acc + parse_mono();
            else if (lx_.accept('-')) acc = acc - parse_mono();
            else break;
        }
        return acc;
    }

    // mono := factor (("*"|"/") factor)*  with juxtaposition not allowed here
    LocalizedPoly parse_mono() {
        LocalizedPoly acc = parse_factor();
        while (true) {
            if (lx_.accept('*')) {
                acc = acc * parse_factor();
            } else if (lx_.accept('/')) {
                LocalizedPoly d = parse_factor();
                auto q = acc.try_divide(d);
                if (!q) lx_.fail("division result is not a localized polynomial");
                acc = *q;
            } else {
                break;
            }
        }
        return acc;
    }

    // factor := ["-"] (rational | var | "(" poly ")") ["^" int]
    LocalizedPoly parse_factor() {
        bool neg = lx_.accept('-');
        LocalizedPoly base;
        ParamVar v{};
        if (lx_.peek() == '(') {
            lx_.expect('(');
            base = parse_poly();
            lx_.expect(')');
        } else if (std::isdigit(uint8_t(lx_.peek()))) {
            base = LocalizedPoly(Rational(lx_.parse_int()));
        } else if (lx_.try_var(v)) {
            base = LocalizedPoly(GradedPoly::var(v));
        } else {
            lx_.fail("expected coefficient factor");
        }
        if (lx_.accept('^')) {
            long e = lx_.parse_int();
            if (e < 0) lx_.fail("negative exponent");
            LocalizedPoly p = LocalizedPoly::one();
            for (long i = 0; i < e; ++i) p = p * base;
            base = p;
        }
        return neg ? -base : base;
    }

  private:
    const EngineConfig& cfg_;
    Lexer& lx_;
};

bool starts_generator(Lexer& lx) {
    return lx.peek_word("a") || lx.peek_word("L") || lx.peek_word("d");
}

bool starts_atom(Lexer& lx) { return lx.peek_word("vac") || lx.peek_word("coh"); }

}  // namespace

StateExpr parse_state_expr(const EngineConfig& cfg, const std::string& text) {
    Lexer lx(cfg, text);
    CoeffParser cp(cfg, lx);
    StateExpr expr;
    bool lead_neg = lx.accept('-');
    while (true) {
        StateExpr::Term term;
        term.coeff = LocalizedPoly::one();
        // optional coefficient, ended by an optional '*'
        if (!starts_generator(lx) && !starts_atom(lx)) {
            term.coeff = cp.parse_mono();
            lx.accept('*');
        }
        if (lead_neg) {
            term.coeff = -term.coeff;
            lead_neg = false;
        }
        while (starts_generator(lx)) {
            if (lx.accept_word("a")) {
                lx.expect('(');
                long n = lx.parse_int();
                lx.expect(')');
                if (n == 0) lx.fail("a(0) is the zero operator");
                term.gens.push_back({'a', int(n), Family::lam});
            } else if (lx.accept_word("L")) {
                lx.expect('(');
                long n = lx.parse_int();
                lx.expect(')');
                term.gens.push_back({'L', int(n), Family::lam});
            } else if (lx.accept_word("d")) {
                lx.expect('(');
                Family f = lx.parse_family();
                lx.expect(',');
                long j = lx.parse_int();
                lx.expect(')');
                if (j < 1 || j > cfg.r) lx.fail("derivative index out of range");
                term.gens.push_back({'d', int(j), f});
            }
        }
        if (lx.accept_word("vac")) {
            term.coherent = false;
        } else if (lx.accept_word("coh")) {
            term.coherent = true;
            if (lx.accept('[')) {
                term.fams.insert(lx.parse_family());
                while (lx.accept('+')) term.fams.insert(lx.parse_family());
                lx.expect(']');
            } else {
                term.fams.insert(Family::lam);
            }
        } else {
            lx.fail("expected terminal 'vac' or 'coh[...]'");
        }
        expr.terms.push_back(std::move(term));
        if (lx.accept('+')) {
            lead_neg = false;
            continue;
        }
        if (lx.accept('-')) {
            lead_neg = true;
            continue;
        }
        break;
    }
    if (!lx.done()) lx.fail("trailing input");
    return expr;
}

ModuleElement eval_state_expr(const EngineConfig& cfg, const StateExpr& e) {
    ModuleElement acc;
    bool first = true;
    for (auto& t : e.terms) {
        ModuleElement v =
            t.coherent ? ModuleElement::coherent(t.fams) : ModuleElement::vacuum();
        for (auto it = t.gens.rbegin(); it != t.gens.rend(); ++it) {
            switch (it->kind) {
                case 'a': v = apply_a(cfg, it->n, v); break;
                case 'L': v = apply_L(cfg, it->n, v); break;
                case 'd': v = apply_dlam(cfg, it->fam, it->n, v); break;
            }
        }
        v = v.scaled(t.coeff);
        if (first) {
            acc = v;
            first = false;
        } else {
            acc += v;
        }
    }
    return acc;
}

ModuleElement parse_state(const EngineConfig& cfg, const std::string& text) {
    return eval_state_expr(cfg, parse_state_expr(cfg, text));
}

LocalizedPoly parse_coefficient(const EngineConfig& cfg, const std::string& text) {
    Lexer lx(cfg, text);
    CoeffParser cp(cfg, lx);
    LocalizedPoly p = cp.parse_poly();
    if (!lx.done()) lx.fail("trailing input");
    return p;
}

std::string print_state(const ModuleElement& v) { return v.to_string(); }

}  // namespace iva
