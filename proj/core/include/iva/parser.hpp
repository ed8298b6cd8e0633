#pragma once

#include <string>
#include <vector>

#include "iva/virasoro.hpp"

namespace iva {

struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& what, size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// Surface syntax AST.
//   expr  := ["-"] term (("+"|"-") term)*
//   term  := [coeff ["*"]] gen* atom
//   gen   := "a(" int ")" | "L(" int ")" | "d(" family "," int ")"
//   atom  := "vac" | "coh[" family ("+" family)* "]"
//   coeff := rational-polynomial over lam<j>/mu<j>/nu<j> with ^, *, /, ()
struct StateExpr {
    struct Gen {
        char kind;  // 'a', 'L', 'd'
        int n;      // mode (a, L) or index (d)
        Family fam; // for 'd'
    };
    struct Term {
        LocalizedPoly coeff;
        std::vector<Gen> gens;
        bool coherent = false;
        FamilySet fams;
    };
    std::vector<Term> terms;
};

StateExpr parse_state_expr(const EngineConfig& cfg, const std::string& text);
ModuleElement eval_state_expr(const EngineConfig& cfg, const StateExpr& e);
// parse + evaluate in one step (the canonical ModuleElement form).
ModuleElement parse_state(const EngineConfig& cfg, const std::string& text);

// Coefficient-polynomial parser (rationals, parameter variables, ^ * / and
// parenthesized sums; division by rationals or pole-form powers).
LocalizedPoly parse_coefficient(const EngineConfig& cfg, const std::string& text);

// Canonical printer; parse(print(v)) == v.
std::string print_state(const ModuleElement& v);

}  // namespace iva
