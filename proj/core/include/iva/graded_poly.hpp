#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iva/params.hpp"
#include "iva/rational.hpp"

namespace iva {

// Monomial in the internal parameters: sorted exponent vector over ParamVars.
class Monomial {
  public:
    Monomial() = default;
    explicit Monomial(ParamVar v, int exp = 1) {
        if (exp > 0) vars_.emplace_back(v, exp);
    }

    bool is_constant() const { return vars_.empty(); }
    // deg lam_j = -j, so the weighted degree is -sum j * exp_j.
    int weighted_degree() const {
        int d = 0;
        for (auto& [v, e] : vars_) d -= v.idx * e;
        return d;
    }
    int total_degree() const {
        int d = 0;
        for (auto& [v, e] : vars_) d += e;
        return d;
    }

    Monomial operator*(const Monomial& o) const;
    int exponent(ParamVar v) const;
    // nullopt if not divisible by v.
    std::optional<Monomial> divide_by(ParamVar v) const;
    bool involves(Family f) const;

    const std::vector<std::pair<ParamVar, int>>& vars() const { return vars_; }

    friend bool operator==(const Monomial&, const Monomial&) = default;

  private:
    friend struct MonomialOrder;
    friend class GradedPoly;
    std::vector<std::pair<ParamVar, int>> vars_;  // sorted by ParamVar, exps > 0
};

// Graded-lexicographic: by |weighted degree|, then lex by (family, index).
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

// Exact-rational polynomial in the graded parameters; no zero coefficients stored.
class GradedPoly {
  public:
    using TermMap = std::map<Monomial, Rational, MonomialOrder>;

    GradedPoly() = default;
    static GradedPoly constant(const Rational& c);
    static GradedPoly var(ParamVar v);
    static GradedPoly var(Family f, int idx) { return var(ParamVar{f, idx}); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    const TermMap& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }

    GradedPoly& operator+=(const GradedPoly& o);
    GradedPoly& operator-=(const GradedPoly& o);
    GradedPoly operator+(const GradedPoly& o) const;
    GradedPoly operator-(const GradedPoly& o) const;
    GradedPoly operator-() const;
    GradedPoly operator*(const GradedPoly& o) const;
    GradedPoly operator*(const Rational& c) const;
    friend GradedPoly operator*(const Rational& c, const GradedPoly& p) { return p * c; }
    friend bool operator==(const GradedPoly&, const GradedPoly&) = default;

    void add_term(const Monomial& m, const Rational& c);

    GradedPoly derive(ParamVar v) const;

    // Weighted degrees present among the monomials (empty set for the zero poly).
    std::set<int> weighted_degrees() const;
    bool is_homogeneous() const { return weighted_degrees().size() <= 1; }
    // Weighted degree of a homogeneous nonzero polynomial.
    int weighted_degree() const;
    GradedPoly homogeneous_part(int wdeg) const;

    bool involves(Family f) const;

    // Substitute every variable of `fam` by the corresponding entry of `point`
    // (point[j-1] is the value of fam_j).
    GradedPoly eval_family(Family fam, const std::vector<Rational>& point) const;

    // Rename every fam_j variable to to_j.
    GradedPoly rename_family(Family from, Family to) const;

    // Exact division; nullopt if the divisor does not divide exactly.
    std::optional<GradedPoly> try_divide(const GradedPoly& divisor) const;

    // Drop monomials with weighted-degree magnitude beyond the cap.
    GradedPoly truncated_degree(int cap) const;

    Rational constant_term() const;
    Rational leading_coefficient() const;

    std::string to_string() const;

  private:
    TermMap terms_;
};

// sigma pullback: every target-family variable xi_j becomes sources.first_j + sources.second_j.
GradedPoly sigma_pullback(const GradedPoly& p, Family target, std::pair<Family, Family> sources);

// The designated pole form: sum over the families of their index-r variable.
GradedPoly pole_linear_form(FamilySet fams, int r);

}  // namespace iva
