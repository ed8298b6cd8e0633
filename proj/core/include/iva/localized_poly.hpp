#pragma once

#include <string>

#include "iva/graded_poly.hpp"

namespace iva {

// Element of the ring localized along one linear form: num / pole_form^pole_order.
// pole_order = 0 means a plain polynomial (pole_form kept empty). The
// representation is normalized: for pole_order > 0 the numerator is not
// divisible by the form.
class LocalizedPoly {
  public:
    LocalizedPoly() = default;
    LocalizedPoly(GradedPoly num) : num_(std::move(num)) {}
    LocalizedPoly(const Rational& c) : num_(GradedPoly::constant(c)) {}
    LocalizedPoly(GradedPoly num, GradedPoly pole_form, int pole_order);

    static LocalizedPoly one() { return LocalizedPoly(GradedPoly::constant(1)); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return pole_order_ == 0; }
    const GradedPoly& numerator() const { return num_; }
    const GradedPoly& pole_form() const { return pole_form_; }
    int pole_order() const { return pole_order_; }

    LocalizedPoly operator+(const LocalizedPoly& o) const;
    LocalizedPoly operator-(const LocalizedPoly& o) const;
    LocalizedPoly operator-() const;
    LocalizedPoly operator*(const LocalizedPoly& o) const;
    LocalizedPoly operator*(const Rational& c) const;
    LocalizedPoly operator*(const GradedPoly& p) const;
    LocalizedPoly& operator+=(const LocalizedPoly& o) { return *this = *this + o; }

    friend bool operator==(const LocalizedPoly&, const LocalizedPoly&) = default;

    // d/dv with the quotient rule over the pole form.
    LocalizedPoly derive(ParamVar v) const;

    // Divide by pole_form^k (raises the pole order, then renormalizes).
    LocalizedPoly divided_by_pole(const GradedPoly& form, int k) const;

    // Exact division by an arbitrary localized element; nullopt when the
    // quotient is not a localized polynomial along the same form.
    std::optional<LocalizedPoly> try_divide(const LocalizedPoly& o) const;

    // Substitute the variables of `fam`; throws if the pole form vanishes.
    LocalizedPoly eval_family(Family fam, const std::vector<Rational>& point) const;

    // Weighted degrees of the element's monomials (numerator degree shifted by
    // the pole). Poles have degree -r each, so dividing raises the degree.
    std::set<int> weighted_degrees() const;

    bool involves(Family f) const;

    std::string to_string() const;

  private:
    void normalize();

    GradedPoly num_;
    GradedPoly pole_form_;
    int pole_order_ = 0;
};

// Spec-level constructor: num / pole_form^k, normalized.
LocalizedPoly localize_normalize(const GradedPoly& num, const GradedPoly& pole_form, int k);

enum class PolyOp { add, mul, derive };
LocalizedPoly poly_arith(PolyOp op, const LocalizedPoly& p, const LocalizedPoly& q);
LocalizedPoly poly_arith(PolyOp op, const LocalizedPoly& p, ParamVar v);

}  // namespace iva
