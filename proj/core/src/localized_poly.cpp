#include "iva/localized_poly.hpp"

#include <sstream>
#include <stdexcept>

namespace iva {

LocalizedPoly::LocalizedPoly(GradedPoly num, GradedPoly pole_form, int pole_order)
    : num_(std::move(num)), pole_form_(std::move(pole_form)), pole_order_(pole_order) {
    if (pole_order_ < 0) throw std::invalid_argument("negative pole order");
    if (pole_order_ > 0 && pole_form_.is_zero()) throw std::invalid_argument("empty pole form");
    normalize();
}

void LocalizedPoly::normalize() {
    if (num_.is_zero()) {
        pole_order_ = 0;
        pole_form_ = GradedPoly{};
        return;
    }
    while (pole_order_ > 0) {
        auto q = num_.try_divide(pole_form_);
        if (!q) break;
        num_ = std::move(*q);
        --pole_order_;
    }
    if (pole_order_ == 0) pole_form_ = GradedPoly{};
}

namespace {
void require_same_form(const LocalizedPoly& a, const LocalizedPoly& b) {
    if (a.pole_order() > 0 && b.pole_order() > 0 && !(a.pole_form() == b.pole_form()))
        throw std::invalid_argument("localized elements with different pole forms");
}
}  // namespace

LocalizedPoly LocalizedPoly::operator+(const LocalizedPoly& o) const {
    require_same_form(*this, o);
    const GradedPoly& form = pole_order_ > 0 ? pole_form_ : o.pole_form_;
    int k = std::max(pole_order_, o.pole_order_);
    GradedPoly a = num_, b = o.num_;
    for (int i = pole_order_; i < k; ++i) a = a * form;
    for (int i = o.pole_order_; i < k; ++i) b = b * form;
    return LocalizedPoly(a + b, form, k);
}

LocalizedPoly LocalizedPoly::operator-(const LocalizedPoly& o) const { return *this + (-o); }

LocalizedPoly LocalizedPoly::operator-() const {
    LocalizedPoly p = *this;
    p.num_ = -p.num_;
    return p;
}

LocalizedPoly LocalizedPoly::operator*(const LocalizedPoly& o) const {
    require_same_form(*this, o);
    const GradedPoly& form = pole_order_ > 0 ? pole_form_ : o.pole_form_;
    return LocalizedPoly(num_ * o.num_, form, pole_order_ + o.pole_order_);
}

LocalizedPoly LocalizedPoly::operator*(const Rational& c) const {
    if (c == 0) return LocalizedPoly{};
    LocalizedPoly p = *this;
    p.num_ = p.num_ * c;
    return p;
}

LocalizedPoly LocalizedPoly::operator*(const GradedPoly& p) const {
    return LocalizedPoly(num_ * p, pole_form_, pole_order_);
}

LocalizedPoly LocalizedPoly::derive(ParamVar v) const {
    if (pole_order_ == 0) return LocalizedPoly(num_.derive(v));
    // (n / f^k)' = (n' f - k n f') / f^{k+1}
    GradedPoly out = num_.derive(v) * pole_form_ - num_ * pole_form_.derive(v) * Rational(pole_order_);
    return LocalizedPoly(std::move(out), pole_form_, pole_order_ + 1);
}

LocalizedPoly LocalizedPoly::divided_by_pole(const GradedPoly& form, int k) const {
    if (k == 0) return *this;
    if (pole_order_ > 0 && !(pole_form_ == form))
        throw std::invalid_argument("divided_by_pole: mismatched pole forms");
    return LocalizedPoly(num_, form, pole_order_ + k);
}

std::optional<LocalizedPoly> LocalizedPoly::try_divide(const LocalizedPoly& o) const {
    if (o.is_zero()) return std::nullopt;
    // this / o = (num * form^{o.k}) / (o.num * form^{k}); try polynomial division by o.num.
    require_same_form(*this, o);
    auto q = num_.try_divide(o.num_);
    if (!q) return std::nullopt;
    const GradedPoly& form = pole_order_ > 0 ? pole_form_ : o.pole_form_;
    int k = pole_order_ - o.pole_order_;
    if (k >= 0) return LocalizedPoly(std::move(*q), form, k);
    GradedPoly n = std::move(*q);
    for (int i = 0; i < -k; ++i) n = n * form;
    return LocalizedPoly(std::move(n));
}

LocalizedPoly LocalizedPoly::eval_family(Family fam, const std::vector<Rational>& point) const {
    GradedPoly n = num_.eval_family(fam, point);
    if (pole_order_ == 0) return LocalizedPoly(std::move(n));
    GradedPoly f = pole_form_.eval_family(fam, point);
    if (f.is_zero()) throw std::domain_error("evaluation at a pole");
    if (f.is_constant()) {
        Rational c = f.constant_term();
        Rational scale = 1;
        for (int i = 0; i < pole_order_; ++i) scale /= c;
        return LocalizedPoly(n * scale);
    }
    if (f == pole_form_ || !f.is_homogeneous())
        return LocalizedPoly(std::move(n), std::move(f), pole_order_);
    return LocalizedPoly(std::move(n), std::move(f), pole_order_);
}

std::set<int> LocalizedPoly::weighted_degrees() const {
    std::set<int> out;
    if (num_.is_zero()) return out;
    int shift = 0;
    if (pole_order_ > 0) shift = -pole_order_ * pole_form_.weighted_degree();
    for (int d : num_.weighted_degrees()) out.insert(d + shift);
    return out;
}

bool LocalizedPoly::involves(Family f) const {
    return num_.involves(f) || (pole_order_ > 0 && pole_form_.involves(f));
}

std::string LocalizedPoly::to_string() const {
    if (pole_order_ == 0) return num_.to_string();
    std::ostringstream os;
    bool paren_num = num_.term_count() > 1;
    if (paren_num) os << "(";
    os << num_.to_string();
    if (paren_num) os << ")";
    os << "/";
    bool paren_form = pole_form_.term_count() > 1;
    if (paren_form || pole_order_ > 1) os << "(" << pole_form_.to_string() << ")";
    else os << pole_form_.to_string();
    if (pole_order_ > 1) os << "^" << pole_order_;
    return os.str();
}

LocalizedPoly localize_normalize(const GradedPoly& num, const GradedPoly& pole_form, int k) {
    return LocalizedPoly(num, pole_form, k);
}

LocalizedPoly poly_arith(PolyOp op, const LocalizedPoly& p, const LocalizedPoly& q) {
    switch (op) {
        case PolyOp::add: return p + q;
        case PolyOp::mul: return p * q;
        case PolyOp::derive: throw std::invalid_argument("derive takes a variable");
    }
    throw std::logic_error("unreachable");
}

LocalizedPoly poly_arith(PolyOp op, const LocalizedPoly& p, ParamVar v) {
    if (op != PolyOp::derive) throw std::invalid_argument("variable argument only valid for derive");
    return p.derive(v);
}

}  // namespace iva
