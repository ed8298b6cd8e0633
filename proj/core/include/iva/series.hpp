#pragma once

#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "iva/fock.hpp"
#include "iva/irregularity.hpp"

namespace iva {

// Sentinels for validity windows. A window [lo, hi] is the region where the
// series is exact; outside it coefficients are unknown (not zero). lo = kNegInf
// means everything below the stored support is genuinely zero.
constexpr int kNegInf = std::numeric_limits<int>::min() / 4;
constexpr int kPosInf = std::numeric_limits<int>::max() / 4;

constexpr int kVarZ = 0;
constexpr int kVarW = 1;
constexpr int kVarU = 2;  // u = z - w

inline const char* var_symbol(int v) { return v == kVarZ ? "z" : (v == kVarW ? "w" : "u"); }

inline int sat_add(int a, int b) {
    if (a >= kPosInf || b >= kPosInf) return kPosInf;
    if (a <= kNegInf || b <= kNegInf) return kNegInf;
    return a + b;
}

inline bool coeff_is_zero(const GradedPoly& c) { return c.is_zero(); }
inline bool coeff_is_zero(const ModuleElement& c) { return c.is_zero(); }
inline GradedPoly coeff_mul(const GradedPoly& s, const GradedPoly& x) { return s * x; }
inline ModuleElement coeff_mul(const GradedPoly& s, const ModuleElement& x) {
    return x.scaled(LocalizedPoly(s));
}

struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

template <class C>
class LaurentSeries {
  public:
    LaurentSeries() = default;
    explicit LaurentSeries(int var, int lo = kNegInf, int hi = kPosInf) : var_(var), lo_(lo), hi_(hi) {}

    static LaurentSeries unit(int var, C c, int power = 0) {
        LaurentSeries s(var);
        s.add_to(power, std::move(c));
        return s;
    }

    int var() const { return var_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    const std::map<int, C>& coeffs() const { return c_; }
    bool empty_support() const { return c_.empty(); }
    int support_min() const { return c_.empty() ? kPosInf : c_.begin()->first; }
    int support_max() const { return c_.empty() ? kNegInf : c_.rbegin()->first; }

    bool known(int p) const { return p >= lo_ && p <= hi_; }
    bool known_zero(int p) const { return known(p) && c_.find(p) == c_.end(); }

    const C& at(int p) const {
        if (!known(p)) throw TruncationError("series coefficient outside validity window");
        auto it = c_.find(p);
        if (it != c_.end()) return it->second;
        static const C zero{};
        return zero;
    }

    void add_to(int p, const C& c) {
        if (coeff_is_zero(c)) return;
        auto it = c_.find(p);
        if (it == c_.end()) {
            c_.emplace(p, c);
        } else {
            it->second = it->second + c;
            if (coeff_is_zero(it->second)) c_.erase(it);
        }
    }

    void narrow(int lo, int hi) {
        lo_ = std::max(lo_, lo);
        hi_ = std::min(hi_, hi);
        for (auto it = c_.begin(); it != c_.end();) {
            if (it->first < lo_ || it->first > hi_) it = c_.erase(it);
            else ++it;
        }
    }

    LaurentSeries operator+(const LaurentSeries& o) const {
        require_same_var(o);
        LaurentSeries out(var_, std::max(lo_, o.lo_), std::min(hi_, o.hi_));
        for (auto& [p, c] : c_)
            if (out.known(p)) out.add_to(p, c);
        for (auto& [p, c] : o.c_)
            if (out.known(p)) out.add_to(p, c);
        return out;
    }

    LaurentSeries operator-(const LaurentSeries& o) const { return *this + o.negated(); }

    LaurentSeries negated() const {
        LaurentSeries out = *this;
        for (auto& [p, c] : out.c_) c = c * Rational(-1);
        return out;
    }

    template <class S>
    LaurentSeries scaled(const S& s) const {
        LaurentSeries out(var_, lo_, hi_);
        for (auto& [p, c] : c_) out.add_to(p, c * s);
        return out;
    }

    LaurentSeries shifted(int d) const {
        LaurentSeries out(var_, lo_ == kNegInf ? kNegInf : lo_ + d, hi_ == kPosInf ? kPosInf : hi_ + d);
        for (auto& [p, c] : c_) out.c_.emplace(p + d, c);
        return out;
    }

    // d/dvar; poles of the window shift accordingly.
    LaurentSeries derivative() const {
        LaurentSeries out(var_, lo_ == kNegInf ? kNegInf : lo_ - 1, hi_ == kPosInf ? kPosInf : hi_ - 1);
        for (auto& [p, c] : c_)
            if (p != 0) out.add_to(p - 1, c * Rational(p));
        return out;
    }

    LaurentSeries divided_derivative(int n) const {
        LaurentSeries out = *this;
        Rational fact = 1;
        for (int i = 1; i <= n; ++i) fact *= i;
        out = out.derivative_n(n);
        return out.scaled(Rational(1) / fact);
    }

    LaurentSeries derivative_n(int n) const {
        LaurentSeries out = *this;
        for (int i = 0; i < n; ++i) out = out.derivative();
        return out;
    }

    // Substitute var -> -var.
    LaurentSeries var_negated() const {
        LaurentSeries out(var_, lo_, hi_);
        for (auto& [p, c] : c_) out.c_.emplace(p, (p % 2 == 0) ? c : c * Rational(-1));
        return out;
    }

    // Non-negative-power part; known zero below zero by construction.
    LaurentSeries plus_part() const {
        LaurentSeries out(var_, kNegInf, hi_);
        for (auto& [p, c] : c_)
            if (p >= 0) out.c_.emplace(p, c);
        if (lo_ > 0) throw TruncationError("plus_part: window does not include the pole region");
        return out;
    }

    // Strictly negative-power part; exact everywhere above -1.
    LaurentSeries minus_part() const {
        LaurentSeries out(var_, kNegInf, kPosInf);
        if (lo_ != kNegInf) throw TruncationError("minus_part: pole region not exact");
        for (auto& [p, c] : c_)
            if (p < 0) out.c_.emplace(p, c);
        return out;
    }

    const C& restrict_z0() const {
        if (lo_ != kNegInf) throw TruncationError("restrict_z0: pole region not exact");
        if (!c_.empty() && c_.begin()->first < 0)
            throw std::domain_error("restrict_z0 on a series with genuine poles");
        return at(0);
    }

    bool is_zero_on_window() const { return c_.empty(); }

  private:
    void require_same_var(const LaurentSeries& o) const {
        if (var_ != o.var_) throw std::invalid_argument("series variable mismatch");
    }

    int var_ = kVarZ;
    std::map<int, C> c_;
    int lo_ = kNegInf, hi_ = kPosInf;
};

using ScalarSeries = LaurentSeries<GradedPoly>;
using StateSeries = LaurentSeries<ModuleElement>;

namespace detail {
struct AxisView {
    int lo, hi, smin, smax;  // validity window and support bounds
};

// Soundness of a windowed product on output interval [lo, hi]: every
// possibly-nonzero pairing touching an unknown region of one factor must be
// annihilated by the known-zero tail of the other.
inline void check_axis_interval(const AxisView& s, const AxisView& x, int lo, int hi, const char* what) {
    if (s.lo != kNegInf && !(x.hi == kPosInf && lo != kNegInf && sat_add(lo, -s.lo) >= x.smax))
        throw TruncationError(what);
    if (s.hi != kPosInf && !(x.lo == kNegInf && hi != kPosInf && sat_add(hi, -s.hi) <= x.smin))
        throw TruncationError(what);
    if (x.lo != kNegInf && !(s.hi == kPosInf && lo != kNegInf && sat_add(lo, -x.lo) >= s.smax))
        throw TruncationError(what);
    if (x.hi != kPosInf && !(s.lo == kNegInf && hi != kPosInf && sat_add(hi, -x.hi) <= s.smin))
        throw TruncationError(what);
}
}  // namespace detail

// Sound windowed product: the scalar series times a coefficient series, on the
// requested output window. Throws TruncationError when the inputs cannot
// determine a requested coefficient.
template <class C>
LaurentSeries<C> mul_series(const ScalarSeries& s, const LaurentSeries<C>& x, int out_lo, int out_hi) {
    if (s.var() != x.var()) throw std::invalid_argument("series variable mismatch");
    LaurentSeries<C> out(x.var(), out_lo, out_hi);
    bool s_trivial = s.empty_support() && s.lo() == kNegInf && s.hi() == kPosInf;
    bool x_trivial = x.empty_support() && x.lo() == kNegInf && x.hi() == kPosInf;
    if (!s_trivial && !x_trivial) {
        detail::AxisView sv{s.lo(), s.hi(), s.support_min(), s.support_max()};
        detail::AxisView xv{x.lo(), x.hi(), x.support_min(), x.support_max()};
        detail::check_axis_interval(sv, xv, out_lo, out_hi, "series product: window too small");
    }
    for (auto& [a, ca] : s.coeffs()) {
        for (auto& [b, cb] : x.coeffs()) {
            int p = a + b;
            if (p >= out_lo && p <= out_hi) out.add_to(p, coeff_mul(ca, cb));
        }
    }
    return out;
}

enum class Domain { z_gt_w, w_gt_z, w_zmw };

inline const char* domain_name(Domain d) {
    switch (d) {
        case Domain::z_gt_w: return "|z|>|w|";
        case Domain::w_gt_z: return "|w|>|z|";
        case Domain::w_zmw: return "(w, z-w)";
    }
    return "?";
}

template <class C>
class BiSeries {
  public:
    BiSeries() = default;
    BiSeries(int var1, int var2, Domain dom) : var1_(var1), var2_(var2), dom_(dom) {}

    int var1() const { return var1_; }
    int var2() const { return var2_; }
    Domain domain() const { return dom_; }
    const std::map<std::pair<int, int>, C>& coeffs() const { return c_; }

    int lo1() const { return lo1_; }
    int hi1() const { return hi1_; }
    int lo2() const { return lo2_; }
    int hi2() const { return hi2_; }
    void set_window(int lo1, int hi1, int lo2, int hi2) {
        lo1_ = lo1;
        hi1_ = hi1;
        lo2_ = lo2;
        hi2_ = hi2;
    }

    int support_min1() const {
        int m = kPosInf;
        for (auto& [pq, c] : c_) m = std::min(m, pq.first);
        return m;
    }
    int support_max1() const {
        int m = kNegInf;
        for (auto& [pq, c] : c_) m = std::max(m, pq.first);
        return m;
    }
    int support_min2() const {
        int m = kPosInf;
        for (auto& [pq, c] : c_) m = std::min(m, pq.second);
        return m;
    }
    int support_max2() const {
        int m = kNegInf;
        for (auto& [pq, c] : c_) m = std::max(m, pq.second);
        return m;
    }

    bool known(int p, int q) const { return p >= lo1_ && p <= hi1_ && q >= lo2_ && q <= hi2_; }

    const C& at(int p, int q) const {
        if (!known(p, q)) throw TruncationError("biseries coefficient outside validity window");
        auto it = c_.find({p, q});
        if (it != c_.end()) return it->second;
        static const C zero{};
        return zero;
    }

    void add_to(int p, int q, const C& c) {
        if (coeff_is_zero(c)) return;
        auto it = c_.find({p, q});
        if (it == c_.end()) {
            c_.emplace(std::make_pair(p, q), c);
        } else {
            it->second = it->second + c;
            if (coeff_is_zero(it->second)) c_.erase(it);
        }
    }

    BiSeries operator+(const BiSeries& o) const {
        require_compatible(o);
        BiSeries out(var1_, var2_, dom_);
        out.set_window(std::max(lo1_, o.lo1_), std::min(hi1_, o.hi1_), std::max(lo2_, o.lo2_),
                       std::min(hi2_, o.hi2_));
        for (auto& [pq, c] : c_)
            if (out.known(pq.first, pq.second)) out.add_to(pq.first, pq.second, c);
        for (auto& [pq, c] : o.c_)
            if (out.known(pq.first, pq.second)) out.add_to(pq.first, pq.second, c);
        return out;
    }

    BiSeries operator-(const BiSeries& o) const { return *this + o.negated(); }

    BiSeries negated() const {
        BiSeries out = *this;
        for (auto& [pq, c] : out.c_) c = c * Rational(-1);
        return out;
    }

    bool is_zero_on_window() const { return c_.empty(); }

    void narrow(int lo1, int hi1, int lo2, int hi2) {
        lo1_ = std::max(lo1_, lo1);
        hi1_ = std::min(hi1_, hi1);
        lo2_ = std::max(lo2_, lo2);
        hi2_ = std::min(hi2_, hi2);
        for (auto it = c_.begin(); it != c_.end();) {
            if (!known(it->first.first, it->first.second)) it = c_.erase(it);
            else ++it;
        }
    }

  private:
    void require_compatible(const BiSeries& o) const {
        if (var1_ != o.var1_ || var2_ != o.var2_ || dom_ != o.dom_)
            throw std::invalid_argument("biseries variable/domain mismatch");
    }

    int var1_ = kVarZ, var2_ = kVarW;
    Domain dom_ = Domain::z_gt_w;
    std::map<std::pair<int, int>, C> c_;
    int lo1_ = kNegInf, hi1_ = kPosInf, lo2_ = kNegInf, hi2_ = kPosInf;
};

using ScalarBiSeries = BiSeries<GradedPoly>;
using StateBiSeries = BiSeries<ModuleElement>;

// Windowed product of a scalar biseries with a coefficient biseries.
template <class C>
BiSeries<C> mul_biseries(const ScalarBiSeries& s, const BiSeries<C>& x, int lo1, int hi1, int lo2,
                         int hi2) {
    if (s.var1() != x.var1() || s.var2() != x.var2())
        throw std::invalid_argument("biseries variable mismatch");
    BiSeries<C> out(x.var1(), x.var2(), x.domain());
    out.set_window(lo1, hi1, lo2, hi2);
    bool s_trivial = s.coeffs().empty() && s.lo1() == kNegInf && s.hi1() == kPosInf &&
                     s.lo2() == kNegInf && s.hi2() == kPosInf;
    bool x_trivial = x.coeffs().empty() && x.lo1() == kNegInf && x.hi1() == kPosInf &&
                     x.lo2() == kNegInf && x.hi2() == kPosInf;
    if (!s_trivial && !x_trivial) {
        detail::AxisView s1{s.lo1(), s.hi1(), s.support_min1(), s.support_max1()};
        detail::AxisView s2{s.lo2(), s.hi2(), s.support_min2(), s.support_max2()};
        detail::AxisView x1{x.lo1(), x.hi1(), x.support_min1(), x.support_max1()};
        detail::AxisView x2{x.lo2(), x.hi2(), x.support_min2(), x.support_max2()};
        detail::check_axis_interval(s1, x1, lo1, hi1, "biseries product: first variable window too small");
        detail::check_axis_interval(s2, x2, lo2, hi2, "biseries product: second variable window too small");
    }
    for (auto& [ab, ca] : s.coeffs()) {
        for (auto& [cd, cb] : x.coeffs()) {
            int p = ab.first + cd.first, q = ab.second + cd.second;
            if (p >= lo1 && p <= hi1 && q >= lo2 && q <= hi2) out.add_to(p, q, coeff_mul(ca, cb));
        }
    }
    return out;
}

// Multiply by (z - w)^N (vars must be (z, w) grid semantics).
template <class C>
BiSeries<C> mul_zw_power(const BiSeries<C>& x, int N) {
    if (N == 0) return x;
    BiSeries<C> out(x.var1(), x.var2(), x.domain());
    out.set_window(x.lo1(), x.hi1(), x.lo2(), x.hi2());
    for (int j = 0; j <= N; ++j) {
        Rational coef = Rational(binomial(N, j)) * ((j % 2 == 0) ? 1 : -1);
        for (auto& [pq, c] : x.coeffs()) {
            int p = pq.first + (N - j), q = pq.second + j;
            if (out.known(p, q)) out.add_to(p, q, c * coef);
        }
    }
    return out;
}

// Diagonal restriction z = w of a grid: sum over p+q = n. Sound window:
// n exact iff all possibly-nonzero contributions are known.
template <class C>
LaurentSeries<C> diagonal_restriction(const BiSeries<C>& x, int out_var, int out_lo, int out_hi) {
    if (x.lo1() != kNegInf || x.lo2() != kNegInf)
        throw TruncationError("diagonal restriction: axes must be exact below");
    int hi = std::min(sat_add(x.hi1(), x.support_min2()), sat_add(x.hi2(), x.support_min1()));
    if (out_hi > hi) throw TruncationError("diagonal restriction: window too small");
    LaurentSeries<C> out(out_var, out_lo, out_hi);
    for (auto& [pq, c] : x.coeffs()) {
        int n = pq.first + pq.second;
        if (n >= out_lo && n <= out_hi) out.add_to(n, c);
    }
    return out;
}

struct TwistedSeries {
    PrefactorTag tag;
    StateSeries body;
};

struct TwistedBiSeries {
    PrefactorTag tag;
    StateBiSeries body;
};

inline TwistedSeries twisted_add(const TwistedSeries& a, const TwistedSeries& b) {
    if (!a.body.is_zero_on_window() && !b.body.is_zero_on_window() && !(a.tag == b.tag))
        throw std::invalid_argument("twisted series prefactor tag mismatch");
    return TwistedSeries{a.body.is_zero_on_window() ? b.tag : a.tag, a.body + b.body};
}

// Multiply the body by a scalar series carrying its own prefactor tag.
inline TwistedSeries twisted_combine(const TwistedSeries& a, const ScalarSeries& s, const PrefactorTag& stag,
                                     int out_lo, int out_hi) {
    return TwistedSeries{a.tag + stag, mul_series(s, a.body, out_lo, out_hi)};
}

// --- expansions -------------------------------------------------------------

// Expand u^n (u = z - w) into the given domain as an exact biseries on the
// requested window. For n >= 0 this is the finite binomial; for n < 0 the
// geometric series of the domain.
ScalarBiSeries zmw_power_expansion(int n, Domain dom, int lo1, int hi1, int lo2, int hi2);

// Expansion of a Laurent series in u = z - w into a (z, w) grid. Each u-power
// n lands on the anti-diagonal p + q = n, so a rectangle is exact iff the
// whole band of diagonals it touches is within the input window.
template <class C>
BiSeries<C> bi_expand(const LaurentSeries<C>& s, Domain dom, int lo1, int hi1, int lo2, int hi2) {
    BiSeries<C> out(kVarZ, kVarW, dom);
    out.set_window(lo1, hi1, lo2, hi2);
    if (s.lo() != kNegInf) throw TruncationError("bi_expand: series must be exact below");
    if (s.hi() != kPosInf && sat_add(hi1, hi2) > s.hi())
        throw TruncationError("bi_expand: input series truncated below the requested window");
    for (auto& [n, c] : s.coeffs()) {
        ScalarBiSeries pat = zmw_power_expansion(n, dom, lo1, hi1, lo2, hi2);
        for (auto& [pq, pc] : pat.coeffs()) out.add_to(pq.first, pq.second, coeff_mul(pc, c));
    }
    return out;
}

// e^{sign f(z-w)} expanded in the given domain, exact on the window.
ScalarBiSeries expand_exp_irregularity(const Irregularity& f, int sign, Domain dom, int lo1, int hi1,
                                       int lo2, int hi2);

// e^{sign f(x)} as a single-variable series, exact on [lo, +inf].
ScalarSeries exp_irregularity_series(const Irregularity& f, int sign, int var, int lo);

// The exponential-ratio series G_{L,R}(x, y) = e^{-f(x-y;L,R)}|_{|x|>|y|} e^{f(x;L,R)}
// = sum_k c_k(x) y^k with c_k exact polynomials in x^{-1} (computed by the
// recursion (k+1)c_{k+1} = sum_m h_m c_{k-m}, h = f'(x-y) expanded). The result
// is exact in x everywhere and in y through y_cap. negate_y substitutes y -> -y.
ScalarBiSeries exp_ratio_series(const EngineConfig& cfg, FamilySet left, FamilySet right, int var_x,
                                int var_y, Domain dom, int y_cap, bool negate_y, bool x_is_first);

enum class SeriesOp { mul, derive_z, restrict_z0, scale };

}  // namespace iva
