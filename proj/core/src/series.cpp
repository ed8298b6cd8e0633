#include "iva/series.hpp"

namespace iva {

namespace {

// Exact product of two everywhere-exact scalar series.
ScalarSeries mul_exact(const ScalarSeries& a, const ScalarSeries& b) {
    ScalarSeries out(a.var());
    for (auto& [p, ca] : a.coeffs())
        for (auto& [q, cb] : b.coeffs()) out.add_to(p + q, ca * cb);
    return out;
}

}  // namespace

ScalarBiSeries zmw_power_expansion(int n, Domain dom, int lo1, int hi1, int lo2, int hi2) {
    ScalarBiSeries out(kVarZ, kVarW, dom);
    out.set_window(lo1, hi1, lo2, hi2);
    GradedPoly one = GradedPoly::constant(1);
    if (n >= 0) {
        // (z-w)^n = sum_t binom(n,t) (-1)^{n-t} z^t w^{n-t}
        for (int t = 0; t <= n; ++t) {
            Rational c = Rational(binomial(n, t)) * (((n - t) % 2 == 0) ? 1 : -1);
            if (out.known(t, n - t)) out.add_to(t, n - t, one * c);
        }
        return out;
    }
    int k = -n;
    if (dom == Domain::z_gt_w) {
        if (hi2 >= kPosInf && lo1 <= kNegInf)
            throw std::invalid_argument("zmw_power_expansion: unbounded window");
        // (z-w)^{-k} = sum_{m>=0} binom(k+m-1, m) w^m z^{-k-m}
        for (int m = 0; m <= hi2 && -k - m >= lo1; ++m) {
            Rational c = Rational(binomial(k + m - 1, m));
            if (out.known(-k - m, m)) out.add_to(-k - m, m, one * c);
        }
    } else if (dom == Domain::w_gt_z) {
        if (hi1 >= kPosInf && lo2 <= kNegInf)
            throw std::invalid_argument("zmw_power_expansion: unbounded window");
        // (z-w)^{-k} = (-1)^k (w-z)^{-k} = (-1)^k sum binom(k+m-1,m) z^m w^{-k-m}
        for (int m = 0; m <= hi1 && -k - m >= lo2; ++m) {
            Rational c = Rational(binomial(k + m - 1, m)) * ((k % 2 == 0) ? 1 : -1);
            if (out.known(m, -k - m)) out.add_to(m, -k - m, one * c);
        }
    } else {
        throw std::invalid_argument("zmw_power_expansion: unsupported domain");
    }
    return out;
}

ScalarSeries exp_irregularity_series(const Irregularity& f, int sign, int var, int lo) {
    ScalarSeries g(var);  // exact polynomial in var^{-1}
    for (auto& [k, c] : f.coeffs()) g.add_to(-k, c * Rational(sign));
    ScalarSeries acc(var, lo, kPosInf);
    acc.add_to(0, GradedPoly::constant(1));
    ScalarSeries term = acc;
    for (int n = 1;; ++n) {
        ScalarSeries next(var, lo, kPosInf);
        for (auto& [p, cp] : term.coeffs()) {
            for (auto& [q, cq] : g.coeffs()) {
                if (p + q >= lo) next.add_to(p + q, cp * cq * Rational(1, n));
            }
        }
        if (next.coeffs().empty()) break;
        for (auto& [p, c] : next.coeffs()) acc.add_to(p, c);
        term = next;
    }
    return acc;
}

ScalarBiSeries expand_exp_irregularity(const Irregularity& f, int sign, Domain dom, int lo1, int hi1,
                                       int lo2, int hi2) {
    if (dom != Domain::z_gt_w && dom != Domain::w_gt_z)
        throw std::invalid_argument("expand_exp_irregularity: unsupported domain");
    // Window of the result: in z_gt_w the z-axis is truncated below at lo1 and
    // exact above (support <= 0), the w-axis exact below (support >= 0) and
    // capped at hi2; mirrored in the other domain.
    ScalarBiSeries g(kVarZ, kVarW, dom);
    g.set_window(lo1, hi1, lo2, hi2);
    for (auto& [k, c] : f.coeffs()) {
        ScalarBiSeries pat = zmw_power_expansion(-k, dom, lo1, hi1, lo2, hi2);
        for (auto& [pq, pc] : pat.coeffs()) g.add_to(pq.first, pq.second, pc * (c * Rational(sign)));
    }
    ScalarBiSeries acc(kVarZ, kVarW, dom);
    ScalarBiSeries term(kVarZ, kVarW, dom);
    if (dom == Domain::z_gt_w) {
        acc.set_window(lo1, kPosInf, kNegInf, hi2);
        term.set_window(lo1, kPosInf, kNegInf, hi2);
    } else {
        acc.set_window(kNegInf, hi1, lo2, kPosInf);
        term.set_window(kNegInf, hi1, lo2, kPosInf);
    }
    acc.add_to(0, 0, GradedPoly::constant(1));
    term.add_to(0, 0, GradedPoly::constant(1));
    for (int n = 1;; ++n) {
        ScalarBiSeries next(kVarZ, kVarW, dom);
        next.set_window(acc.lo1(), acc.hi1(), acc.lo2(), acc.hi2());
        for (auto& [pq, cp] : term.coeffs()) {
            for (auto& [ab, cg] : g.coeffs()) {
                int p = pq.first + ab.first, q = pq.second + ab.second;
                if (p >= acc.lo1() && p <= acc.hi1() && q >= acc.lo2() && q <= acc.hi2())
                    next.add_to(p, q, cp * cg * Rational(1, n));
            }
        }
        if (next.coeffs().empty()) break;
        for (auto& [pq, c] : next.coeffs()) acc.add_to(pq.first, pq.second, c);
        term = next;
    }
    return acc;
}

ScalarBiSeries exp_ratio_series(const EngineConfig& cfg, FamilySet left, FamilySet right, int var_x,
                                int var_y, Domain dom, int y_cap, bool negate_y, bool x_is_first) {
    Irregularity f = Irregularity::f_kappa(cfg, left, right);
    // h_m(x): expansion of f'(x-y) in |x|>|y|: f'(u) = sum_k (-k) c_k u^{-k-1},
    // u^{-k-1} -> sum_m binom(k+m, m) y^m x^{-k-1-m}.
    auto deriv = f.derivative_coeffs();  // k+1 -> -k c_k
    std::vector<ScalarSeries> h;
    h.reserve(size_t(y_cap) + 1);
    for (int m = 0; m <= y_cap; ++m) {
        ScalarSeries hm(var_x);
        for (auto& [kk, c] : deriv) {
            // kk = k+1, coefficient c = -k c_k of u^{-kk}
            hm.add_to(-kk - m, c * Rational(binomial(kk - 1 + m, m)));
        }
        h.push_back(std::move(hm));
    }
    std::vector<ScalarSeries> c;
    c.reserve(size_t(y_cap) + 1);
    c.push_back(ScalarSeries::unit(var_x, GradedPoly::constant(1)));
    for (int k = 0; k < y_cap; ++k) {
        ScalarSeries acc(var_x);
        for (int m = 0; m <= k; ++m) {
            ScalarSeries prod = mul_exact(h[size_t(m)], c[size_t(k - m)]);
            for (auto& [p, cc] : prod.coeffs()) acc.add_to(p, cc);
        }
        acc = acc.scaled(Rational(1, k + 1));
        if (cfg.param_degree_cap < kNoDegreeCap) {
            ScalarSeries trunc(var_x);
            for (auto& [p, cc] : acc.coeffs()) trunc.add_to(p, cc.truncated_degree(cfg.param_degree_cap));
            acc = trunc;
        }
        c.push_back(acc);
    }
    ScalarBiSeries out(x_is_first ? var_x : var_y, x_is_first ? var_y : var_x, dom);
    if (x_is_first) out.set_window(kNegInf, kPosInf, kNegInf, y_cap);
    else out.set_window(kNegInf, y_cap, kNegInf, kPosInf);
    for (int k = 0; k <= y_cap; ++k) {
        Rational sgn = (negate_y && k % 2 == 1) ? Rational(-1) : Rational(1);
        for (auto& [p, cc] : c[size_t(k)].coeffs()) {
            if (x_is_first) out.add_to(p, k, cc * sgn);
            else out.add_to(k, p, cc * sgn);
        }
    }
    return out;
}

}  // namespace iva
