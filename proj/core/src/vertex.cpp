#include "iva/vertex.hpp"

#include <stdexcept>

namespace iva {

namespace {

// [d^{(n-1)} a(var)_-, a_{-q}] = 2 kappa ((n+q-1)!/((n-1)!(q-1)!)) (-1)^{n-1} var^{-n-q}
Rational contraction_scalar(const EngineConfig& cfg, int n, int q) {
    Rational c = 2 * cfg.kappa * Rational(factorial(n + q - 1)) /
                 Rational(factorial(n - 1) * factorial(q - 1));
    if (n % 2 == 0) c = -c;
    return c;
}

// gamma_q(var; F) = [phi_F(var)_-, a_{-q}]: scalar Laurent polynomial.
ScalarSeries gamma_series(const EngineConfig& cfg, FamilySet fams, int q, int var) {
    ScalarSeries out(var);
    for (int n = 1; n <= cfg.r; ++n) {
        GradedPoly vars;
        for (Family f : fams.members()) vars += GradedPoly::var(f, n);
        if (vars.is_zero()) continue;
        Rational c = contraction_scalar(cfg, n, q) / (2 * cfg.kappa * n);
        out.add_to(-n - q, vars * c);
    }
    return out;
}

// d^{(n-1)} a(var)_- eigenvalue on |coh_F>: sum_m F_m (-1)^{n-1} binom(m+n-1, n-1) var^{-m-n}.
ScalarSeries eigen_series(const EngineConfig& cfg, FamilySet fams, int n, int var) {
    ScalarSeries out(var);
    for (int m = 1; m <= cfg.r; ++m) {
        GradedPoly vars;
        for (Family f : fams.members()) vars += GradedPoly::var(f, m);
        if (vars.is_zero()) continue;
        Rational c = Rational(binomial(m + n - 1, n - 1));
        if (n % 2 == 0) c = -c;
        out.add_to(-m - n, vars * c);
    }
    return out;
}

StateSeries zero_series(int var, int hi) { return StateSeries(var, kNegInf, hi); }

// Apply a_{-m} coefficient-wise.
StateSeries apply_creation(const EngineConfig& cfg, int m, const StateSeries& s) {
    StateSeries out(s.var(), s.lo(), s.hi());
    for (auto& [p, v] : s.coeffs()) out.add_to(p, apply_a(cfg, -m, v));
    return out;
}

// The annihilation field part d^{(n-1)} a(var)_- applied to a state series.
StateSeries apply_field_minus(const EngineConfig& cfg, int n, const StateSeries& s) {
    StateSeries out(s.var(), s.lo(), s.hi());
    for (auto& [p, v] : s.coeffs()) {
        FamilySet fams = v.families();
        ScalarSeries eig = eigen_series(cfg, fams, n, s.var());
        for (auto& [pp, state] : v.terms()) {
            // contractions against the creation word
            for (size_t i = 0; i < pp.size(); ++i) {
                int q = pp.parts()[i];
                Rational c = contraction_scalar(cfg, n, q);
                out.add_to(p - n - q,
                           ModuleElement::basis_state(fams, pp.without_index(i), state * c));
            }
            // eigenvalue on the coherent state
            for (auto& [e, coef] : eig.coeffs())
                out.add_to(p + e, ModuleElement::basis_state(fams, pp, state * LocalizedPoly(coef)));
        }
    }
    return out;
}

// The creation field part d^{(n-1)} a(var)_+ applied to a state series,
// truncated at the window top.
StateSeries apply_field_plus(const EngineConfig& cfg, int n, const StateSeries& s, int hi) {
    hi = std::min(hi, s.hi());
    StateSeries out(s.var(), s.lo(), hi);
    for (auto& [p, v] : s.coeffs()) {
        for (int m = n; p + m - n <= hi; ++m) {
            Rational c = Rational(binomial(m - 1, n - 1));
            out.add_to(p + m - n, apply_a(cfg, -m, v).scaled(c));
        }
    }
    return out;
}

StateSeries truncate_series_degree(const EngineConfig& cfg, StateSeries s) {
    if (cfg.param_degree_cap >= kNoDegreeCap) return s;
    StateSeries out(s.var(), s.lo(), s.hi());
    for (auto& [p, v] : s.coeffs()) out.add_to(p, truncate_degree(v, cfg.param_degree_cap));
    return out;
}

// e^{Delta_+} with Delta_+ = phi_F(var)_+ - phi_F (the strictly positive powers).
StateSeries apply_exp_plus_tail(const EngineConfig& cfg, FamilySet fams, const StateSeries& s, int hi) {
    hi = std::min(hi, s.hi());
    StateSeries acc(s.var(), s.lo(), hi);
    for (auto& [p, v] : s.coeffs())
        if (p <= hi) acc.add_to(p, v);
    StateSeries term = acc;
    for (int j = 1;; ++j) {
        StateSeries next(s.var(), s.lo(), hi);
        for (auto& [p, v] : term.coeffs()) {
            for (int n = 1; n <= cfg.r; ++n) {
                GradedPoly vars;
                for (Family f : fams.members()) vars += GradedPoly::var(f, n);
                if (vars.is_zero()) continue;
                Rational base = Rational(1) / (2 * cfg.kappa * n * j);
                for (int m = n + 1; p + m - n <= hi; ++m) {
                    Rational c = base * Rational(binomial(m - 1, n - 1));
                    next.add_to(p + m - n, apply_a(cfg, -m, v).scaled(LocalizedPoly(vars * c)));
                }
            }
        }
        next = truncate_series_degree(cfg, std::move(next));
        if (next.coeffs().empty()) break;
        for (auto& [p, v] : next.coeffs()) acc.add_to(p, v);
        term = next;
    }
    return acc;
}

}  // namespace

StateSeries y_body(const EngineConfig& cfg, const ModuleElement& A, const ModuleElement& target,
                   int var, int hi) {
    FamilySet fa = A.families();
    if (!fa.disjoint(target.families()))
        throw std::invalid_argument("vertex operator: family collision between state and target");
    if (A.is_zero() || target.is_zero()) return StateSeries(var, kNegInf, kPosInf);

    // Identity field: Y(|0>, z) = id, exact at every order.
    if (fa.empty() && A.terms().size() == 1 && A.terms().begin()->first.empty()) {
        const LocalizedPoly& c = A.terms().begin()->second;
        StateSeries out(var, kNegInf, kPosInf);
        out.add_to(0, target.scaled(c));
        return out;
    }

    StateSeries result(var, kNegInf, hi);
    for (auto& [aword, acoef] : A.terms()) {
        for (auto& [tword, tcoef] : target.terms()) {
            // Step 1: push e^{phi_A(var)_-} through the target creation word:
            // product of (a_{-q} + gamma_q(var)) on |coh_target>.
            StateSeries s0(var, kNegInf, kPosInf);
            s0.add_to(0, ModuleElement::basis_state(target.families(), Partition{}, tcoef));
            for (int q : tword.parts()) {
                StateSeries created = apply_creation(cfg, q, s0);
                if (!fa.empty()) {
                    ScalarSeries g = gamma_series(cfg, fa, q, var);
                    StateSeries scaled(var, s0.lo(), s0.hi());
                    for (auto& [gp, gc] : g.coeffs())
                        for (auto& [p, v] : s0.coeffs()) scaled.add_to(p + gp, v.scaled(LocalizedPoly(gc)));
                    created = created + scaled;
                }
                s0 = created;
            }

            const auto& parts = aword.parts();
            size_t k = parts.size();
            for (size_t mask = 0; mask < (size_t(1) << k); ++mask) {
                StateSeries s = s0;
                // annihilation halves (bit clear), right of everything else
                for (size_t i = 0; i < k; ++i)
                    if (!(mask & (size_t(1) << i))) s = apply_field_minus(cfg, parts[i], s);
                // coherent twist: retag + strictly-positive creation tail
                if (!fa.empty()) {
                    StateSeries retagged(var, s.lo(), s.hi());
                    for (auto& [p, v] : s.coeffs()) retagged.add_to(p, retag(v, fa));
                    s = apply_exp_plus_tail(cfg, fa, retagged, hi);
                }
                // creation halves (bit set)
                for (size_t i = 0; i < k; ++i)
                    if (mask & (size_t(1) << i))
                        s = truncate_series_degree(cfg, apply_field_plus(cfg, parts[i], s, hi));
                for (auto& [p, v] : s.coeffs())
                    if (p <= hi) result.add_to(p, truncate_degree(v.scaled(acoef), cfg.param_degree_cap));
            }
        }
    }
    return result;
}

TwistedSeries vertex_act(const EngineConfig& cfg, const ModuleElement& A, const ModuleElement& B,
                         int hi) {
    PrefactorTag tag = PrefactorTag::of(kVarZ, A.families(), B.families());
    return TwistedSeries{tag, y_body(cfg, A, B, kVarZ, hi)};
}

OpeResult ope_extract(const EngineConfig& cfg, const ModuleElement& A, const ModuleElement& B) {
    StateSeries body = y_body(cfg, A, B, kVarZ, 0);
    OpeResult out;
    out.nop = body.known(0) ? body.at(0) : ModuleElement{};
    int lowest = body.support_min();
    if (lowest < 0) {
        out.singular.resize(size_t(-lowest));
        for (auto& [p, v] : body.coeffs())
            if (p < 0) out.singular[size_t(-p - 1)] = v;
    }
    return out;
}

Field state_field(const EngineConfig& cfg, const ModuleElement& A) {
    Field f;
    f.fams = A.families();
    f.act = [cfg, A](const ModuleElement& target, int var, int hi) {
        return y_body(cfg, A, target, var, hi);
    };
    return f;
}

Field divided_derivative_field(const EngineConfig& cfg, const Field& base, int n) {
    Field f;
    f.fams = base.fams;
    FamilySet shift = base.fams;
    auto act = base.act;
    f.act = [cfg, shift, act, n](const ModuleElement& target, int var, int hi) {
        StateSeries body = act(target, var, hi + n);
        // untwisted part of d^{(n)}(e^{f} body) = sum_j E_j d^{(n-j)} body,
        // E_j = e^{-f} d^{(j)} e^{f} (exact Laurent polynomials).
        Irregularity f_ir = Irregularity::f_kappa(cfg, shift, target.families());
        ScalarSeries fprime(var);
        for (auto& [kk, c] : f_ir.derivative_coeffs()) fprime.add_to(-kk, c);
        std::vector<ScalarSeries> E;
        E.push_back(ScalarSeries::unit(var, GradedPoly::constant(1)));
        for (int j = 1; j <= n; ++j) {
            ScalarSeries prev = E.back();
            ScalarSeries next = prev.derivative();
            for (auto& [p, cp] : prev.coeffs())
                for (auto& [q, cq] : fprime.coeffs()) next.add_to(p + q, cp * cq);
            E.push_back(next.scaled(Rational(1, j)));
        }
        StateSeries out(var, kNegInf, hi);
        for (int j = 0; j <= n; ++j) {
            StateSeries d = body.divided_derivative(n - j);
            StateSeries term = mul_series(E[size_t(j)], d, kNegInf, hi);
            out = out + term;
        }
        return out;
    };
    return f;
}

StateBiSeries nop_two_variable_grid(const EngineConfig& cfg, const Field& F, const Field& G,
                                    const ModuleElement& target, int z_hi, int w_hi) {
    (void)cfg;
    StateBiSeries grid(kVarZ, kVarW, Domain::z_gt_w);
    grid.set_window(kNegInf, z_hi, kNegInf, w_hi);
    // term1: F(z)_+ G(w) target
    StateSeries g = G.act(target, kVarW, w_hi);
    for (auto& [q, v] : g.coeffs()) {
        StateSeries az = F.act(v, kVarZ, z_hi).plus_part();
        for (auto& [p, u] : az.coeffs()) grid.add_to(p, q, u);
    }
    // term2: G(w) F(z)_- target
    StateSeries a_minus = F.act(target, kVarZ, -1);
    for (auto& [p, v] : a_minus.coeffs()) {
        if (p >= 0) continue;
        StateSeries bw = G.act(v, kVarW, w_hi);
        for (auto& [q, u] : bw.coeffs()) grid.add_to(p, q, u);
    }
    return grid;
}

Field nop_field(const EngineConfig& cfg, const Field& F, const Field& G) {
    Field f;
    f.fams = F.fams.united(G.fams);
    Field Fc = F, Gc = G;
    f.act = [cfg, Fc, Gc](const ModuleElement& target, int var, int hi) {
        // Size the windows so the diagonal through `hi` is complete.
        StateSeries a_minus = Fc.act(target, kVarZ, -1);
        int p_min = std::min(a_minus.support_min(), 0);
        StateSeries g = Gc.act(target, kVarW, hi - p_min);
        int q_min = std::min(g.support_min(), 0);
        StateBiSeries grid = nop_two_variable_grid(cfg, Fc, Gc, target, hi - q_min, hi - p_min);
        return diagonal_restriction(grid, var, kNegInf, hi);
    };
    return f;
}

StateBiSeries field_compose(const EngineConfig& cfg, const Field& f1, const Field& f2,
                            const ModuleElement& probe, int z_hi, int w_hi) {
    (void)cfg;
    StateSeries inner = f2.act(probe, kVarW, w_hi);
    StateBiSeries grid(kVarZ, kVarW, Domain::z_gt_w);
    grid.set_window(kNegInf, z_hi, kNegInf, w_hi);
    for (auto& [q, v] : inner.coeffs()) {
        StateSeries outer = f1.act(v, kVarZ, z_hi);
        for (auto& [p, u] : outer.coeffs()) grid.add_to(p, q, u);
    }
    return grid;
}

StateBiSeries grid_sub(const StateBiSeries& a, const StateBiSeries& b) {
    StateBiSeries out(a.var1(), a.var2(), a.domain());
    out.set_window(std::max(a.lo1(), b.lo1()), std::min(a.hi1(), b.hi1()), std::max(a.lo2(), b.lo2()),
                   std::min(a.hi2(), b.hi2()));
    for (auto& [pq, c] : a.coeffs())
        if (out.known(pq.first, pq.second)) out.add_to(pq.first, pq.second, c);
    for (auto& [pq, c] : b.coeffs())
        if (out.known(pq.first, pq.second)) out.add_to(pq.first, pq.second, c.scaled(Rational(-1)));
    return out;
}

std::pair<StateBiSeries, StateBiSeries> twisted_orderings(const EngineConfig& cfg, const Field& f1,
                                                          const Field& f2, const ModuleElement& probe,
                                                          int z_hi, int w_hi) {
    // t1 = E1 * F1(z) F2(w) probe with E1 = e^{-f(z-w)}|z|>|w| e^{f(z;S1,S2)}.
    // E1 carries z-poles, so the composition must be computed above z_hi by
    // the depth of E1's support before the windowed product.
    StateSeries inner2 = f2.act(probe, kVarW, w_hi);
    int w_cap = w_hi - std::min(inner2.support_min(), 0);
    ScalarBiSeries E1 =
        exp_ratio_series(cfg, f1.fams, f2.fams, kVarZ, kVarW, Domain::z_gt_w, w_cap, false, true);
    int z_int = z_hi - std::min(E1.support_min1(), 0);
    StateBiSeries comp1(kVarZ, kVarW, Domain::z_gt_w);
    comp1.set_window(kNegInf, z_int, kNegInf, w_hi);
    for (auto& [q, v] : inner2.coeffs()) {
        StateSeries outer = f1.act(v, kVarZ, z_int);
        for (auto& [p, u] : outer.coeffs()) comp1.add_to(p, q, u);
    }
    StateBiSeries t1 = mul_biseries(E1, comp1, kNegInf, z_hi, kNegInf, w_hi);

    // t2 = E2 * F2(w) F1(z) probe, mirrored.
    StateSeries inner1 = f1.act(probe, kVarZ, z_hi);
    int z_cap = z_hi - std::min(inner1.support_min(), 0);
    ScalarBiSeries E2 =
        exp_ratio_series(cfg, f2.fams, f1.fams, kVarW, kVarZ, Domain::w_gt_z, z_cap, false, false);
    int w_int = w_hi - std::min(E2.support_min2(), 0);
    StateBiSeries comp2(kVarZ, kVarW, Domain::w_gt_z);
    comp2.set_window(kNegInf, z_hi, kNegInf, w_int);
    for (auto& [p, v] : inner1.coeffs()) {
        StateSeries outer = f2.act(v, kVarW, w_int);
        for (auto& [q, u] : outer.coeffs()) comp2.add_to(p, q, u);
    }
    StateBiSeries t2 = mul_biseries(E2, comp2, kNegInf, z_hi, kNegInf, w_hi);
    return {t1, t2};
}

StateBiSeries field_bracket(const EngineConfig& cfg, const Field& f1, const Field& f2,
                            const ModuleElement& probe, int z_hi, int w_hi) {
    auto [t1, t2] = twisted_orderings(cfg, f1, f2, probe, z_hi, w_hi);
    return grid_sub(t1, t2);
}

std::optional<int> locality_order(const EngineConfig& cfg, const Field& f1, const Field& f2,
                                  const ModuleElement& probe, int z_hi, int w_hi, int n_max) {
    StateBiSeries br = field_bracket(cfg, f1, f2, probe, z_hi, w_hi);
    for (int N = 0; N <= n_max; ++N) {
        if (mul_zw_power(br, N).is_zero_on_window()) return N;
    }
    return std::nullopt;
}

TwistedBiSeries compose_act(const EngineConfig& cfg, const ModuleElement& A, const ModuleElement& B,
                            const ModuleElement& C, Domain dom, int z_hi, int w_hi) {
    FamilySet fa = A.families(), fb = B.families(), fc = C.families();
    if (!fa.disjoint(fb) || !fa.disjoint(fc) || !fb.disjoint(fc))
        throw std::invalid_argument("compose_act: families must be pairwise disjoint");
    if (dom == Domain::z_gt_w) {
        StateBiSeries grid = field_compose(cfg, state_field(cfg, A), state_field(cfg, B), C, z_hi, w_hi);
        PrefactorTag tag =
            PrefactorTag::of(kVarZ, fa, fb.united(fc)) + PrefactorTag::of(kVarW, fb, fc);
        return TwistedBiSeries{tag, grid};
    }
    if (dom == Domain::w_gt_z) {
        StateSeries inner = y_body(cfg, A, C, kVarZ, z_hi);
        StateBiSeries grid(kVarZ, kVarW, Domain::w_gt_z);
        grid.set_window(kNegInf, z_hi, kNegInf, w_hi);
        for (auto& [p, v] : inner.coeffs()) {
            StateSeries outer = y_body(cfg, B, v, kVarW, w_hi);
            for (auto& [q, u] : outer.coeffs()) grid.add_to(p, q, u);
        }
        PrefactorTag tag =
            PrefactorTag::of(kVarW, fb, fa.united(fc)) + PrefactorTag::of(kVarZ, fa, fc);
        return TwistedBiSeries{tag, grid};
    }
    throw std::invalid_argument("compose_act: unsupported domain");
}

TwistedBiSeries twisted_bracket_act(const EngineConfig& cfg, const ModuleElement& A,
                                    const ModuleElement& B, const ModuleElement& C, int z_hi,
                                    int w_hi) {
    FamilySet fa = A.families(), fb = B.families(), fc = C.families();
    if (!fa.disjoint(fb) || !fa.disjoint(fc) || !fb.disjoint(fc))
        throw std::invalid_argument("twisted_bracket_act: families must be pairwise disjoint");
    StateBiSeries diff = field_bracket(cfg, state_field(cfg, A), state_field(cfg, B), C, z_hi, w_hi);
    PrefactorTag tag = PrefactorTag::of(kVarZ, fa, fc) + PrefactorTag::of(kVarW, fb, fc);
    return TwistedBiSeries{tag, diff};
}

StateSeries exp_zT(const EngineConfig& cfg, const ModuleElement& v, int hi) {
    StateSeries out(kVarZ, kNegInf, hi);
    ModuleElement cur = v;
    Rational fact = 1;
    for (int n = 0; n <= hi; ++n) {
        if (n > 0) {
            cur = apply_T(cfg, cur);
            fact *= n;
        }
        if (cur.is_zero()) break;
        out.add_to(n, cur.scaled(Rational(1) / fact));
    }
    return out;
}

StateSeries apply_exp_T(const EngineConfig& cfg, const StateSeries& s, int hi) {
    StateSeries out(s.var(), kNegInf, std::min(hi, s.hi()));
    for (auto& [p, v] : s.coeffs()) {
        ModuleElement cur = v;
        Rational fact = 1;
        for (int n = 0; p + n <= std::min(hi, s.hi()); ++n) {
            if (n > 0) {
                cur = apply_T(cfg, cur);
                fact *= n;
            }
            if (cur.is_zero()) break;
            out.add_to(p + n, cur.scaled(Rational(1) / fact));
        }
    }
    return out;
}

}  // namespace iva
