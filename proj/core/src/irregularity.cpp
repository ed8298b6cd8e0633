#include "iva/irregularity.hpp"

#include <sstream>
#include <stdexcept>

namespace iva {

Irregularity Irregularity::f_kappa(const EngineConfig& cfg, FamilySet left, FamilySet right) {
    if (!left.disjoint(right)) throw std::invalid_argument("irregularity slots must be disjoint");
    Irregularity f;
    f.left_ = left;
    f.right_ = right;
    if (left.empty() || right.empty()) return f;  // f(z; lam, 0) = 0
    for (int p = 1; p <= cfg.r; ++p) {
        for (int q = 1; q <= cfg.r; ++q) {
            // (1/2kappa) binom(p+q, p) (-1)^{p+1}/(p+q) lam_p mu_q z^{-(p+q)}
            Rational c = Rational(binomial(p + q, p)) * Rational(((p + 1) % 2 == 0) ? 1 : -1, p + q) /
                         (2 * cfg.kappa);
            if (cfg.mutation == Mutation::flip_irregularity_binomial && p == 1 && q == 1) c = -c;
            GradedPoly bil;
            for (Family fa : left.members())
                for (Family fb : right.members())
                    bil += GradedPoly::var(fa, p) * GradedPoly::var(fb, q);
            auto& slot = f.coeffs_[p + q];
            slot += bil * c;
            if (slot.is_zero()) f.coeffs_.erase(p + q);
        }
    }
    return f;
}

GradedPoly Irregularity::coeff(int k) const {
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? GradedPoly{} : it->second;
}

std::map<int, GradedPoly> Irregularity::derivative_coeffs() const {
    // d/dz sum c_k z^{-k} = sum (-k) c_k z^{-k-1}
    std::map<int, GradedPoly> out;
    for (auto& [k, c] : coeffs_) out.emplace(k + 1, c * Rational(-k));
    return out;
}

std::string Irregularity::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.to_string() << ")/z^" << k;
    }
    return os.str();
}

Irregularity irregularity_f(const EngineConfig& cfg) {
    Irregularity f = Irregularity::f_kappa(cfg, FamilySet(Family::lam), FamilySet(Family::mu));
    if (cfg.mutation == Mutation::none) {
        // Construction checks: degree zero, skew symmetry, additivity.
        for (auto& [k, c] : f.coeffs()) {
            if (!(c.is_homogeneous() && c.weighted_degree() == -k))
                throw std::logic_error("irregularity coefficient has wrong weighted degree");
        }
        Irregularity g = Irregularity::f_kappa(cfg, FamilySet(Family::mu), FamilySet(Family::lam));
        for (int k = 2; k <= 2 * cfg.r; ++k) {
            GradedPoly lhs = f.coeff(k);
            GradedPoly rhs = g.coeff(k) * Rational((k % 2 == 0) ? 1 : -1);
            if (!(lhs == rhs)) throw std::logic_error("irregularity fails skew symmetry");
        }
        Irregularity sum = Irregularity::f_kappa(cfg, FamilySet::of({Family::lam, Family::mu}), FamilySet(Family::nu));
        Irregularity a = Irregularity::f_kappa(cfg, FamilySet(Family::lam), FamilySet(Family::nu));
        Irregularity b = Irregularity::f_kappa(cfg, FamilySet(Family::mu), FamilySet(Family::nu));
        for (int k = 2; k <= 2 * cfg.r; ++k) {
            if (!(sum.coeff(k) == a.coeff(k) + b.coeff(k)))
                throw std::logic_error("irregularity fails additivity");
        }
    }
    return f;
}

PrefactorTag PrefactorTag::of(int var, FamilySet left, FamilySet right, int parity) {
    PrefactorTag t;
    for (Family fa : left.members()) {
        for (Family fb : right.members()) {
            TagAtom atom{var, fa, fb, parity};
            if (atom.a > atom.b) {
                std::swap(atom.a, atom.b);
                atom.parity = -atom.parity;  // f(z; b, a) = f(-z; a, b)
            }
            t.atoms_[atom] += 1;
        }
    }
    return t;
}

PrefactorTag PrefactorTag::operator+(const PrefactorTag& o) const {
    PrefactorTag t = *this;
    for (auto& [a, n] : o.atoms_) {
        t.atoms_[a] += n;
        if (t.atoms_[a] == 0) t.atoms_.erase(a);
    }
    return t;
}

PrefactorTag PrefactorTag::operator-(const PrefactorTag& o) const {
    PrefactorTag t = *this;
    for (auto& [a, n] : o.atoms_) {
        auto it = t.atoms_.find(a);
        if (it == t.atoms_.end() || it->second < n)
            throw std::invalid_argument("prefactor tag division would go negative");
        it->second -= n;
        if (it->second == 0) t.atoms_.erase(it);
    }
    return t;
}

std::string PrefactorTag::to_string(const EngineConfig& cfg) const {
    (void)cfg;
    if (atoms_.empty()) return "1";
    std::ostringstream os;
    os << "exp(";
    bool first = true;
    for (auto& [a, n] : atoms_) {
        if (!first) os << " + ";
        first = false;
        if (n != 1) os << n << "*";
        os << "f(" << (a.parity < 0 ? "-" : "") << "v" << a.var << ";" << family_name(a.a) << ","
           << family_name(a.b) << ")";
    }
    os << ")";
    return os.str();
}

}  // namespace iva
