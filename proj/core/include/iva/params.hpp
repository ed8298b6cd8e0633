#pragma once

#include <array>
#include <limits>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "iva/rational.hpp"

namespace iva {

enum class Family : uint8_t { lam = 0, mu = 1, nu = 2 };

inline constexpr std::array<Family, 3> kFamilies{Family::lam, Family::mu, Family::nu};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::lam: return "lam";
        case Family::mu: return "mu";
        case Family::nu: return "nu";
    }
    return "?";
}

inline const char* family_latex(Family f) {
    switch (f) {
        case Family::lam: return "\\lambda";
        case Family::mu: return "\\mu";
        case Family::nu: return "\\nu";
    }
    return "?";
}

// Small set of parameter families carried by a coherent state or an
// irregularity slot. Empty set = the plain (vacuum-based) Fock space.
class FamilySet {
  public:
    FamilySet() = default;
    explicit FamilySet(Family f) : bits_(uint8_t(1u << uint8_t(f))) {}
    static FamilySet of(std::initializer_list<Family> fs) {
        FamilySet s;
        for (Family f : fs) s.insert(f);
        return s;
    }

    bool contains(Family f) const { return bits_ & (1u << uint8_t(f)); }
    bool empty() const { return bits_ == 0; }
    int size() const { return __builtin_popcount(bits_); }
    void insert(Family f) { bits_ |= uint8_t(1u << uint8_t(f)); }
    void erase(Family f) { bits_ &= uint8_t(~(1u << uint8_t(f))); }
    bool disjoint(FamilySet o) const { return (bits_ & o.bits_) == 0; }

    FamilySet united(FamilySet o) const {
        FamilySet s;
        s.bits_ = bits_ | o.bits_;
        return s;
    }

    std::vector<Family> members() const {
        std::vector<Family> out;
        for (Family f : kFamilies)
            if (contains(f)) out.push_back(f);
        return out;
    }

    std::string name() const {
        std::string s;
        for (Family f : members()) {
            if (!s.empty()) s += "+";
            s += family_name(f);
        }
        return s;
    }

    friend auto operator<=>(FamilySet a, FamilySet b) = default;

  private:
    uint8_t bits_ = 0;
};

struct ParamVar {
    Family fam;
    int idx;  // 1..r, weighted degree -idx

    friend auto operator<=>(const ParamVar&, const ParamVar&) = default;
};

inline std::string var_name(ParamVar v) { return std::string(family_name(v.fam)) + std::to_string(v.idx); }

// Deliberate single-site defect injection, used by the mutation-sensitivity
// checks to prove the suites are not vacuous.
enum class Mutation : uint8_t {
    none = 0,
    flip_rho_sign_in_virasoro_modes,  // L_n gets +rho(n+1)a_n instead of -rho(n+1)a_n
    flip_irregularity_binomial,       // the (p,q)=(1,1) coefficient of f flips sign
};

inline constexpr int kNoDegreeCap = std::numeric_limits<int>::max() / 4;

struct EngineConfig {
    int r = 1;
    Rational kappa = Rational(1, 2);
    Rational rho = Rational(0);
    Mutation mutation = Mutation::none;
    // Exactness scope for parameter polynomials: monomials of weighted-degree
    // magnitude beyond the cap are dropped. Since every parameter monomial has
    // non-positive weighted degree, the cap is multiplicatively consistent:
    // results are exact in all monomials within the cap. Default: fully exact.
    int param_degree_cap = kNoDegreeCap;

    EngineConfig() = default;
    EngineConfig(int r_, Rational kappa_, Rational rho_ = Rational(0)) : r(r_), kappa(std::move(kappa_)), rho(std::move(rho_)) {
        validate();
    }

    void validate() const {
        if (r <= 0) throw std::invalid_argument("r must be positive");
        if (kappa == 0) throw std::invalid_argument("kappa must be nonzero");
    }

    Rational central_charge() const { return Rational(1) - 12 * rho * rho; }

    void require_conformal_kappa() const {
        if (kappa != Rational(1, 2)) throw std::invalid_argument("operation requires kappa = 1/2");
    }
};

}  // namespace iva
