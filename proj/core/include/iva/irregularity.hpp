#pragma once

#include <map>
#include <string>

#include "iva/graded_poly.hpp"
#include "iva/params.hpp"

namespace iva {

// f(z; L, R) = sum_{k} c_k(L,R) z^{-k}, 2 <= k <= 2r, with c_k bilinear of
// weighted degree -k. Additivity in each slot is structural (the slot is a
// family set and coefficients are sums over its members).
class Irregularity {
  public:
    Irregularity() = default;

    static Irregularity f_kappa(const EngineConfig& cfg, FamilySet left, FamilySet right);

    FamilySet left() const { return left_; }
    FamilySet right() const { return right_; }
    const std::map<int, GradedPoly>& coeffs() const { return coeffs_; }
    GradedPoly coeff(int k) const;
    bool is_zero() const { return coeffs_.empty(); }
    int max_pole() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

    // d/dz as a map k -> coefficient of z^{-k} (i.e. poles shift by one).
    std::map<int, GradedPoly> derivative_coeffs() const;

    std::string to_string() const;

  private:
    FamilySet left_, right_;
    std::map<int, GradedPoly> coeffs_;  // k -> c_k, no zero entries
};

// The engine irregularity on the canonical (lam, mu) pair, with the
// construction checks (skew symmetry, additivity, degree-zero) enforced.
Irregularity irregularity_f(const EngineConfig& cfg);

// --- prefactor bookkeeping -------------------------------------------------

// One exponential factor e^{f(parity * var; a, b)} with a < b canonical
// (skew symmetry folds the swapped slot order into the parity).
struct TagAtom {
    int var;  // variable id
    Family a, b;
    int parity;  // +1 or -1 applied to the variable

    friend auto operator<=>(const TagAtom&, const TagAtom&) = default;
};

// Formal product of exponential prefactors. Multi-family slots are split by
// additivity into single-family atoms at construction.
class PrefactorTag {
  public:
    PrefactorTag() = default;

    static PrefactorTag of(int var, FamilySet left, FamilySet right, int parity = 1);

    bool empty() const { return atoms_.empty(); }
    const std::map<TagAtom, int>& atoms() const { return atoms_; }

    PrefactorTag operator+(const PrefactorTag& o) const;  // product of exponentials
    PrefactorTag operator-(const PrefactorTag& o) const;  // division; counts must stay >= 0
    friend bool operator==(const PrefactorTag&, const PrefactorTag&) = default;

    std::string to_string(const EngineConfig& cfg) const;

  private:
    std::map<TagAtom, int> atoms_;  // atom -> multiplicity > 0
};

}  // namespace iva
