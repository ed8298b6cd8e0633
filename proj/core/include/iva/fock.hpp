#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iva/localized_poly.hpp"
#include "iva/params.hpp"

namespace iva {

// Non-increasing sequence of positive integers indexing a_{-n1}...a_{-nk}.
// Empty partition = the bare vacuum / coherent state.
class Partition {
  public:
    Partition() = default;
    explicit Partition(std::vector<int> parts);

    static Partition single(int n) { return Partition({n}); }

    const std::vector<int>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    size_t size() const { return parts_.size(); }
    int weight() const;

    Partition with_part(int n) const;       // insert keeping order
    Partition without_index(size_t i) const;

    friend auto operator<=>(const Partition&, const Partition&) = default;

  private:
    std::vector<int> parts_;
};

// All partitions of weight exactly w / at most w, in deterministic order.
std::vector<Partition> partitions_of(int w);
std::vector<Partition> partitions_up_to(int w);

struct StateMetrics {
    std::optional<int> grade;  // set when all terms share one grade
    std::vector<int> grades;   // per homogeneous component
    int filtration_level = 0;  // min over terms of |parameter degree|
    size_t term_count = 0;
};

// Finite linear combination of basis vectors a_{-n1}...a_{-nk}|coh> with
// LocalizedPoly coefficients. The family set tags the coherent state
// (empty = vacuum-based). Multiple families encode |coh_{lam+mu}>.
class ModuleElement {
  public:
    ModuleElement() = default;

    static ModuleElement vacuum() { return basis_state(FamilySet{}, Partition{}); }
    static ModuleElement coherent(FamilySet fams) { return basis_state(fams, Partition{}); }
    static ModuleElement coherent(Family f) { return basis_state(FamilySet(f), Partition{}); }
    static ModuleElement basis_state(FamilySet fams, const Partition& p,
                                     LocalizedPoly coeff = LocalizedPoly::one());

    bool is_zero() const { return terms_.empty(); }
    FamilySet families() const { return families_; }
    const std::map<Partition, LocalizedPoly>& terms() const { return terms_; }
    int max_weight() const;

    void add_term(const Partition& p, const LocalizedPoly& c);

    ModuleElement operator+(const ModuleElement& o) const;
    ModuleElement operator-(const ModuleElement& o) const;
    ModuleElement operator-() const;
    ModuleElement& operator+=(const ModuleElement& o) { return *this = *this + o; }
    ModuleElement& operator-=(const ModuleElement& o) { return *this = *this - o; }
    ModuleElement scaled(const LocalizedPoly& c) const;
    ModuleElement scaled(const Rational& c) const;
    ModuleElement operator*(const Rational& c) const { return scaled(c); }
    ModuleElement operator*(const LocalizedPoly& c) const { return scaled(c); }
    ModuleElement operator*(const GradedPoly& c) const { return scaled(LocalizedPoly(c)); }

    // Zero is zero regardless of the coherent tag it was computed over.
    friend bool operator==(const ModuleElement& a, const ModuleElement& b) {
        if (a.terms_.empty() && b.terms_.empty()) return true;
        return a.families_ == b.families_ && a.terms_ == b.terms_;
    }

    std::string to_string() const;

  private:
    FamilySet families_;
    std::map<Partition, LocalizedPoly> terms_;
};

// Eigenvalue of a_n (n >= 1) on |coh_F>: sum of the index-n variables of the
// active families, zero beyond r.
GradedPoly coherent_eigenvalue(const EngineConfig& cfg, FamilySet fams, int n);

ModuleElement apply_a(const EngineConfig& cfg, int n, const ModuleElement& v);
// a_{-n1}...a_{-nk} v for a partition word.
ModuleElement apply_word(const EngineConfig& cfg, const Partition& word, const ModuleElement& v);
ModuleElement apply_T(const EngineConfig& cfg, const ModuleElement& v);
// Leibniz action of d/d fam_j; requires the family active on the coherent state.
ModuleElement apply_dlam(const EngineConfig& cfg, Family fam, int j, const ModuleElement& v);
// Coefficient-only derivative (lattice-level helper; no coherent term).
ModuleElement derive_coefficients(Family fam, int j, const ModuleElement& v);
// Evaluate a family at a rational point and delete it from the coherent tag.
ModuleElement restrict_param(const EngineConfig& cfg, const ModuleElement& v, Family fam,
                             const std::vector<Rational>& point);
// Merge extra families onto the coherent state (the e^{phi} twist); families must be disjoint.
ModuleElement retag(const ModuleElement& v, FamilySet extra);

StateMetrics state_metrics(const ModuleElement& v);

// Drop coefficient monomials with parameter degree beyond the cap (only
// meaningful for polynomial coefficients).
ModuleElement truncate_degree(const ModuleElement& v, int cap);

}  // namespace iva
