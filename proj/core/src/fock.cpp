#include "iva/fock.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace iva {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (int p : parts_)
        if (p <= 0) throw std::invalid_argument("partition parts must be positive");
    std::sort(parts_.begin(), parts_.end(), std::greater<int>());
}

int Partition::weight() const {
    int w = 0;
    for (int p : parts_) w += p;
    return w;
}

Partition Partition::with_part(int n) const {
    Partition out = *this;
    auto it = std::lower_bound(out.parts_.begin(), out.parts_.end(), n, std::greater<int>());
    out.parts_.insert(it, n);
    return out;
}

Partition Partition::without_index(size_t i) const {
    Partition out = *this;
    out.parts_.erase(out.parts_.begin() + i);
    return out;
}

std::vector<Partition> partitions_of(int w) {
    std::vector<Partition> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int rem, int maxpart) {
        if (rem == 0) {
            out.emplace_back(cur);
            return;
        }
        for (int p = std::min(rem, maxpart); p >= 1; --p) {
            cur.push_back(p);
            rec(rem - p, p);
            cur.pop_back();
        }
    };
    rec(w, w);
    return out;
}

std::vector<Partition> partitions_up_to(int w) {
    std::vector<Partition> out;
    for (int k = 0; k <= w; ++k) {
        auto ps = partitions_of(k);
        out.insert(out.end(), ps.begin(), ps.end());
    }
    return out;
}

ModuleElement ModuleElement::basis_state(FamilySet fams, const Partition& p, LocalizedPoly coeff) {
    ModuleElement v;
    v.families_ = fams;
    if (!coeff.is_zero()) v.terms_.emplace(p, std::move(coeff));
    return v;
}

int ModuleElement::max_weight() const {
    int w = 0;
    for (auto& [p, c] : terms_) w = std::max(w, p.weight());
    return w;
}

void ModuleElement::add_term(const Partition& p, const LocalizedPoly& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(p);
    if (it == terms_.end()) {
        terms_.emplace(p, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

namespace {
void require_same_families(const ModuleElement& a, const ModuleElement& b) {
    if (!a.is_zero() && !b.is_zero() && a.families() != b.families())
        throw std::invalid_argument("module elements over different coherent families");
}
}  // namespace

ModuleElement ModuleElement::operator+(const ModuleElement& o) const {
    require_same_families(*this, o);
    ModuleElement out = is_zero() ? o : *this;
    if (is_zero() || o.is_zero()) return out;
    for (auto& [p, c] : o.terms_) out.add_term(p, c);
    if (out.terms_.empty()) out.families_ = FamilySet{};
    return out;
}

ModuleElement ModuleElement::operator-(const ModuleElement& o) const { return *this + (-o); }

ModuleElement ModuleElement::operator-() const {
    ModuleElement out = *this;
    for (auto& [p, c] : out.terms_) c = -c;
    return out;
}

ModuleElement ModuleElement::scaled(const LocalizedPoly& c) const {
    ModuleElement out;
    out.families_ = families_;
    if (c.is_zero()) return out;
    for (auto& [p, k] : terms_) out.add_term(p, k * c);
    return out;
}

ModuleElement ModuleElement::scaled(const Rational& c) const { return scaled(LocalizedPoly(c)); }

std::string ModuleElement::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [p, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        std::string cs = c.to_string();
        bool trivial = (cs == "1");
        if (!trivial) {
            bool need_paren = cs.find(' ') != std::string::npos || c.pole_order() > 0;
            os << (need_paren ? "(" + cs + ")" : cs) << " * ";
        }
        for (int n : p.parts()) os << "a(-" << n << ") ";
        if (families_.empty()) os << "vac";
        else os << "coh[" << families_.name() << "]";
    }
    return os.str();
}

GradedPoly coherent_eigenvalue(const EngineConfig& cfg, FamilySet fams, int n) {
    GradedPoly out;
    if (n < 1 || n > cfg.r) return out;
    for (Family f : fams.members()) out += GradedPoly::var(f, n);
    return out;
}

ModuleElement apply_a(const EngineConfig& cfg, int n, const ModuleElement& v) {
    ModuleElement out;
    if (n == 0 || v.is_zero()) return out;
    if (n < 0) {
        ModuleElement acc = ModuleElement::basis_state(v.families(), Partition{}, LocalizedPoly{});
        for (auto& [p, c] : v.terms()) acc.add_term(p.with_part(-n), c);
        return acc;
    }
    // n > 0: commute rightward. [a_n, a_{-m}] = 2*kappa*n*delta_{n,m}.
    ModuleElement acc = ModuleElement::basis_state(v.families(), Partition{}, LocalizedPoly{});
    GradedPoly eig = coherent_eigenvalue(cfg, v.families(), n);
    Rational contraction = 2 * cfg.kappa * n;
    for (auto& [p, c] : v.terms()) {
        for (size_t i = 0; i < p.size(); ++i) {
            if (p.parts()[i] == n) acc.add_term(p.without_index(i), c * contraction);
        }
        if (!eig.is_zero()) acc.add_term(p, c * eig);
    }
    return acc;
}

ModuleElement apply_word(const EngineConfig& cfg, const Partition& word, const ModuleElement& v) {
    ModuleElement out = v;
    for (auto it = word.parts().rbegin(); it != word.parts().rend(); ++it)
        out = apply_a(cfg, -*it, out);
    return out;
}

ModuleElement apply_T(const EngineConfig& cfg, const ModuleElement& v) {
    // [T, a_{-m}] = m a_{-m-1};  T|coh> = sum_j (family vars at j) a_{-j-1}|coh>.
    ModuleElement acc = ModuleElement::basis_state(v.families(), Partition{}, LocalizedPoly{});
    for (auto& [p, c] : v.terms()) {
        for (size_t i = 0; i < p.size(); ++i) {
            int m = p.parts()[i];
            acc.add_term(p.without_index(i).with_part(m + 1), c * Rational(m));
        }
        for (int j = 1; j <= cfg.r; ++j) {
            GradedPoly eig = coherent_eigenvalue(cfg, v.families(), j);
            if (!eig.is_zero()) acc.add_term(p.with_part(j + 1), c * eig);
        }
    }
    return acc;
}

ModuleElement derive_coefficients(Family fam, int j, const ModuleElement& v) {
    ModuleElement acc = ModuleElement::basis_state(v.families(), Partition{}, LocalizedPoly{});
    ParamVar var{fam, j};
    for (auto& [p, c] : v.terms()) acc.add_term(p, c.derive(var));
    return acc;
}

ModuleElement apply_dlam(const EngineConfig& cfg, Family fam, int j, const ModuleElement& v) {
    if (j < 1 || j > cfg.r) throw std::invalid_argument("apply_dlam: index out of range");
    if (!v.is_zero() && !v.families().contains(fam))
        throw std::invalid_argument("apply_dlam: family not active on this element");
    ModuleElement acc = derive_coefficients(fam, j, v);
    // (1/2 kappa j) a_{-j} on each coherent term
    Rational s = Rational(1) / (2 * cfg.kappa * j);
    for (auto& [p, c] : v.terms()) acc.add_term(p.with_part(j), c * s);
    return acc;
}

ModuleElement restrict_param(const EngineConfig& cfg, const ModuleElement& v, Family fam,
                             const std::vector<Rational>& point) {
    FamilySet fams = v.families();
    fams.erase(fam);
    ModuleElement acc = ModuleElement::basis_state(fams, Partition{}, LocalizedPoly{});
    for (auto& [p, c] : v.terms()) acc.add_term(p, c.eval_family(fam, point));
    return acc;
}

ModuleElement retag(const ModuleElement& v, FamilySet extra) {
    if (v.is_zero() || extra.empty()) {
        if (!v.families().disjoint(extra)) throw std::invalid_argument("retag: family collision");
        ModuleElement out = v;
        return out;
    }
    if (!v.families().disjoint(extra)) throw std::invalid_argument("retag: family collision");
    ModuleElement acc = ModuleElement::basis_state(v.families().united(extra), Partition{}, LocalizedPoly{});
    for (auto& [p, c] : v.terms()) acc.add_term(p, c);
    return acc;
}

ModuleElement truncate_degree(const ModuleElement& v, int cap) {
    if (cap >= kNoDegreeCap) return v;
    ModuleElement acc = ModuleElement::basis_state(v.families(), Partition{}, LocalizedPoly{});
    for (auto& [p, c] : v.terms()) {
        if (c.pole_order() != 0) {
            acc.add_term(p, c);
            continue;
        }
        acc.add_term(p, LocalizedPoly(c.numerator().truncated_degree(cap)));
    }
    return acc;
}

StateMetrics state_metrics(const ModuleElement& v) {
    StateMetrics m;
    m.term_count = v.terms().size();
    std::set<int> grades;
    bool level_set = false;
    for (auto& [p, c] : v.terms()) {
        for (int d : c.weighted_degrees()) {
            grades.insert(p.weight() + d);
            int level = -d;
            if (!level_set || level < m.filtration_level) {
                m.filtration_level = level;
                level_set = true;
            }
        }
    }
    m.grades.assign(grades.begin(), grades.end());
    if (grades.size() == 1) m.grade = *grades.begin();
    if (!level_set) m.filtration_level = 0;
    return m;
}

}  // namespace iva
