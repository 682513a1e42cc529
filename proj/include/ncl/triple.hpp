// Lorentzian spectral triple truncations and the axiom verifier.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ncl/linalg.hpp"

namespace ncl {

// ---------------------------------------------------------------- basis

// Four integer slots. Torus: (n, m, spin, 0). Sphere: (2l, 2m, 2n, spin).
// SU_q(2): (2j, 2mu, 2n, spin). spin 0 = +/up, 1 = -/down.
struct Label {
    int a = 0, b = 0, c = 0, s = 0;
    bool operator==(const Label& o) const { return a == o.a && b == o.b && c == o.c && s == o.s; }
    bool operator<(const Label& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        if (c != o.c) return c < o.c;
        return s < o.s;
    }
};

struct LabelHash {
    size_t operator()(const Label& l) const {
        size_t h = static_cast<size_t>(l.a) * 0x9E3779B97F4A7C15ULL;
        h ^= static_cast<size_t>(l.b) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
        h ^= static_cast<size_t>(l.c) + 0x94D049BB133111EBULL + (h << 6) + (h >> 2);
        h ^= static_cast<size_t>(l.s) + (h << 6) + (h >> 2);
        return h;
    }
};

class Basis {
public:
    Basis() = default;
    explicit Basis(std::vector<Label> labels);
    int size() const { return static_cast<int>(labels_.size()); }
    const Label& operator[](int i) const { return labels_[static_cast<size_t>(i)]; }
    const std::vector<Label>& labels() const { return labels_; }
    // -1 when absent
    int find(const Label& l) const;

private:
    std::vector<Label> labels_;
    std::unordered_map<Label, int, LabelHash> index_;
};

// Collects an operator column by column on a basis. Targets outside the
// basis are dropped and flag the source column as leaking.
class Assembler {
public:
    explicit Assembler(const Basis& b) : basis_(&b), leak_(static_cast<size_t>(b.size()), 0) {}
    void add(int col, const Label& target, cplx v);
    void add_index(int col, int row, cplx v) { t_.push_back({row, col, v}); }
    LinOp finish() const { return LinOp::from_triplets(basis_->size(), t_); }
    const std::vector<char>& leak() const { return leak_; }

private:
    const Basis* basis_;
    std::vector<Triplet> t_;
    std::vector<char> leak_;
};

// Operator built on an enlarged basis, restricted to the window.
struct Restricted {
    LinOp op;
    std::vector<char> leak;  // column image leaves the window
};
Restricted restrict_to(const LinOp& ext, const Basis& ext_basis, const Basis& window);

// level 0 = some hopping operator leaks; otherwise 1 + min level of images
std::vector<int> compute_levels(const std::vector<const LinOp*>& hops,
                                const std::vector<std::vector<char>>& leaks, int cap);

struct TruncationDescriptor {
    Basis basis;
    std::vector<int> level;
    std::string generation;  // human readable window description
    int level_cap = 8;
    std::vector<char> mask(int depth) const;
    int count(int depth) const;
};

// --------------------------------------------------------------- signs

struct SignatureSigns {
    int epsilon = 1;
    int epsilon_prime = 1;
    std::optional<int> epsilon_dprime;
};

class SignError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

SignatureSigns sign_table(int p, int q);

// --------------------------------------------------------------- bundle

struct SymmetryGenerator {
    std::string name;
    LinOp op;
    // for diagonal derivations: [rho, pi(x)] = charge * pi(x)
    std::map<std::string, double> charges;
};

struct TripleBundle {
    std::string geometry;
    std::vector<std::pair<std::string, LinOp>> generators;
    LinOp dirac;
    std::optional<LinOp> grading;
    LinOp krein;
    AntiLinOp reality;
    SignatureSigns signs;
    int p = 1, q = 1;
    TruncationDescriptor truncation;
    std::vector<SymmetryGenerator> symmetry;
    // non-hopping operators that leak or change level; must stay empty
    std::vector<std::string> truncation_defects;

    int dim() const { return dirac.dim(); }
    const LinOp& gen(const std::string& name) const;
    bool has_gen(const std::string& name) const;
};

// ---------------------------------------------------------------- reports

struct AxiomCheck {
    std::string name;
    double violation = 0.0;
    double threshold = 0.0;
    bool asserted = true;
    bool pass = true;
    std::string note;
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;
    void add(AxiomCheck c);
    void append(const AxiomReport& o);
    bool all_asserted_pass() const;
    const AxiomCheck* find(const std::string& name) const;
};

// relative tolerance of every check; the CLI may override it
inline double rel_tol = 1e-10;

// op norm of X restricted to columns at the given level depth
double interior_norm(const LinOp& x, const TruncationDescriptor& t, int depth);
AxiomCheck make_check(std::string name, double violation, double scale, bool asserted = true,
                      std::string note = {});

// scale used for D-dependent thresholds
double dirac_scale(const TripleBundle& b);

AxiomReport check_truncation(const TripleBundle& b);
// alg_commutation_asserted: exact [beta, pi] for torus/sphere; false for SU_q(2)
AxiomReport check_krein(const TripleBundle& b, bool alg_commutation_asserted = true, bool j_asserted = true);
AxiomReport check_reality(const TripleBundle& b, bool asserted = true);
AxiomReport check_dirac(const TripleBundle& b);
AxiomCheck check_order_one(const TripleBundle& b, bool asserted = true);
AxiomReport check_equivariance(const TripleBundle& b);

struct TimeTerm {
    std::string left;  // algebra element placed as J x J^{-1}; "1" for identity
    std::string a;
    std::string b;
    cplx coefficient;
};
LinOp time_orientation_form(const TripleBundle& b, const std::vector<TimeTerm>& terms);
AxiomCheck check_time_orientation(const TripleBundle& b, const std::vector<TimeTerm>& terms,
                                  bool asserted = true);

// ⟨D⟩ through block-wise Hermitian diagonalization
LinOp abs_dirac(const TripleBundle& b, double neg_tol = 1e-9);
LinOp abs_of(const LinOp& d, double neg_tol = 1e-9);
// eigenvalues of ⟨D⟩ (all basis vectors), ascending
std::vector<double> abs_dirac_eigenvalues(const LinOp& d, double neg_tol = 1e-9);
// connected components of the symmetric sparsity pattern
std::vector<std::vector<int>> components(const LinOp& m);

using BundleFactory = std::function<TripleBundle(int)>;

struct CountingTable {
    std::vector<int> sizes;
    std::vector<double> lambdas;
    std::vector<std::vector<long>> counts;  // [size][lambda]
    std::string verdict;  // compact-consistent / non-compact-consistent / inconclusive
};
CountingTable compact_resolvent_probe(const BundleFactory& f, const std::vector<int>& sizes,
                                      const std::vector<double>& lambdas);

struct LadderRow {
    std::string generator;
    std::vector<double> norms;  // one per size
    double max_growth = 0.0;    // per doubling of the size
};
struct LadderReport {
    std::string quantity;
    std::vector<int> sizes;
    std::vector<LadderRow> rows;
    double growth_limit = 0.05;
    bool pass = true;
};
// quantity "dirac": ||[D, pi(x)]||, "regularity": ||[⟨D⟩, [D, pi(x)]]||.
LadderReport boundedness_ladder(const BundleFactory& f, const std::vector<int>& sizes,
                                const std::string& quantity, double growth_limit = 0.05);
AxiomCheck ladder_check(const LadderReport& r);

// full suite used by CLI and tests
struct SuiteOptions {
    bool krein_alg_asserted = true;
    bool reality_asserted = true;
    bool order_one_asserted = true;
    std::vector<TimeTerm> time_terms;
    bool time_asserted = true;
};
AxiomReport run_suite(const TripleBundle& b, const SuiteOptions& o);

}  // namespace ncl
