#include "ncl/triple.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncl/parallel.hpp"

namespace ncl {

// ---------------------------------------------------------------- basis

Basis::Basis(std::vector<Label> labels) : labels_(std::move(labels)) {
    index_.reserve(labels_.size() * 2);
    for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
        auto [it, fresh] = index_.emplace(labels_[i], i);
        if (!fresh) throw std::invalid_argument("Basis: duplicate label");
    }
}

int Basis::find(const Label& l) const {
    auto it = index_.find(l);
    return it == index_.end() ? -1 : it->second;
}

void Assembler::add(int col, const Label& target, cplx v) {
    int r = basis_->find(target);
    if (r < 0) {
        if (v != cplx(0.0)) leak_[col] = 1;
        return;
    }
    t_.push_back({r, col, v});
}

Restricted restrict_to(const LinOp& ext, const Basis& ext_basis, const Basis& window) {
    Restricted out;
    out.leak.assign(static_cast<size_t>(window.size()), 0);
    std::vector<Triplet> t;
    for (int w = 0; w < window.size(); ++w) {
        int e = ext_basis.find(window[w]);
        if (e < 0) throw std::invalid_argument("restrict_to: window not contained in extended basis");
        for (auto& en : ext.col(e)) {
            int r = window.find(ext_basis[en.row]);
            if (r < 0) out.leak[w] = 1;
            else t.push_back({r, w, en.v});
        }
    }
    out.op = LinOp::from_triplets(window.size(), std::move(t));
    return out;
}

std::vector<int> compute_levels(const std::vector<const LinOp*>& hops,
                                const std::vector<std::vector<char>>& leaks, int cap) {
    if (hops.empty()) return {};
    const int n = hops.front()->dim();
    std::vector<int> level(static_cast<size_t>(n), cap);
    for (auto& lk : leaks)
        for (int i = 0; i < n; ++i)
            if (lk[i]) level[i] = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < n; ++v) {
            if (level[v] == 0) continue;
            int lo = cap - 1;
            for (const LinOp* h : hops)
                for (auto& e : h->col(v)) lo = std::min(lo, level[e.row]);
            int nl = std::min(cap, lo + 1);
            if (nl < level[v]) {
                level[v] = nl;
                changed = true;
            }
        }
    }
    return level;
}

std::vector<char> TruncationDescriptor::mask(int depth) const {
    std::vector<char> m(level.size(), 0);
    for (size_t i = 0; i < level.size(); ++i) m[i] = level[i] >= depth ? 1 : 0;
    return m;
}

int TruncationDescriptor::count(int depth) const {
    return static_cast<int>(std::count_if(level.begin(), level.end(), [&](int l) { return l >= depth; }));
}

// --------------------------------------------------------------- signs

SignatureSigns sign_table(int p, int q) {
    if (p != 1) throw SignError("sign_table: only p = 1 is supported");
    static const int eps[8] = {+1, +1, +1, -1, +1, +1, +1, -1};
    static const int epsp[8] = {+1, +1, +1, -1, -1, -1, -1, +1};
    static const int epspp[8] = {+1, 0, -1, 0, +1, 0, -1, 0};
    int k = ((1 - q) % 8 + 8) % 8;
    SignatureSigns s;
    s.epsilon = eps[k];
    s.epsilon_prime = epsp[k];
    if ((1 + q) % 2 == 0) s.epsilon_dprime = epspp[k];
    return s;
}

// --------------------------------------------------------------- bundle

const LinOp& TripleBundle::gen(const std::string& name) const {
    for (auto& [n, op] : generators)
        if (n == name) return op;
    throw std::invalid_argument("unknown generator symbol: " + name);
}

bool TripleBundle::has_gen(const std::string& name) const {
    for (auto& [n, op] : generators)
        if (n == name) return true;
    return false;
}

void AxiomReport::add(AxiomCheck c) { checks.push_back(std::move(c)); }

void AxiomReport::append(const AxiomReport& o) {
    checks.insert(checks.end(), o.checks.begin(), o.checks.end());
}

bool AxiomReport::all_asserted_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return !c.asserted || c.pass; });
}

const AxiomCheck* AxiomReport::find(const std::string& name) const {
    for (auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

double interior_norm(const LinOp& x, const TruncationDescriptor& t, int depth) {
    return op_norm(x.keep_columns(t.mask(depth)));
}

AxiomCheck make_check(std::string name, double violation, double scale, bool asserted, std::string note) {
    AxiomCheck c;
    c.name = std::move(name);
    c.violation = violation;
    c.threshold = rel_tol * std::max(1.0, scale);
    c.asserted = asserted;
    c.pass = std::isfinite(violation) && violation <= c.threshold;
    c.note = std::move(note);
    return c;
}

double dirac_scale(const TripleBundle& b) { return op_norm(b.dirac, 1e-8); }

AxiomReport check_truncation(const TripleBundle& b) {
    AxiomReport r;
    const auto& lv = b.truncation.level;
    long bad = 0;
    auto scan = [&](const LinOp& op) {
        for (int c = 0; c < op.dim(); ++c)
            for (auto& e : op.col(c))
                if (lv[e.row] != lv[c]) ++bad;
    };
    scan(b.dirac);
    scan(b.krein);
    scan(b.reality.linear_part);
    if (b.grading) scan(*b.grading);
    for (auto& s : b.symmetry) scan(s.op);
    std::string note;
    for (auto& d : b.truncation_defects) note += (note.empty() ? "" : "; ") + d;
    AxiomCheck c = make_check("truncation.level_preserving",
                              static_cast<double>(bad + static_cast<long>(b.truncation_defects.size())), 0.0,
                              true, note);
    c.threshold = 0.0;
    c.pass = bad == 0 && b.truncation_defects.empty();
    r.add(c);
    return r;
}

AxiomReport check_krein(const TripleBundle& b, bool alg_commutation_asserted, bool j_asserted) {
    AxiomReport r;
    const auto& t = b.truncation;
    const int n = b.dim();
    const LinOp I = LinOp::identity(n);
    const LinOp& beta = b.krein;
    r.add(make_check("krein.beta_squared", interior_norm(add(compose(beta, beta), I), t, 0), 1.0));
    r.add(make_check("krein.beta_antihermitian", interior_norm(add(beta, adjoint(beta)), t, 0), 1.0));
    if (b.grading)
        r.add(make_check("krein.beta_gamma_anticommute", interior_norm(anticommutator(beta, *b.grading), t, 0), 1.0));
    // beta J + eps^p J beta, p = 1
    const double sgn = std::pow(static_cast<double>(b.signs.epsilon), b.p);
    LinOp bj = linear_times_antilinear(beta, b.reality);
    LinOp jb = antilinear_times_linear(b.reality, beta);
    r.add(make_check("krein.beta_J", interior_norm(add(bj, jb, 1.0, sgn), t, 0), 1.0, j_asserted,
                     j_asserted ? "" : "reported only"));
    double worst = 0.0;
    for (auto& [name, op] : b.generators) worst = std::max(worst, interior_norm(commutator(beta, op), t, 1));
    r.add(make_check("krein.beta_commutes_with_algebra", worst, 1.0, alg_commutation_asserted,
                     alg_commutation_asserted ? "" : "reported only"));
    return r;
}

AxiomReport check_reality(const TripleBundle& b, bool asserted) {
    AxiomReport r;
    const auto& t = b.truncation;
    const int n = b.dim();
    const LinOp I = LinOp::identity(n);
    const std::string note = asserted ? "" : "reported only";
    LinOp j2 = antilinear_square(b.reality);
    r.add(make_check("reality.J_squared", interior_norm(add(j2, I, 1.0, -double(b.signs.epsilon_prime)), t, 0), 1.0,
                     asserted, note));
    if (b.grading && b.signs.epsilon_dprime) {
        LinOp jg = antilinear_times_linear(b.reality, *b.grading);
        LinOp gj = linear_times_antilinear(*b.grading, b.reality);
        r.add(make_check("reality.J_gamma", interior_norm(add(jg, gj, 1.0, -double(*b.signs.epsilon_dprime)), t, 0),
                         1.0, asserted, note));
    }
    const double ds = dirac_scale(b);
    LinOp dj = linear_times_antilinear(b.dirac, b.reality);
    LinOp jd = antilinear_times_linear(b.reality, b.dirac);
    r.add(make_check("reality.D_J", interior_norm(add(dj, jd, 1.0, -double(b.signs.epsilon)), t, 0), ds, asserted,
                     note));
    double worst = 0.0;
    for (auto& [na, a] : b.generators) {
        LinOp ja = conj_by_antilinear(b.reality, a);
        for (auto& [nb, bb] : b.generators) worst = std::max(worst, interior_norm(commutator(ja, bb), t, 2));
    }
    r.add(make_check("reality.commutant", worst, 1.0, asserted, note));
    return r;
}

AxiomReport check_dirac(const TripleBundle& b) {
    AxiomReport r;
    const auto& t = b.truncation;
    const double ds = dirac_scale(b);
    LinOp bdb = compose(b.krein, compose(b.dirac, b.krein));
    r.add(make_check("dirac.beta_selfadjoint", interior_norm(sub(adjoint(b.dirac), bdb), t, 0), ds));
    if (b.grading)
        r.add(make_check("dirac.gamma_odd", interior_norm(anticommutator(b.dirac, *b.grading), t, 0), ds));
    return r;
}

AxiomCheck check_order_one(const TripleBundle& b, bool asserted) {
    const auto& t = b.truncation;
    const auto& g = b.generators;
    const int ng = static_cast<int>(g.size());
    std::vector<LinOp> jaj(static_cast<size_t>(ng)), dcom(static_cast<size_t>(ng));
    for (int k = 0; k < ng; ++k) {
        jaj[k] = conj_by_antilinear(b.reality, g[k].second);
        dcom[k] = commutator(b.dirac, g[k].second);
    }
    std::vector<double> v(static_cast<size_t>(ng * ng), 0.0);
    parallel_for(ng * ng, [&](int idx) {
        v[idx] = interior_norm(commutator(jaj[idx / ng], dcom[idx % ng]), t, 2);
    });
    double worst = *std::max_element(v.begin(), v.end());
    return make_check("order_one", worst, dirac_scale(b), asserted, asserted ? "" : "reported only");
}

AxiomReport check_equivariance(const TripleBundle& b) {
    AxiomReport r;
    const auto& t = b.truncation;
    const double ds = dirac_scale(b);
    LinOp ad = abs_dirac(b);
    for (auto& s : b.symmetry) {
        const double rs = std::max(1.0, op_norm(s.op, 1e-8));
        r.add(make_check("equivariance." + s.name + ".D", interior_norm(commutator(s.op, b.dirac), t, 0), rs * ds));
        r.add(make_check("equivariance." + s.name + ".absD", interior_norm(commutator(s.op, ad), t, 0), rs * ds));
        r.add(make_check("equivariance." + s.name + ".beta", interior_norm(commutator(s.op, b.krein), t, 0), rs));
        if (b.grading)
            r.add(make_check("equivariance." + s.name + ".gamma", interior_norm(commutator(s.op, *b.grading), t, 0),
                             rs));
        for (auto& [gname, charge] : s.charges) {
            const LinOp& x = b.gen(gname);
            LinOp d = add(commutator(s.op, x), x, 1.0, -charge);
            r.add(make_check("equivariance." + s.name + ".pi(" + gname + ")", interior_norm(d, t, 1), rs));
        }
    }
    return r;
}

LinOp time_orientation_form(const TripleBundle& b, const std::vector<TimeTerm>& terms) {
    LinOp sum = LinOp::zero(b.dim());
    for (auto& term : terms) {
        LinOp piece = compose(b.gen(term.a), commutator(b.dirac, b.gen(term.b)));
        if (term.left != "1") piece = compose(conj_by_antilinear(b.reality, b.gen(term.left)), piece);
        sum = add(sum, piece, 1.0, term.coefficient);
    }
    return sum;
}

AxiomCheck check_time_orientation(const TripleBundle& b, const std::vector<TimeTerm>& terms, bool asserted) {
    int depth = 0;
    for (auto& term : terms) depth = std::max(depth, term.left == "1" ? 2 : 3);
    LinOp form = time_orientation_form(b, terms);
    double v = interior_norm(sub(b.krein, form), b.truncation, depth);
    return make_check("time_orientation", v, 1.0, asserted, asserted ? "" : "reported only");
}

// ------------------------------------------------------------------ ⟨D⟩

std::vector<std::vector<int>> components(const LinOp& m) {
    const int n = m.dim();
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto findp = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int c = 0; c < n; ++c)
        for (auto& e : m.col(c)) {
            int a = findp(c), bb = findp(e.row);
            if (a != bb) parent[std::max(a, bb)] = std::min(a, bb);
        }
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[findp(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [k, v] : groups) out.push_back(std::move(v));
    return out;
}

namespace {

struct AbsBlocks {
    std::vector<std::vector<int>> comps;
    std::vector<HermitianEig> eig;
};

AbsBlocks abs_blocks(const LinOp& d, double neg_tol) {
    LinOp m = add(compose(d, adjoint(d)), compose(adjoint(d), d), 0.5, 0.5);
    AbsBlocks ab;
    ab.comps = components(m);
    ab.eig.resize(ab.comps.size());
    const double scale = std::max(1.0, m.max_abs());
    parallel_for(static_cast<int>(ab.comps.size()), [&](int k) {
        const auto& idx = ab.comps[k];
        const int s = static_cast<int>(idx.size());
        DenseC blk = DenseC::Zero(s, s);
        std::unordered_map<int, int> pos;
        for (int i = 0; i < s; ++i) pos[idx[i]] = i;
        for (int i = 0; i < s; ++i)
            for (auto& e : m.col(idx[i])) blk(pos.at(e.row), i) = e.v;
        HermitianEig he = eig_hermitian(blk);
        for (double& l : he.eigenvalues) {
            if (l < -neg_tol * scale) throw LinearAlgebraError("abs_dirac: negative eigenvalue in ½(DD†+D†D)");
            l = std::sqrt(std::max(0.0, l));
        }
        ab.eig[k] = std::move(he);
    });
    return ab;
}

}  // namespace

LinOp abs_of(const LinOp& d, double neg_tol) {
    AbsBlocks ab = abs_blocks(d, neg_tol);
    std::vector<Triplet> t;
    for (size_t k = 0; k < ab.comps.size(); ++k) {
        const auto& idx = ab.comps[k];
        const auto& he = ab.eig[k];
        const int s = static_cast<int>(idx.size());
        Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(he.eigenvalues.data(), s);
        DenseC x = he.vectors * w.asDiagonal() * he.vectors.adjoint();
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j)
                if (x(i, j) != cplx(0.0)) t.push_back({idx[i], idx[j], x(i, j)});
    }
    return LinOp::from_triplets(d.dim(), std::move(t));
}

LinOp abs_dirac(const TripleBundle& b, double neg_tol) { return abs_of(b.dirac, neg_tol); }

std::vector<double> abs_dirac_eigenvalues(const LinOp& d, double neg_tol) {
    AbsBlocks ab = abs_blocks(d, neg_tol);
    std::vector<double> out;
    for (auto& he : ab.eig) out.insert(out.end(), he.eigenvalues.begin(), he.eigenvalues.end());
    std::sort(out.begin(), out.end());
    return out;
}

CountingTable compact_resolvent_probe(const BundleFactory& f, const std::vector<int>& sizes,
                                      const std::vector<double>& lambdas) {
    CountingTable ct;
    ct.sizes = sizes;
    ct.lambdas = lambdas;
    for (int s : sizes) {
        TripleBundle b = f(s);
        std::vector<double> ev = abs_dirac_eigenvalues(b.dirac);
        std::vector<long> row;
        for (double lam : lambdas)
            row.push_back(static_cast<long>(std::lower_bound(ev.begin(), ev.end(), lam) - ev.begin()));
        ct.counts.push_back(row);
    }
    const size_t ns = sizes.size();
    bool stable = ns >= 2;
    bool growing = false;
    for (size_t k = 0; k < lambdas.size() && ns >= 2; ++k) {
        if (ct.counts[ns - 1][k] != ct.counts[ns - 2][k]) stable = false;
        bool strict = true;
        for (size_t i = 1; i < ns; ++i)
            if (ct.counts[i][k] <= ct.counts[i - 1][k]) strict = false;
        if (strict) growing = true;
    }
    ct.verdict = stable ? "compact-consistent" : (growing ? "non-compact-consistent" : "inconclusive");
    return ct;
}

LadderReport boundedness_ladder(const BundleFactory& f, const std::vector<int>& sizes, const std::string& quantity,
                                double growth_limit) {
    if (quantity != "dirac" && quantity != "regularity")
        throw std::invalid_argument("ladder quantity must be dirac or regularity");
    LadderReport lr;
    lr.quantity = quantity;
    lr.sizes = sizes;
    lr.growth_limit = growth_limit;
    std::vector<std::vector<double>> table;  // [size][gen]
    std::vector<std::string> names;
    for (int s : sizes) {
        TripleBundle b = f(s);
        if (names.empty())
            for (auto& [n, op] : b.generators) names.push_back(n);
        LinOp ad;
        if (quantity == "regularity") ad = abs_dirac(b);
        std::vector<double> row(names.size());
        parallel_for(static_cast<int>(names.size()), [&](int k) {
            LinOp c = commutator(b.dirac, b.gen(names[k]));
            if (quantity == "regularity") c = commutator(ad, c);
            row[k] = interior_norm(c, b.truncation, 1);
        });
        table.push_back(row);
    }
    for (size_t g = 0; g < names.size(); ++g) {
        LadderRow r;
        r.generator = names[g];
        for (size_t i = 0; i < sizes.size(); ++i) r.norms.push_back(table[i][g]);
        for (size_t i = 1; i < sizes.size(); ++i) {
            double n1 = r.norms[i - 1], n2 = r.norms[i];
            double growth = 0.0;
            if (n1 > 1e-300) {
                double doublings = std::log2(static_cast<double>(sizes[i]) / sizes[i - 1]);
                growth = std::pow(n2 / n1, 1.0 / doublings) - 1.0;
            } else if (n2 > 1e-12) {
                growth = std::numeric_limits<double>::infinity();
            }
            r.max_growth = std::max(r.max_growth, growth);
        }
        if (r.max_growth >= growth_limit) lr.pass = false;
        lr.rows.push_back(r);
    }
    return lr;
}

AxiomCheck ladder_check(const LadderReport& r) {
    double worst = 0.0;
    for (auto& row : r.rows) worst = std::max(worst, row.max_growth);
    AxiomCheck c;
    c.name = "ladder." + r.quantity;
    c.violation = worst;
    c.threshold = r.growth_limit;
    c.asserted = true;
    c.pass = r.pass;
    c.note = "growth per doubling";
    return c;
}

AxiomReport run_suite(const TripleBundle& b, const SuiteOptions& o) {
    AxiomReport r;
    r.append(check_truncation(b));
    r.append(check_krein(b, o.krein_alg_asserted, o.reality_asserted));
    r.append(check_reality(b, o.reality_asserted));
    r.append(check_dirac(b));
    r.add(check_order_one(b, o.order_one_asserted));
    r.append(check_equivariance(b));
    if (!o.time_terms.empty()) r.add(check_time_orientation(b, o.time_terms, o.time_asserted));
    return r;
}

}  // namespace ncl
