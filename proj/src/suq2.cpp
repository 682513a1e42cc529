#include "ncl/suq2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ncl {

double qnum(double x, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
    return (std::pow(q, x) - std::pow(q, -x)) / (q - 1.0 / q);
}

SuqParams SuqParams::reduced(double r, double q, double S, int J2) {
    SuqParams p;
    p.q = q;
    p.r_up = r;
    p.r_dn = -r;
    p.R_up = 1.5 * r;
    p.R_dn = 0.5 * r;
    p.S = S;
    p.J2 = J2;
    return p;
}

bool SuqParams::is_reduced() const {
    const double r = r_up;
    auto eq = [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(b)); };
    return eq(r_dn, -r) && eq(R_up, 1.5 * r) && eq(R_dn, 0.5 * r);
}

namespace {

double sqn(double x, double q) { return std::sqrt(std::max(qnum(x, q), 0.0)); }

// lower component exists iff |n| < j + 1/2
bool has_down(int j2, int n2) { return std::abs(n2) < j2 + 1; }

Basis suq_basis(int J2) {
    std::vector<Label> v;
    for (int j2 = 0; j2 <= J2; ++j2)
        for (int mu2 = -j2; mu2 <= j2; mu2 += 2)
            for (int n2 = -j2 - 1; n2 <= j2 + 1; n2 += 2) {
                v.push_back({j2, mu2, n2, 0});
                if (has_down(j2, n2)) v.push_back({j2, mu2, n2, 1});
            }
    return Basis(std::move(v));
}

}  // namespace

SpinMatrices suq2_spin_matrices(int j2, int mu2, int n2, double q) {
    const double j = 0.5 * j2, mu = 0.5 * mu2, n = 0.5 * n2;
    auto Q = [q](double x) { return qnum(x, q); };
    auto sq = [q](double x) { return sqn(x, q); };
    const double pre = std::pow(q, 0.5 * (mu + n - 0.5));
    SpinMatrices m;
    m.a_plus << std::pow(q, -j - 0.5) * sq(j + n + 1.5) / Q(2 * j + 2), 0.0,
        std::sqrt(q) * sq(j - n + 0.5) / (Q(2 * j + 1) * Q(2 * j + 2)), std::pow(q, -j) * sq(j + n + 0.5) / Q(2 * j + 1);
    m.a_plus *= pre * sq(j + mu + 1);
    m.b_plus << sq(j - n + 1.5) / Q(2 * j + 2), 0.0,
        -std::pow(q, -j - 1) * sq(j + n + 0.5) / (Q(2 * j + 1) * Q(2 * j + 2)), sq(j - n + 0.5) / (std::sqrt(q) * Q(2 * j + 1));
    m.b_plus *= pre * sq(j + mu + 1);
    if (j2 > 0) {
        m.a_minus << std::pow(q, j + 1) * sq(j - n + 0.5) / Q(2 * j + 1),
            -std::sqrt(q) * sq(j + n + 0.5) / (Q(2 * j) * Q(2 * j + 1)), 0.0,
            std::pow(q, j + 0.5) * sq(j - n - 0.5) / Q(2 * j);
        m.a_minus *= pre * sq(j - mu);
        m.b_minus << -sq(j + n + 0.5) / (std::sqrt(q) * Q(2 * j + 1)),
            -std::pow(q, j) * sq(j - n + 0.5) / (Q(2 * j) * Q(2 * j + 1)), 0.0, -sq(j + n - 0.5) / Q(2 * j);
        m.b_minus *= pre * sq(j - mu);
    } else {
        m.a_minus.setZero();
        m.b_minus.setZero();
    }
    return m;
}

double suq2_offdiag(int j2, int n2, double q) {
    const double j = 0.5 * j2, n = 0.5 * n2;
    return (j + n + 0.5) * std::pow(q, j - 2 * n) * std::sqrt(qnum(j - n + 0.5, q) / qnum(j + n + 0.5, q));
}

TripleBundle build_suq2(const SuqParams& p) {
    if (p.J2 < 1) throw std::invalid_argument("SU_q(2) cutoff must be at least 1/2");
    qnum(1.0, p.q);  // validates q
    const Basis ext = suq_basis(p.J2 + 1);
    const Basis win = suq_basis(p.J2);
    Assembler A(ext), Bq(ext), D(ext), K(ext), J(ext), Cj(ext), Mu(ext), Nn(ext);
    for (int c = 0; c < ext.size(); ++c) {
        const Label& lb = ext[c];
        const int j2 = lb.a, mu2 = lb.b, n2 = lb.c, s = lb.s;
        const SpinMatrices m = suq2_spin_matrices(j2, mu2, n2, p.q);
        const cplx ph = std::polar(1.0, p.phase_twist * j2);
        auto put = [&](Assembler& T, const Eigen::Matrix2d& M, int dj, int dn) {
            for (int t = 0; t < 2; ++t) {
                const double co = M(t, s);
                if (co != 0.0) T.add(c, {j2 + dj, mu2 + 1, n2 + dn, t}, ph * co);
            }
        };
        put(A, m.a_plus, 1, 1);
        put(Bq, m.b_plus, 1, -1);
        if (j2 > 0) {
            put(A, m.a_minus, -1, 1);
            put(Bq, m.b_minus, -1, -1);
        }
        const bool edge = !has_down(j2, n2);
        if (s == 0) {
            D.add(c, lb, cplx(0.0, p.r_up * j2 + p.R_up));
            if (!edge) D.add(c, {j2, mu2, n2, 1}, cplx(0.0, p.S * suq2_offdiag(j2, n2, p.q)));
            K.add(c, lb, cplx(0.0, 1.0));
        } else {
            D.add(c, lb, cplx(0.0, -(p.r_dn * j2 + p.R_dn)));
            D.add(c, {j2, mu2, n2, 0}, cplx(0.0, -p.S * suq2_offdiag(j2, n2, p.q)));
            K.add(c, lb, cplx(0.0, -1.0));
        }
        J.add(c, {j2, -mu2, -n2, s}, 1.0);
        Cj.add(c, lb, 0.5 * j2);
        Mu.add(c, lb, 0.5 * mu2);
        Nn.add(c, lb, 0.5 * n2);
    }
    LinOp Ae = A.finish(), Be = Bq.finish();
    LinOp Ade = adjoint(Ae), Bde = adjoint(Be);

    TripleBundle b;
    b.geometry = "suq2";
    std::vector<std::vector<char>> leaks;
    auto hop = [&](const std::string& name, const LinOp& e) {
        Restricted r = restrict_to(e, ext, win);
        leaks.push_back(r.leak);
        b.generators.emplace_back(name, std::move(r.op));
    };
    hop("a", Ae);
    hop("b", Be);
    hop("a*", Ade);
    hop("b*", Bde);
    auto fixed = [&](const std::string& name, const LinOp& e) {
        Restricted r = restrict_to(e, ext, win);
        for (char ch : r.leak)
            if (ch) {
                b.truncation_defects.push_back(name + " leaves the window");
                break;
            }
        return std::move(r.op);
    };
    b.dirac = fixed("D", D.finish());
    b.krein = fixed("beta", K.finish());
    b.reality.linear_part = fixed("J", J.finish());
    b.symmetry.push_back({"casimir_j", fixed("casimir_j", Cj.finish()), {}});
    b.symmetry.push_back({"mu", fixed("mu", Mu.finish()), {{"a", 0.5}, {"b", 0.5}, {"a*", -0.5}, {"b*", -0.5}}});
    b.symmetry.push_back({"n", fixed("n", Nn.finish()), {{"a", 0.5}, {"b", -0.5}, {"a*", -0.5}, {"b*", 0.5}}});
    b.p = 1;
    b.q = 2;
    b.signs = sign_table(1, 2);
    std::vector<const LinOp*> hops;
    for (auto& [n, op] : b.generators) hops.push_back(&op);
    b.truncation.basis = win;
    b.truncation.level = compute_levels(hops, leaks, b.truncation.level_cap);
    b.truncation.generation = "suq2 Jcut=" + half_str(p.J2);
    return b;
}

SuiteOptions suq2_suite_options() {
    SuiteOptions o;
    // beta commutes with the algebra only up to compacts; J is a candidate; order one fails
    o.krein_alg_asserted = false;
    o.reality_asserted = false;
    o.order_one_asserted = false;
    return o;
}

AxiomReport suq2_relations(const TripleBundle& b, double q) {
    const LinOp &a = b.gen("a"), &bb = b.gen("b"), &as = b.gen("a*"), &bs = b.gen("b*");
    const LinOp I = LinOp::identity(b.dim());
    AxiomReport r;
    auto rel = [&](const std::string& name, const LinOp& x) {
        r.add(make_check("suq2.relation." + name, interior_norm(x, b.truncation, 2), 1.0));
    };
    rel("ba=qab", add(compose(bb, a), compose(a, bb), 1.0, -q));
    rel("b*a=qab*", add(compose(bs, a), compose(a, bs), 1.0, -q));
    rel("bb*=b*b", commutator(bb, bs));
    rel("a*a+q2b*b=1", add(add(compose(as, a), compose(bs, bb), 1.0, q * q), I, 1.0, -1.0));
    rel("aa*+bb*=1", add(add(compose(a, as), compose(bb, bs)), I, 1.0, -1.0));
    return r;
}

long suq2_sector_leakage(const TripleBundle& b) {
    const Basis& B = b.truncation.basis;
    long bad = 0;
    for (int c = 0; c < b.dim(); ++c)
        for (auto& e : b.dirac.col(c))
            if (B[e.row].a != B[c].a || B[e.row].b != B[c].b) ++bad;
    return bad;
}

namespace {

BlockKey sector_key = [](const Label& l) { return Label{l.a, l.b, 0, 0}; };
BlockName sector_name = [](const Label& k) { return "j=" + half_str(k.a) + ",mu=" + half_str(k.b); };

double nearest(const std::vector<cplx>& vals, cplx z, cplx* hit = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (cplx v : vals)
        if (std::abs(v - z) < best) {
            best = std::abs(v - z);
            if (hit) *hit = v;
        }
    return best;
}

}  // namespace

SuqSpectrumReport suq2_dirac_spectrum(const SuqParams& p) {
    TripleBundle b = build_suq2(p);
    SuqSpectrumReport r;
    r.spectrum = block_spectrum(b.dirac, b.truncation.basis, sector_key, sector_name, 1e-10, 1e-13);
    r.interior_form = "i(alpha - delta)/2 +- sqrt(S^2 c^2 - (alpha + delta)^2/4), alpha = r_up 2j + R_up, "
                      "delta = r_dn 2j + R_dn";
    if (p.is_reduced()) r.interior_form += " (reduced: i r (2j + 1/2) +- sqrt(S^2 c^2 - r^2))";
    r.spectrum.convention = r.interior_form;

    std::map<Label, std::vector<cplx>> per;
    for (auto& line : r.spectrum.lines)
        for (int k = 0; k < line.multiplicity; ++k) per[line.block].push_back(line.value);
    for (auto& [key, vals] : per) {
        const int j2 = key.a;
        const double alpha = p.r_up * j2 + p.R_up, delta = p.r_dn * j2 + p.R_dn;
        const cplx edge(0.0, alpha);
        for (int e = 0; e < 2; ++e) {
            cplx hit;
            r.edge_deviation = std::max(r.edge_deviation, nearest(vals, edge, &hit));
            r.edge_real_part = std::max(r.edge_real_part, std::abs(hit.real()));
            ++r.edge_count;
        }
        std::vector<cplx> oracle{edge, edge};
        for (int n2 = -j2 + 1; n2 <= j2 - 1; n2 += 2) {
            const double c = p.S * suq2_offdiag(j2, n2, p.q);
            const cplx root = std::sqrt(cplx(c * c - 0.25 * (alpha + delta) * (alpha + delta)));
            const cplx mid(0.0, 0.5 * (alpha - delta));
            oracle.push_back(mid + root);
            oracle.push_back(mid - root);
        }
        // greedy matching, oracle value to nearest unused eigenvalue
        std::vector<char> used(vals.size(), 0);
        if (oracle.size() != vals.size()) {
            r.interior_deviation = std::numeric_limits<double>::infinity();
            continue;
        }
        for (size_t o = 2; o < oracle.size(); ++o) {
            double best = std::numeric_limits<double>::infinity();
            size_t bi = 0;
            for (size_t k = 0; k < vals.size(); ++k)
                if (!used[k] && std::abs(vals[k] - oracle[o]) < best) {
                    best = std::abs(vals[k] - oracle[o]);
                    bi = k;
                }
            used[bi] = 1;
            r.interior_deviation = std::max(r.interior_deviation, best / std::max(1.0, std::abs(oracle[o])));
        }
    }
    r.spectrum.max_formula_deviation = std::max(r.edge_deviation, r.interior_deviation);
    return r;
}

SuqAbsReport suq2_abs_spectrum(const SuqParams& p, const std::vector<int>& counting_sizes,
                               const std::vector<double>& lambdas) {
    TripleBundle b = build_suq2(p);
    const LinOp& d = b.dirac;
    LinOp m = add(compose(d, adjoint(d)), compose(adjoint(d), d), 0.5, 0.5);
    SuqAbsReport r;
    r.spectrum = block_spectrum_hermitian(
        m, b.truncation.basis, [](const Label& l) { return Label{l.a, l.b, l.c, 0}; },
        [](const Label& k) { return "j=" + half_str(k.a) + ",mu=" + half_str(k.b) + ",n=" + half_str(k.c); });
    r.spectrum.convention = "alpha^2 + S^2 c^2, delta^2 + S^2 c^2";
    std::map<int, SuqAbsRow> rows;
    for (auto& line : r.spectrum.lines) {
        const int j2 = line.block.a, n2 = line.block.c;
        const double j = 0.5 * j2, n = 0.5 * n2, v = line.value.real();
        const double alpha = p.r_up * j2 + p.R_up, delta = p.r_dn * j2 + p.R_dn;
        double c2 = 0.0;
        if (has_down(j2, n2)) {
            const double c = p.S * suq2_offdiag(j2, n2, p.q);
            c2 = c * c;
        }
        double dev = std::abs(v - (alpha * alpha + c2)) / std::max(1.0, alpha * alpha + c2);
        if (has_down(j2, n2)) dev = std::min(dev, std::abs(v - (delta * delta + c2)) / std::max(1.0, delta * delta + c2));
        r.closed_form_deviation = std::max(r.closed_form_deviation, dev);

        const double r2 = p.r_up * p.r_up;
        const double tail = p.S * p.S * std::pow(p.q, 2 * (j - n)) * (j + n + 0.5) * (j + n + 0.5);
        double best = std::numeric_limits<double>::infinity();
        for (double sg : {0.5, -0.5}) {
            const double f = 0.5 * r2 * (j + 1 + sg) * (j + 1 + sg) + tail;
            best = std::min(best, std::abs(v - f) / std::max(1.0, std::abs(f)));
        }
        SuqAbsRow& row = rows[j2];
        row.j2 = j2;
        row.budget = std::pow(p.q, j);
        row.max_rel_error = std::max(row.max_rel_error, best);
    }
    for (auto& [k, row] : rows) r.approx.push_back(row);
    r.spectrum.max_formula_deviation = r.closed_form_deviation;
    SuqParams base = p;
    r.counting = compact_resolvent_probe(
        [base](int j2) {
            SuqParams q = base;
            q.J2 = j2;
            return build_suq2(q);
        },
        counting_sizes, lambdas);
    r.spectrum.counting.push_back(r.counting);
    return r;
}

SuqBoundedness suq2_boundedness_probe(const SuqParams& p, const std::vector<int>& ladder_j2, int tail_cut_j2,
                                      int tail_from_j2, int tail_to_j2) {
    SuqBoundedness out;
    SuqParams base = p;
    BundleFactory f = [base](int j2) {
        SuqParams q = base;
        q.J2 = j2;
        return build_suq2(q);
    };
    out.dirac = boundedness_ladder(f, ladder_j2, "dirac");
    out.regularity = boundedness_ladder(f, ladder_j2, "regularity");

    TripleBundle t = f(tail_cut_j2);
    LinOp comm = commutator(t.krein, t.gen("a"));
    const auto interior = t.truncation.mask(1);
    std::vector<double> xs, ys;
    for (int J = tail_from_j2; J <= tail_to_j2; ++J) {
        std::vector<char> m(interior.size(), 0);
        for (int c = 0; c < t.dim(); ++c) m[c] = interior[c] && t.truncation.basis[c].a >= J;
        const double nrm = op_norm(comm.keep_columns(m), 1e-14);
        out.tail_j2.push_back(J);
        out.tail_norms.push_back(nrm);
        if (nrm > 0.0) {
            xs.push_back(0.5 * J);
            ys.push_back(std::log(nrm));
        }
    }
    if (xs.size() >= 2) {
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k];
            sy += ys[k];
            sxx += xs[k] * xs[k];
            sxy += xs[k] * ys[k];
        }
        out.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    out.expected_slope = 2.0 * std::log(p.q);
    out.decay_ok = std::abs(out.fitted_slope - out.expected_slope) <= 0.2 * std::abs(out.expected_slope);

    TripleBundle b = f(p.J2);
    out.beta_commutator_norm = interior_norm(commutator(b.krein, b.gen("a")), b.truncation, 1);
    AxiomCheck oo = check_order_one(b, false);
    out.order_one_violation = oo.violation;
    out.order_one_nonzero = oo.violation > oo.threshold;
    out.sector_leak = suq2_sector_leakage(b);
    return out;
}

}  // namespace ncl
