#include "ncl/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace ncl {

namespace {

cplx lam_pow(double theta, double x) { return std::polar(1.0, 2.0 * std::numbers::pi * theta * x); }

Basis sphere_basis(int L2) {
    std::vector<Label> v;
    for (int l2 = 0; l2 <= L2; ++l2)
        for (int m2 = -l2; m2 <= l2; m2 += 2)
            for (int n2 = -l2; n2 <= l2; n2 += 2)
                for (int s = 0; s < 2; ++s) v.push_back({l2, m2, n2, s});
    return Basis(std::move(v));
}

// i^k for even k
double i_pow_even(int k) { return (((k / 2) % 2) + 2) % 2 == 0 ? 1.0 : -1.0; }

// match each oracle value to the nearest unused numeric value
double multiset_deviation(std::vector<cplx> num, const std::vector<cplx>& oracle) {
    if (num.size() != oracle.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    std::vector<char> used(num.size(), 0);
    for (cplx o : oracle) {
        double best = std::numeric_limits<double>::infinity();
        size_t bi = 0;
        for (size_t k = 0; k < num.size(); ++k)
            if (!used[k] && std::abs(num[k] - o) < best) {
                best = std::abs(num[k] - o);
                bi = k;
            }
        used[bi] = 1;
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TripleBundle build_sphere(const SphereParams& p) {
    if (p.L2 < 1) throw std::invalid_argument("sphere cutoff must be at least 1/2");
    const Basis ext = sphere_basis(p.L2 + 1);
    const Basis win = sphere_basis(p.L2);
    Assembler A(ext), Bq(ext), D(ext), K(ext), J(ext), Q(ext), Nn(ext), E(ext);
    for (int c = 0; c < ext.size(); ++c) {
        const Label& lb = ext[c];
        const int l2 = lb.a, m2 = lb.b, n2 = lb.c, s = lb.s;
        const double l = 0.5 * l2, m = 0.5 * m2, n = 0.5 * n2;
        const double spin = s == 0 ? 0.25 : -0.25;
        const cplx pha = lam_pow(p.theta, 0.5 * (m - n) + spin);
        const cplx phb = lam_pow(p.theta, -0.5 * (m + n) - spin);
        // a: (l+-1/2, m+1/2, n+1/2); b: (l+-1/2, m+1/2, n-1/2)
        A.add(c, {l2 + 1, m2 + 1, n2 + 1, s},
              pha * std::sqrt((l + 1 + m) * (l + n + 1) / ((2 * l + 1) * (2 * l + 2))));
        Bq.add(c, {l2 + 1, m2 + 1, n2 - 1, s},
               phb * std::sqrt((l + 1 + m) * (l - n + 1) / ((2 * l + 1) * (2 * l + 2))));
        if (l2 > 0) {
            double ca = std::sqrt((l - m) * (l - n) / (2 * l * (2 * l + 1)));
            double cb = std::sqrt((l - m) * (l + n) / (2 * l * (2 * l + 1)));
            if (ca != 0.0) A.add(c, {l2 - 1, m2 + 1, n2 + 1, s}, -pha * ca);
            if (cb != 0.0) Bq.add(c, {l2 - 1, m2 + 1, n2 - 1, s}, phb * cb);
        }
        if (s == 0) {
            D.add(c, lb, cplx(0.0, p.R * m));
            if (m2 + 2 <= l2) D.add(c, {l2, m2 + 2, n2, 1}, p.S * std::sqrt((l + 1 + m) * (l - m)));
            K.add(c, lb, cplx(0.0, 1.0));
        } else {
            D.add(c, lb, cplx(0.0, -p.R * m));
            if (m2 - 2 >= -l2) D.add(c, {l2, m2 - 2, n2, 0}, std::conj(p.S) * std::sqrt((l - m + 1) * (l + m)));
            K.add(c, lb, cplx(0.0, -1.0));
        }
        J.add(c, {l2, -m2, -n2, 1 - s}, i_pow_even(m2 + n2));
        Q.add(c, lb, m + (s == 0 ? 0.5 : -0.5));
        Nn.add(c, lb, n);
        if (n2 + 2 <= l2) E.add(c, {l2, m2, n2 + 2, s}, std::sqrt((l - n) * (l + n + 1)));
    }
    LinOp Ae = A.finish(), Be = Bq.finish();
    LinOp Ade = adjoint(Ae), Bde = adjoint(Be);
    LinOp Ee = E.finish(), Fe = adjoint(Ee);

    TripleBundle b;
    b.geometry = "sphere";
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
        for (char c : r.leak)
            if (c) {
                b.truncation_defects.push_back(name + " leaves the window");
                break;
            }
        return std::move(r.op);
    };
    b.dirac = fixed("D", D.finish());
    b.krein = fixed("beta", K.finish());
    b.reality.linear_part = fixed("J", J.finish());
    b.symmetry.push_back({"u1_left", fixed("u1_left", Q.finish()), {{"a", 0.5}, {"b", 0.5}, {"a*", -0.5}, {"b*", -0.5}}});
    b.symmetry.push_back({"su2_h", fixed("su2_h", Nn.finish()), {{"a", 0.5}, {"b", -0.5}, {"a*", -0.5}, {"b*", 0.5}}});
    b.symmetry.push_back({"su2_e", fixed("su2_e", Ee), {}});
    b.symmetry.push_back({"su2_f", fixed("su2_f", Fe), {}});
    b.p = 1;
    b.q = 2;
    b.signs = sign_table(1, 2);
    std::vector<const LinOp*> hops;
    for (auto& [n, op] : b.generators) hops.push_back(&op);
    b.truncation.basis = win;
    b.truncation.level = compute_levels(hops, leaks, b.truncation.level_cap);
    b.truncation.generation = "sphere L=" + half_str(p.L2);
    return b;
}

long sphere_block_leakage(const TripleBundle& b) {
    const Basis& B = b.truncation.basis;
    long bad = 0;
    for (int c = 0; c < b.dim(); ++c)
        for (auto& e : b.dirac.col(c))
            if (B[e.row].a != B[c].a || B[e.row].c != B[c].c) ++bad;
    return bad;
}

std::vector<SphereBlock> sphere_blocks(const SphereParams& p) {
    TripleBundle b = build_sphere(p);
    const Basis& B = b.truncation.basis;
    std::map<std::pair<int, int>, std::vector<int>> g;
    for (int i = 0; i < B.size(); ++i) g[{B[i].a, B[i].c}].push_back(i);
    std::vector<SphereBlock> out;
    for (auto& [k, idx] : g) {
        SphereBlock blk;
        blk.l2 = k.first;
        blk.n2 = k.second;
        blk.indices = idx;
        const int s = static_cast<int>(idx.size());
        blk.d = DenseC::Zero(s, s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) blk.d(i, j) = b.dirac.at(idx[i], idx[j]);
        out.push_back(std::move(blk));
    }
    return out;
}

std::vector<cplx> sphere_block_oracle(const SphereParams& p, int l2, double c) {
    const double l = 0.5 * l2, s2 = std::norm(p.S), R = p.R;
    std::vector<cplx> v;
    for (int m2 = -l2; m2 <= l2 - 2; m2 += 2) {
        const double m = 0.5 * m2;
        cplx disc = s2 * (l + 0.5) * (l + 0.5) - (s2 + R * R) * (m + 0.5) * (m + 0.5);
        cplx root = c * std::sqrt(disc);
        v.push_back(cplx(0.0, -0.5 * R) + root);
        v.push_back(cplx(0.0, -0.5 * R) - root);
    }
    // |l,+> and |-l,->
    v.push_back(cplx(0.0, R * l));
    v.push_back(cplx(0.0, R * l));
    return v;
}

std::vector<double> sphere_abs_oracle(const SphereParams& p, int l2) {
    const double l = 0.5 * l2, s2 = std::norm(p.S), R2 = p.R * p.R;
    std::vector<double> v;
    for (int m2 = -l2; m2 <= l2; m2 += 2) {
        const double m = 0.5 * m2;
        v.push_back(R2 * m * m + s2 * (l - m) * (l + m + 1));      // |m,+>
        v.push_back(R2 * m * m + s2 * (l - m + 1) * (l + m));      // |m,->
    }
    std::sort(v.begin(), v.end());
    return v;
}

namespace {

BlockKey sphere_key = [](const Label& l) { return Label{l.a, l.c, 0, 0}; };
BlockName sphere_name = [](const Label& k) { return "l=" + half_str(k.a) + ",n=" + half_str(k.b); };

}  // namespace

SphereSpectrumReport sphere_spectrum(const SphereParams& p) {
    TripleBundle b = build_sphere(p);
    SphereSpectrumReport r;
    r.spectrum = block_spectrum(b.dirac, b.truncation.basis, sphere_key, sphere_name, 1e-10);
    std::map<Label, std::vector<cplx>> per;
    for (auto& line : r.spectrum.lines)
        for (int k = 0; k < line.multiplicity; ++k) per[line.block].push_back(line.value);
    for (auto& [key, vals] : per) {
        r.deviation_half = std::max(r.deviation_half, multiset_deviation(vals, sphere_block_oracle(p, key.a, 0.5)));
        r.deviation_one = std::max(r.deviation_one, multiset_deviation(vals, sphere_block_oracle(p, key.a, 1.0)));
        // mirror in the line Im z = -R/2
        auto reflect = [&](const std::vector<cplx>& v) {
            std::vector<cplx> refl;
            for (cplx z : v) refl.push_back(std::conj(z) - cplx(0.0, p.R));
            return multiset_deviation(v, refl);
        };
        std::vector<cplx> printed;
        for (cplx z : vals) printed.push_back(cplx(0.0, -p.R) - std::conj(z));
        r.reflection_deviation_printed = std::max(r.reflection_deviation_printed, multiset_deviation(vals, printed));
        r.reflection_deviation_full = std::max(r.reflection_deviation_full, reflect(vals));
        // drop the two unpaired edge states i R l
        std::vector<cplx> paired = vals;
        const cplx edge(0.0, p.R * 0.5 * key.a);
        for (int k = 0; k < 2 && !paired.empty(); ++k) {
            auto it = std::min_element(paired.begin(), paired.end(), [&](cplx x, cplx y) {
                return std::abs(x - edge) < std::abs(y - edge);
            });
            paired.erase(it);
        }
        r.reflection_deviation = std::max(r.reflection_deviation, reflect(paired));
    }
    r.c = r.deviation_one <= r.deviation_half ? 1.0 : 0.5;
    r.spectrum.max_formula_deviation = std::min(r.deviation_one, r.deviation_half);
    r.spectrum.convention = r.c == 1.0 ? "-iR/2 +- sqrt(...)" : "-iR/2 +- (1/2) sqrt(...)";
    return r;
}

SphereAbsReport sphere_abs_spectrum(const SphereParams& p) {
    TripleBundle b = build_sphere(p);
    const LinOp& d = b.dirac;
    LinOp m = add(compose(d, adjoint(d)), compose(adjoint(d), d), 0.5, 0.5);
    SphereAbsReport r;
    r.spectrum = block_spectrum_hermitian(m, b.truncation.basis, sphere_key, sphere_name);
    std::map<Label, std::vector<double>> per;
    for (auto& line : r.spectrum.lines)
        for (int k = 0; k < line.multiplicity; ++k) per[line.block].push_back(line.value.real());
    for (auto& [key, vals] : per) {
        std::sort(vals.begin(), vals.end());
        auto o = sphere_abs_oracle(p, key.a);
        if (o.size() != vals.size()) {
            r.max_rel_deviation = std::numeric_limits<double>::infinity();
            continue;
        }
        for (size_t k = 0; k < o.size(); ++k)
            r.max_rel_deviation = std::max(r.max_rel_deviation, std::abs(vals[k] - o[k]) / std::max(1.0, std::abs(o[k])));
    }
    r.spectrum.max_formula_deviation = r.max_rel_deviation;
    r.spectrum.convention = "R^2 (m+1/2 +- 1/2)^2 + |S|^2 (l-m)(l+m+1)";
    return r;
}

std::vector<TimeTerm> sphere_time_terms(const SphereParams& p) {
    if (p.R == 0.0) throw std::invalid_argument("sphere time orientation needs R != 0");
    const cplx k = -1.0 / p.R;
    // k (a [D,a*] + b [D,b*] - a* [D,a] - b* [D,b])
    return {{"1", "a", "a*", k}, {"1", "b", "b*", k}, {"1", "a*", "a", -k}, {"1", "b*", "b", -k}};
}

SphereTimeReport sphere_time_orientation(const SphereParams& p) {
    TripleBundle b = build_sphere(p);
    SphereTimeReport r;
    auto terms = sphere_time_terms(p);
    r.coefficient = terms[2].coefficient;
    r.check = check_time_orientation(b, terms);
    const cplx k = cplx(0.0, 1.0) / p.R;
    std::vector<TimeTerm> printed{{"1", "a", "a*", k}, {"1", "b", "b*", k}, {"1", "a*", "a", -k}, {"1", "b*", "b", -k}};
    r.printed_violation = interior_norm(sub(b.krein, time_orientation_form(b, printed)), b.truncation, 2);

    // least squares over x [D, y]
    const auto mask = b.truncation.mask(2);
    std::vector<std::string> names;
    std::vector<LinOp> forms;
    for (auto& [nx, x] : b.generators)
        for (auto& [ny, y] : b.generators) {
            names.push_back(nx + " d" + ny);
            forms.push_back(compose(x, commutator(b.dirac, y)));
        }
    std::map<std::pair<int, int>, int> rowof;
    auto rowid = [&](int r0, int c0) {
        auto it = rowof.find({r0, c0});
        if (it != rowof.end()) return it->second;
        int id = static_cast<int>(rowof.size());
        rowof[{r0, c0}] = id;
        return id;
    };
    for (int c = 0; c < b.dim(); ++c)
        if (mask[c]) {
            for (auto& f : forms)
                for (auto& e : f.col(c)) rowid(e.row, c);
            for (auto& e : b.krein.col(c)) rowid(e.row, c);
        }
    const int nr = static_cast<int>(rowof.size()), nf = static_cast<int>(forms.size());
    DenseC A = DenseC::Zero(nr, nf);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nr);
    for (int c = 0; c < b.dim(); ++c)
        if (mask[c]) {
            for (int f = 0; f < nf; ++f)
                for (auto& e : forms[f].col(c)) A(rowof.at({e.row, c}), f) += e.v;
            for (auto& e : b.krein.col(c)) rhs(rowof.at({e.row, c})) += e.v;
        }
    Eigen::CompleteOrthogonalDecomposition<DenseC> cod(A);
    Eigen::VectorXcd x = cod.solve(rhs);
    r.lsq_residual = (A * x - rhs).norm() / std::max(1.0, rhs.norm());
    for (int f = 0; f < nf; ++f)
        if (std::abs(x(f)) > 1e-12) r.lsq[names[f]] = x(f);
    return r;
}

SphereMetric sphere_metric(const SphereParams& p, bool formal) {
    if (p.theta != 0.0 && !formal)
        throw std::invalid_argument("sphere metric is defined at theta = 0; pass the formal flag otherwise");
    TripleBundle b = build_sphere(p);
    SphereMetric sm;
    sm.formal = p.theta != 0.0;
    auto f = [&](const std::string& x, const std::string& y) {
        return compose(b.gen(x), commutator(b.dirac, b.gen(y)));
    };
    const cplx I(0.0, 1.0);
    LinOp ba = f("b", "a"), ab = f("a", "b"), bsas = f("b*", "a*"), asbs = f("a*", "b*");
    LinOp w1 = add(sub(ba, ab), sub(bsas, asbs));
    LinOp w2 = add(sub(ba, ab), sub(asbs, bsas)).scaled(I);
    LinOp w3 = add(f("b*", "b"), f("a*", "a")).scaled(I);
    // forms exactly as printed
    LinOp bsa = f("b*", "a"), abs_ = f("a", "b*"), bas = f("b", "a*"), asb = f("a*", "b");
    LinOp p1 = add(sub(bsa, abs_), sub(bas, asb));
    LinOp p2 = add(sub(ab, ba), sub(bsas, asbs)).scaled(I);
    LinOp p3 = add(f("b", "b*"), f("a*", "a")).scaled(I);

    const auto mask = b.truncation.mask(4);
    int probe = -1;
    for (int i = 0; i < b.dim() && probe < 0; ++i)
        if (mask[i]) probe = i;
    if (probe < 0) throw std::invalid_argument("sphere metric needs a larger cutoff (L >= 2)");
    const LinOp Id = LinOp::identity(b.dim());
    auto scalar_part = [&](const LinOp& x, const LinOp& y, double& worst) {
        LinOp ac = anticommutator(x, y).scaled(0.5);
        cplx g = ac.at(probe, probe);
        worst = std::max(worst, interior_norm(add(ac, Id, 1.0, -g), b.truncation, 4));
        return g;
    };
    const LinOp* W[3] = {&w1, &w2, &w3};
    const LinOp* P[3] = {&p1, &p2, &p3};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx g = scalar_part(*W[i], *W[j], sm.scalar_violation);
            sm.g(i, j) = g.real();
            sm.scalar_violation = std::max(sm.scalar_violation, std::abs(g.imag()));
            scalar_part(*P[i], *P[j], sm.printed_forms_scalar_violation);
        }
    const double s2 = std::norm(p.S);
    sm.expected = Eigen::Matrix3d::Zero();
    sm.expected.diagonal() << -0.5 * s2, -0.5 * s2, 0.125 * p.R * p.R;
    sm.deviation = (sm.g - sm.expected).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.5 * (sm.g + sm.g.transpose()));
    for (int k = 0; k < 3; ++k) {
        double v = es.eigenvalues()(k);
        if (v > 1e-12) ++sm.positive;
        else if (v < -1e-12) ++sm.negative;
    }
    return sm;
}

SuiteOptions sphere_suite_options(const SphereParams& p) {
    SuiteOptions o;
    if (p.R != 0.0) o.time_terms = sphere_time_terms(p);
    return o;
}

}  // namespace ncl
