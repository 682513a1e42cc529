#include "ncl/torus.hpp"

#include <cmath>
#include <numbers>

namespace ncl {

namespace {

cplx lam_pow(double theta, double x) { return std::polar(1.0, 2.0 * std::numbers::pi * theta * x); }

// n in [-N - s+, N], m in [-N - s-, N]; the shift keeps n + sigma+ symmetric
Basis torus_basis(int N, const std::array<int, 2>& spin) {
    std::vector<Label> v;
    for (int n = -N - spin[0]; n <= N; ++n)
        for (int m = -N - spin[1]; m <= N; ++m)
            for (int s = 0; s < 2; ++s) v.push_back({n, m, s, 0});
    return Basis(std::move(v));
}

}  // namespace

double TorusParams::d_plus(int n, int m) const {
    return t1p() * (n + 0.5 * spin[0]) + t2p() * (m + 0.5 * spin[1]);
}

double TorusParams::d_minus(int n, int m) const {
    return t1m() * (n + 0.5 * spin[0]) + t2m() * (m + 0.5 * spin[1]);
}

TripleBundle build_torus(const TorusParams& p) {
    if (p.N < 1) throw std::invalid_argument("torus window N must be positive");
    for (int s : p.spin)
        if (s != 0 && s != 1) throw std::invalid_argument("spin entries must be 0 or 1 (sigma = 0 or 1/2)");
    const Basis ext = torus_basis(p.N + 1, p.spin);
    const Basis win = torus_basis(p.N, p.spin);
    const double sp = 0.5 * p.spin[0], sm = 0.5 * p.spin[1];

    Assembler U(ext), V(ext), D(ext), G(ext), B(ext), J(ext), R1(ext), R2(ext);
    for (int c = 0; c < ext.size(); ++c) {
        const Label& l = ext[c];
        const int n = l.a, m = l.b, s = l.c;
        U.add(c, {n + 1, m, s, 0}, 1.0);
        V.add(c, {n, m + 1, s, 0}, lam_pow(p.theta, -n));
        if (s == 0) {
            D.add(c, {n, m, 1, 0}, p.d_minus(n, m));
            B.add(c, {n, m, 1, 0}, -1.0);
        } else {
            D.add(c, {n, m, 0, 0}, p.d_plus(n, m));
            B.add(c, {n, m, 0, 0}, 1.0);
        }
        G.add(c, l, s == 0 ? 1.0 : -1.0);
        const double k = n + sp, kk = m + sm;
        cplx ph = lam_pow(p.theta, -k * kk) * (s == 0 ? 1.0 : -1.0);
        J.add(c, {-n - p.spin[0], -m - p.spin[1], s, 0}, ph);
        R1.add(c, l, static_cast<double>(n));
        R2.add(c, l, static_cast<double>(m));
    }
    LinOp Ue = U.finish(), Ve = V.finish();
    LinOp Ude = adjoint(Ue), Vde = adjoint(Ve);

    TripleBundle b;
    b.geometry = "torus";
    std::vector<std::vector<char>> leaks;
    auto hop = [&](const std::string& name, const LinOp& e) {
        Restricted r = restrict_to(e, ext, win);
        leaks.push_back(r.leak);
        b.generators.emplace_back(name, std::move(r.op));
    };
    hop("U", Ue);
    hop("V", Ve);
    hop("U*", Ude);
    hop("V*", Vde);
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
    b.grading = fixed("gamma", G.finish());
    b.krein = fixed("beta", B.finish());
    b.reality.linear_part = fixed("J", J.finish());
    b.symmetry.push_back({"delta1", fixed("delta1", R1.finish()), {{"U", 1.0}, {"U*", -1.0}, {"V", 0.0}, {"V*", 0.0}}});
    b.symmetry.push_back({"delta2", fixed("delta2", R2.finish()), {{"V", 1.0}, {"V*", -1.0}, {"U", 0.0}, {"U*", 0.0}}});
    b.p = 1;
    b.q = 1;
    b.signs = sign_table(1, 1);

    std::vector<const LinOp*> hops;
    for (auto& [n, op] : b.generators) hops.push_back(&op);
    b.truncation.basis = win;
    b.truncation.level = compute_levels(hops, leaks, b.truncation.level_cap);
    b.truncation.generation = "torus N=" + std::to_string(p.N) + " spin=(" + half_str(p.spin[0]) + "," +
                              half_str(p.spin[1]) + ")";
    return b;
}

Eigen::Matrix2d torus_gamma(const TorusParams& p, int i) {
    Eigen::Matrix2d g;
    if (i == 1) g << 0.0, p.t1p(), p.t1m(), 0.0;
    else g << 0.0, p.t2p(), p.t2m(), 0.0;
    return g;
}

SpectralReport torus_spectrum(const TorusParams& p) {
    TripleBundle b = build_torus(p);
    SpectralReport r = block_spectrum(
        b.dirac, b.truncation.basis, [](const Label& l) { return Label{l.a, l.b, 0, 0}; },
        [](const Label& k) { return "n=" + std::to_string(k.a) + ",m=" + std::to_string(k.b); }, 1e-12);
    // closed form +-sqrt(d+ d-)
    double dev = 0.0;
    for (auto& line : r.lines) {
        cplx root = std::sqrt(cplx(p.d_plus(line.block.a, line.block.b) * p.d_minus(line.block.a, line.block.b)));
        dev = std::max(dev, std::min(std::abs(line.value - root), std::abs(line.value + root)));
    }
    r.max_formula_deviation = dev;
    r.convention = "+-sqrt(d+ d-)";
    return r;
}

Ellipticity torus_ellipticity(const TorusParams& p) {
    Ellipticity e;
    const double a1 = p.t1p(), a2 = p.t2p(), b1 = p.t1m(), b2 = p.t2m();
    e.quadratic_form << a1 * a1 + b1 * b1, a1 * a2 + b1 * b2, a1 * a2 + b1 * b2, a2 * a2 + b2 * b2;
    const double dl = p.delta();
    e.det = dl * dl;
    const double scale = std::max({1.0, a1 * a1, a2 * a2, b1 * b1, b2 * b2});
    e.elliptic = std::abs(dl) > 1e-14 * scale;
    return e;
}

TorusMetric torus_metric(const TorusParams& p) {
    TorusMetric tm;
    tm.formal = p.theta != 0.0;
    const double a1 = p.t1p(), a2 = p.t2p(), b1 = p.t1m(), b2 = p.t2m();
    Eigen::Matrix2d shown;
    shown << a1 * b1, 0.5 * (a2 * b1 + a1 * b2), 0.5 * (a2 * b1 + a1 * b2), a2 * b2;
    shown = -shown;
    const double x = a2 * b1 - a1 * b2;
    tm.det_closed_form = -0.25 * x * x;

    // measured from the operators Gamma_i = U^dagger[D,U], V^dagger[D,V]
    TripleBundle b = build_torus(p);
    LinOp g1 = compose(b.gen("U*"), commutator(b.dirac, b.gen("U")));
    LinOp g2 = compose(b.gen("V*"), commutator(b.dirac, b.gen("V")));
    const LinOp* G[2] = {&g1, &g2};
    const auto mask = b.truncation.mask(4);
    int probe = -1;
    for (int i = 0; i < b.dim() && probe < 0; ++i)
        if (mask[i]) probe = i;
    double worst = 0.0;
    const LinOp I = LinOp::identity(b.dim());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            LinOp ac = anticommutator(*G[i], *G[j]);
            double gij = (-0.5 * ac.at(probe, probe)).real();
            tm.g(i, j) = gij;
            worst = std::max(worst, interior_norm(add(ac, I, 1.0, 2.0 * gij), b.truncation, 4));
        }
    tm.anticommutator_violation = worst;
    tm.formula_deviation = (tm.g - shown).cwiseAbs().maxCoeff();
    tm.det = tm.g.determinant();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(tm.g);
    for (int k = 0; k < 2; ++k) {
        double v = es.eigenvalues()(k);
        if (v > 1e-12) ++tm.positive;
        else if (v < -1e-12) ++tm.negative;
    }
    return tm;
}

TwoFormCoefficients torus_two_form_coefficients(const TorusParams& p) {
    const double dl = p.delta();
    if (!torus_ellipticity(p).elliptic) throw DegenerateTau("two-form: tau1+ tau2- = tau2+ tau1- (zero denominator)");
    return {(p.t2m() - p.t2p()) / dl, (p.t1p() - p.t1m()) / dl};
}

AxiomCheck torus_orientation_two_form(const TorusParams& p) {
    TwoFormCoefficients c = torus_two_form_coefficients(p);
    TripleBundle b = build_torus(p);
    LinOp sigma_built = compose(b.krein, *b.grading).scaled(-1.0);
    std::vector<TimeTerm> terms{{"1", "U*", "U", c.u}, {"1", "V*", "V", c.v}};
    LinOp sigma = time_orientation_form(b, terms);
    double v = interior_norm(sub(sigma_built, sigma), b.truncation, 2);
    // gamma = beta sigma as a consequence
    double v2 = interior_norm(sub(*b.grading, compose(b.krein, sigma)), b.truncation, 2);
    return make_check("orientation.two_form", std::max(v, v2), 1.0);
}

std::vector<TimeTerm> torus_time_terms(const TorusParams& p) {
    const double dl = p.delta();
    if (!torus_ellipticity(p).elliptic) throw DegenerateTau("time orientation: degenerate tau");
    const double w = (p.t2m() + p.t2p()) / dl;
    const double z = -(p.t1m() + p.t1p()) / dl;
    return {{"1", "U*", "U", w}, {"1", "V*", "V", z}};
}

SuiteOptions torus_suite_options(const TorusParams& p) {
    SuiteOptions o;
    if (torus_ellipticity(p).elliptic) o.time_terms = torus_time_terms(p);
    return o;
}

}  // namespace ncl
