#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "ncl/sphere.hpp"

using namespace ncl;

namespace {

double interior_diff(const TripleBundle& b, const LinOp& x, const LinOp& y, int depth) {
    return interior_norm(sub(x, y), b.truncation, depth);
}

// eigenvalues of one (l, n) block, by dense diagonalization of the block
std::vector<cplx> block_values(const SphereBlock& blk) {
    Eigen::ComplexEigenSolver<DenseC> es(blk.d);
    std::vector<cplx> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return v;
}

bool contains(const std::vector<cplx>& v, cplx z, double tol) {
    return std::any_of(v.begin(), v.end(), [&](cplx w) { return std::abs(w - z) < tol; });
}

}  // namespace

TEST_CASE("representation entries and relations") {
    SphereParams p;
    p.L2 = 4;
    p.theta = 0.0;
    TripleBundle b = build_sphere(p);
    const Basis& B = b.truncation.basis;
    // pi(a)|0,0,0> = (1/sqrt 2)|1/2,1/2,1/2>
    const int c0 = B.find({0, 0, 0, 0}), c1 = B.find({1, 1, 1, 0});
    CHECK(std::abs(b.gen("a").at(c1, c0) - 1 / std::sqrt(2.0)) < 1e-15);
    const LinOp I = LinOp::identity(b.dim());
    LinOp a = b.gen("a"), bb = b.gen("b"), as = b.gen("a*"), bs = b.gen("b*");
    CHECK(interior_diff(b, add(compose(as, a), compose(bs, bb)), I, 2) < 1e-14);
    CHECK(interior_diff(b, add(compose(a, as), compose(bb, bs)), I, 2) < 1e-14);
    // commutative at theta = 0
    CHECK(interior_norm(commutator(a, bb), b.truncation, 2) < 1e-14);
    CHECK(interior_norm(commutator(a, bs), b.truncation, 2) < 1e-14);
}

TEST_CASE("deformed relations") {
    SphereParams p;
    p.L2 = 4;
    p.theta = 0.3;
    TripleBundle b = build_sphere(p);
    LinOp a = b.gen("a"), bb = b.gen("b");
    const double c = interior_norm(commutator(a, bb), b.truncation, 2);
    CHECK(c > 1e-3);
    // ab and ba differ by a unit phase
    const cplx lam = std::polar(1.0, 2 * M_PI * p.theta);
    double best = 1e9;
    for (cplx ph : {lam, 1.0 / lam, std::sqrt(lam), 1.0 / std::sqrt(lam)})
        best = std::min(best, interior_norm(sub(compose(a, bb), compose(bb, a).scaled(ph)), b.truncation, 2));
    CHECK(best < 1e-14);
}

TEST_CASE("Krein and real structure") {
    SphereParams p;
    p.L2 = 4;
    p.S = cplx(0.3, -0.8);
    TripleBundle b = build_sphere(p);
    const LinOp I = LinOp::identity(b.dim());
    CHECK(compose(b.krein, b.krein) == I.scaled(-1.0));
    CHECK(adjoint(b.krein) == b.krein.scaled(-1.0));
    CHECK(antilinear_square(b.reality) == I);
    CHECK(b.signs.epsilon == -1);
    AxiomReport r = run_suite(b, sphere_suite_options(p));
    for (auto& c : r.checks) {
        CAPTURE(c.name);
        CAPTURE(c.violation);
        CHECK(c.pass);
    }
    for (auto& g : b.generators) CHECK(commutator(b.krein, g.second).nnz() == 0);
}

TEST_CASE("blocks") {
    SphereParams p;
    p.L2 = 6;
    p.S = cplx(0.5, 0.5);
    auto blocks = sphere_blocks(p);
    std::map<int, int> per_l;
    for (auto& blk : blocks) {
        per_l[blk.l2] += static_cast<int>(blk.indices.size());
        if (blk.l2 == 1) CHECK(blk.indices.size() == 4);
        if (blk.l2 == 0) {
            CHECK(blk.indices.size() == 2);
            CHECK(blk.d.cwiseAbs().maxCoeff() == 0.0);
        }
    }
    for (auto [l2, n] : per_l) CHECK(n == 2 * (l2 + 1) * (l2 + 1));
    CHECK(sphere_block_leakage(build_sphere(p)) == 0);
}

TEST_CASE("spectrum closed forms") {
    // R = 0: real, zero modes with growing multiplicity
    SphereParams z;
    z.R = 0.0;
    z.S = 1.0;
    long zeros_prev = 0;
    for (int L2 : {2, 4, 6}) {
        z.L2 = L2;
        long zeros = 0;
        for (auto& l : sphere_spectrum(z).spectrum.lines) {
            CHECK(std::abs(l.value.imag()) < 1e-12);
            if (std::abs(l.value) < 1e-12) zeros += l.multiplicity;
        }
        CHECK(zeros > zeros_prev);
        zeros_prev = zeros;
    }
    // S = 0: purely imaginary
    SphereParams s0;
    s0.S = 0.0;
    s0.L2 = 4;
    for (auto& l : sphere_spectrum(s0).spectrum.lines) CHECK(std::abs(l.value.real()) < 1e-12);

    // generic: per block, values -iR/2 +- sqrt(|S|^2 (l+1/2)^2 - (|S|^2 + R^2)(m+1/2)^2) and i R l twice
    for (auto [R, S] : std::vector<std::pair<double, cplx>>{{1.0, 1.0}, {1.0, cplx(0, 1)}, {2.0, 0.5}}) {
        SphereParams p;
        p.R = R;
        p.S = S;
        p.L2 = 5;
        for (auto& blk : sphere_blocks(p)) {
            auto v = block_values(blk);
            const double l = 0.5 * blk.l2;
            for (int m2 = -blk.l2; m2 <= blk.l2 - 2; m2 += 2) {
                const double m = 0.5 * m2;
                cplx root = std::sqrt(cplx(std::norm(S) * (l + 0.5) * (l + 0.5) - (std::norm(S) + R * R) * (m + 0.5) * (m + 0.5)));
                CHECK(contains(v, cplx(0, -0.5 * R) + root, 1e-9));
                CHECK(contains(v, cplx(0, -0.5 * R) - root, 1e-9));
            }
            CHECK(contains(v, cplx(0, R * l), 1e-9));
        }
        SphereSpectrumReport rep = sphere_spectrum(p);
        CHECK(rep.c == 1.0);
        CHECK(rep.deviation_one < 1e-9);
        CHECK(rep.deviation_half > 1e-3);
        CHECK(rep.reflection_deviation < 1e-9);
    }
}

TEST_CASE("abs spectrum") {
    SphereParams p;
    p.R = 1.0;
    p.S = 1.0;
    p.L2 = 4;
    SphereAbsReport r = sphere_abs_spectrum(p);
    CHECK(r.max_rel_deviation < 1e-9);
    // l = 1/2: the pair at m = -1/2 gives R^2 (m+1/2 +- 1/2)^2 + |S|^2 (l-m)(l+m+1) = 1/4 + 1 twice,
    // the unpaired edge states give R^2 l^2 = 1/4
    std::multiset<double> half;
    for (auto& l : r.spectrum.lines)
        if (l.block.a == 1)
            for (int k = 0; k < l.multiplicity; ++k) half.insert(std::round(l.value.real() * 1e9) / 1e9);
    CHECK(half == std::multiset<double>{0.25, 0.25, 1.25, 1.25, 0.25, 0.25, 1.25, 1.25});
    // l = 0: D vanishes there
    auto o = sphere_abs_oracle(p, 0);
    CHECK(o == std::vector<double>{0.0, 0.0});
}

TEST_CASE("spectrum does not depend on theta") {
    SphereParams a;
    a.L2 = 4;
    a.theta = 0.0;
    SphereParams b = a;
    b.theta = (std::sqrt(5.0) - 1) / 2;
    auto fa = flatten(sphere_spectrum(a).spectrum), fb = flatten(sphere_spectrum(b).spectrum);
    REQUIRE(fa.size() == fb.size());
    for (size_t k = 0; k < fa.size(); ++k) CHECK(fa[k] == fb[k]);
}

TEST_CASE("time orientation") {
    for (double R : {1.0, 2.0}) {
        SphereParams p;
        p.R = R;
        p.L2 = 4;
        SphereTimeReport t = sphere_time_orientation(p);
        CHECK(t.check.pass);
        CHECK(std::abs(t.coefficient - 1.0 / R) < 1e-15);
        CHECK(t.printed_violation > 0.1);
        CHECK(t.lsq_residual < 1e-9);
    }
    SphereParams p;
    p.L2 = 4;
    TripleBundle b = build_sphere(p);
    LinOp beta = time_orientation_form(b, sphere_time_terms(p));
    CHECK(interior_norm(add(compose(beta, beta), LinOp::identity(b.dim())), b.truncation, 3) < 1e-12);
}

TEST_CASE("metric") {
    SphereParams p;
    p.theta = 0.0;
    p.L2 = 6;
    p.R = 2.0;
    p.S = 1.0;
    SphereMetric m = sphere_metric(p);
    CHECK(m.scalar_violation < 1e-9);
    CHECK(m.expected(0, 0) == doctest::Approx(-0.5));
    CHECK(m.expected(2, 2) == doctest::Approx(0.5));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(m.g(i, j)) < 1e-9);
    CHECK(m.positive == 1);
    CHECK(m.negative == 2);
    // measured g is twice the expected matrix
    CHECK((m.g - 2.0 * m.expected).cwiseAbs().maxCoeff() < 1e-9);
    SphereParams t = p;
    t.theta = 0.2;
    CHECK_THROWS_AS(sphere_metric(t), std::invalid_argument);
    CHECK(sphere_metric(t, true).formal);
}
