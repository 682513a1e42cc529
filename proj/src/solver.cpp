#include "ncl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ncl/parallel.hpp"
#include "ncl/spectrum.hpp"

namespace ncl {

LinOp DiracAnsatz::evaluate(const Eigen::VectorXd& x) const {
    if (x.size() != size()) throw std::invalid_argument("ansatz: coefficient vector has wrong length");
    std::vector<Triplet> t;
    for (int k = 0; k < size(); ++k) {
        if (x(k) == 0.0) continue;
        for (auto& tr : pieces[k].triplets()) t.push_back({tr.row, tr.col, x(k) * tr.v});
    }
    const int dim = pieces.empty() ? 0 : pieces[0].dim();
    return LinOp::from_triplets(dim, std::move(t));
}

int DiracAnsatz::index_of(const std::string& label) const {
    for (int k = 0; k < size(); ++k)
        if (unknowns[k].label == label) return k;
    return -1;
}

namespace {

void push_complex(DiracAnsatz& a, const TripleBundle& b, const std::string& name, const std::string& idx,
                  std::vector<double> features, const std::vector<std::pair<int, int>>& entries) {
    const int min_level = [&] {
        int m = b.truncation.level_cap;
        for (auto& [r, c] : entries) m = std::min(m, b.truncation.level[c]);
        return m;
    }();
    for (int part = 0; part < 2; ++part) {
        const cplx v = part == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
        std::vector<Triplet> t;
        for (auto& [r, c] : entries) t.push_back({r, c, v});
        Unknown u;
        u.group = name + (part == 0 ? ".re" : ".im");
        u.features = features;
        u.label = name + "[" + idx + "]" + (part == 0 ? ".re" : ".im");
        u.core = min_level >= 2;
        a.unknowns.push_back(u);
        a.pieces.push_back(LinOp::from_triplets(b.dim(), std::move(t)));
    }
}

}  // namespace

DiracAnsatz torus_ansatz(const TripleBundle& b) {
    if (b.geometry != "torus") throw std::invalid_argument("torus ansatz needs a torus bundle");
    DiracAnsatz a;
    a.geometry = "torus";
    a.feature_names = {"n", "m"};
    const Basis& B = b.truncation.basis;
    for (int i = 0; i < B.size(); ++i) {
        const Label& l = B[i];
        if (l.c != 0) continue;
        const int j = B.find({l.a, l.b, 1, 0});
        const std::string idx = std::to_string(l.a) + "," + std::to_string(l.b);
        std::vector<double> f{static_cast<double>(l.a), static_cast<double>(l.b)};
        // D|-> = d+ |+>, D|+> = d- |->
        push_complex(a, b, "d+", idx, f, {{i, j}});
        push_complex(a, b, "d-", idx, f, {{j, i}});
    }
    return a;
}

DiracAnsatz sphere_ansatz(const TripleBundle& b) {
    if (b.geometry != "sphere") throw std::invalid_argument("sphere ansatz needs a sphere bundle");
    DiracAnsatz a;
    a.geometry = "sphere";
    a.feature_names = {"l", "m"};
    const Basis& B = b.truncation.basis;
    std::map<std::pair<int, int>, std::array<std::vector<std::pair<int, int>>, 4>> groups;
    for (int i = 0; i < B.size(); ++i) {
        const Label& l = B[i];
        auto& g = groups[{l.a, l.b}];
        if (l.s == 0) {
            g[0].push_back({i, i});
            if (l.b < l.a) g[1].push_back({B.find({l.a, l.b + 2, l.c, 1}), i});
        } else {
            if (l.b > -l.a) g[2].push_back({B.find({l.a, l.b - 2, l.c, 0}), i});
            g[3].push_back({i, i});
        }
    }
    static const char* names[4] = {"d11", "d21", "d12", "d22"};
    for (auto& [lm, g] : groups) {
        const std::string idx = half_str(lm.first) + "," + half_str(lm.second);
        std::vector<double> f{0.5 * lm.first, 0.5 * lm.second};
        for (int k = 0; k < 4; ++k)
            if (!g[k].empty()) push_complex(a, b, names[k], idx, f, g[k]);
    }
    return a;
}

namespace {

using RowList = std::vector<std::vector<std::pair<int, double>>>;

void emit_complex_rows(const std::map<std::pair<int, int>, std::vector<std::pair<int, cplx>>>& entries, RowList& out) {
    for (auto& [key, list] : entries) {
        std::map<int, cplx> acc;
        for (auto& [k, v] : list) acc[k] += v;
        double scale = 0.0;
        for (auto& [k, v] : acc) scale = std::max(scale, std::abs(v));
        if (scale == 0.0) continue;
        for (int part = 0; part < 2; ++part) {
            std::vector<std::pair<int, double>> row;
            for (auto& [k, v] : acc) {
                double x = part == 0 ? v.real() : v.imag();
                if (std::abs(x) > 1e-14 * scale) row.push_back({k, x});
            }
            if (!row.empty()) out.push_back(std::move(row));
        }
    }
}

// entries of sum_k x_k M_k on the selected columns, as rows in x
RowList rows_of(const std::vector<LinOp>& ms, const std::vector<char>& mask) {
    std::map<std::pair<int, int>, std::vector<std::pair<int, cplx>>> entries;
    for (int k = 0; k < static_cast<int>(ms.size()); ++k)
        for (int c = 0; c < ms[k].dim(); ++c)
            if (mask[c])
                for (auto& e : ms[k].col(c)) entries[{c, e.row}].push_back({k, e.v});
    RowList out;
    emit_complex_rows(entries, out);
    return out;
}

}  // namespace

ConstraintSystem assemble_constraints(const DiracAnsatz& ansatz, const TripleBundle& b, const ConstraintOptions& o) {
    ConstraintSystem sys;
    sys.rows.ncols = ansatz.size();
    const int nu = ansatz.size();
    if (o.order_one) {
        const auto mask = b.truncation.mask(o.order_one_depth);
        if (std::none_of(mask.begin(), mask.end(), [](char c) { return c != 0; }))
            throw std::invalid_argument("assemble_constraints: empty interior, enlarge the window");
        const auto& g = b.generators;
        const int ng = static_cast<int>(g.size());
        std::vector<LinOp> jaj;
        for (auto& [n, op] : g) jaj.push_back(conj_by_antilinear(b.reality, op));
        std::vector<std::pair<int, int>> pairs;
        for (int x = 0; x < ng; ++x)
            for (int y = 0; y < ng; ++y) pairs.push_back({x, y});
        if (o.reverse_pairs) std::reverse(pairs.begin(), pairs.end());
        std::vector<RowList> per(pairs.size());
        parallel_for(static_cast<int>(pairs.size()), [&](int p) {
            const auto [x, y] = pairs[p];
            std::vector<LinOp> ms(static_cast<size_t>(nu));
            for (int k = 0; k < nu; ++k) ms[k] = commutator(jaj[x], commutator(ansatz.pieces[k], g[y].second));
            per[p] = rows_of(ms, mask);
        });
        for (auto& rl : per)
            for (auto& r : rl) {
                sys.rows.add_row(std::move(r));
                ++sys.order_one_rows;
            }
    }
    const std::vector<char> all(static_cast<size_t>(b.dim()), 1);
    if (o.reality) {
        const double eps = b.signs.epsilon;
        std::vector<LinOp> ms;
        for (auto& p : ansatz.pieces)
            ms.push_back(add(linear_times_antilinear(p, b.reality), antilinear_times_linear(b.reality, p), 1.0, -eps));
        for (auto& r : rows_of(ms, all)) {
            sys.rows.add_row(std::move(r));
            ++sys.reality_rows;
        }
    }
    if (o.beta_selfadjoint) {
        std::vector<LinOp> ms;
        for (auto& p : ansatz.pieces) ms.push_back(sub(adjoint(p), compose(b.krein, compose(p, b.krein))));
        for (auto& r : rows_of(ms, all)) {
            sys.rows.add_row(std::move(r));
            ++sys.beta_rows;
        }
    }
    return sys;
}

namespace {

std::vector<int> core_indices(const DiracAnsatz& a) {
    std::vector<int> idx;
    for (int k = 0; k < a.size(); ++k)
        if (a.unknowns[k].core) idx.push_back(k);
    return idx;
}

DenseR core_rows(const DenseR& m, const std::vector<int>& idx) {
    DenseR out(static_cast<int>(idx.size()), m.cols());
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) out.row(i) = m.row(idx[i]);
    return out;
}

}  // namespace

SolutionFamily solve_family(const ConstraintSystem& sys, const DiracAnsatz& ansatz, double tol, double fit_tol) {
    SolutionFamily f;
    f.unknowns = ansatz.size();
    NullspaceResult ns = nullspace(sys.rows, tol);
    f.kernel = ns.basis;
    f.raw_kernel_dim = static_cast<int>(ns.basis.cols());
    f.singular_values = ns.singular_values;
    f.sigma_max = ns.sigma_max;

    const auto core = core_indices(ansatz);
    if (core.empty() || f.raw_kernel_dim == 0) {
        f.basis = DenseR::Zero(f.unknowns, 0);
        return f;
    }
    DenseR kc = core_rows(f.kernel, core);
    Eigen::JacobiSVD<DenseR> svd(kc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-8) ++rank;
    f.kernel_dim = rank;
    f.basis = DenseR(f.unknowns, rank);
    for (int i = 0; i < rank; ++i) f.basis.col(i) = f.kernel * svd.matrixV().col(i) / sv(i);

    std::map<std::string, std::vector<int>> groups;
    for (int k : core) groups[ansatz.unknowns[k].group].push_back(k);
    const int nf = static_cast<int>(ansatz.feature_names.size());
    for (int i = 0; i < rank; ++i) {
        std::vector<AffineFit> fits;
        for (auto& [g, ks] : groups) {
            const int n = static_cast<int>(ks.size());
            DenseR A(n, nf + 1);
            Eigen::VectorXd y(n);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < nf; ++c) A(r, c) = ansatz.unknowns[ks[r]].features[c];
                A(r, nf) = 1.0;
                y(r) = f.basis(ks[r], i);
            }
            Eigen::VectorXd c = A.completeOrthogonalDecomposition().solve(y);
            AffineFit fit;
            fit.group = g;
            fit.coefficients.assign(c.data(), c.data() + c.size());
            // relative to the whole vector, so identically zero groups fit trivially
            double vn = 0.0;
            for (int k : core) vn += f.basis(k, i) * f.basis(k, i);
            vn = std::sqrt(vn);
            fit.residual = vn > 0.0 ? (A * c - y).norm() / vn : 0.0;
            fit.affine = fit.residual < fit_tol;
            fits.push_back(fit);
        }
        f.fits.push_back(std::move(fits));
    }
    return f;
}

double span_deviation(const SolutionFamily& f, const DiracAnsatz& ansatz, const std::vector<Eigen::VectorXd>& v) {
    const auto core = core_indices(ansatz);
    DenseR q = core_rows(f.basis, core);
    if (q.cols() > 0) q = q.householderQr().householderQ() * DenseR::Identity(q.rows(), q.cols());
    double worst = 0.0;
    for (auto& x : v) {
        Eigen::VectorXd xc(static_cast<int>(core.size()));
        for (int i = 0; i < static_cast<int>(core.size()); ++i) xc(i) = x(core[i]);
        const double n = xc.norm();
        if (n == 0.0) continue;
        Eigen::VectorXd r = q.cols() > 0 ? Eigen::VectorXd(xc - q * (q.transpose() * xc)) : xc;
        worst = std::max(worst, r.norm() / n);
    }
    return worst;
}

double row_space_residual(const SolutionFamily& f, const Eigen::VectorXd& r) {
    const double n = r.norm();
    if (n == 0.0) return 0.0;
    return (f.kernel.transpose() * r).norm() / n;
}

std::vector<Eigen::VectorXd> torus_oracle_directions(const DiracAnsatz& a, const std::array<int, 2>& spin,
                                                     bool constants) {
    std::vector<Eigen::VectorXd> out;
    for (const char* g : {"d+.re", "d-.re"}) {
        Eigen::VectorXd vn = Eigen::VectorXd::Zero(a.size()), vm = vn, vc = vn;
        for (int k = 0; k < a.size(); ++k)
            if (a.unknowns[k].group == g) {
                vn(k) = a.unknowns[k].features[0] + 0.5 * spin[0];
                vm(k) = a.unknowns[k].features[1] + 0.5 * spin[1];
                vc(k) = 1.0;
            }
        out.push_back(vn);
        out.push_back(vm);
        if (constants) out.push_back(vc);
    }
    return out;
}

std::vector<Eigen::VectorXd> torus_recursions(const DiracAnsatz& a, int n, int m, char chirality) {
    auto id = [&](int nn, int mm) {
        const std::string l = std::string("d") + chirality + "[" + std::to_string(nn) + "," + std::to_string(mm) + "].re";
        int k = a.index_of(l);
        if (k < 0) throw std::invalid_argument("recursion leaves the window: " + l);
        return k;
    };
    std::vector<Eigen::VectorXd> out;
    auto make = [&](std::vector<std::pair<std::pair<int, int>, double>> terms) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(a.size());
        for (auto& [nm, c] : terms) v(id(nm.first, nm.second)) += c;
        out.push_back(v);
    };
    make({{{n + 1, m}, 1.0}, {{n, m}, -2.0}, {{n - 1, m}, 1.0}});
    make({{{n + 1, m}, 1.0}, {{n, m}, -1.0}, {{n + 1, m - 1}, -1.0}, {{n, m - 1}, 1.0}});
    make({{{n, m + 1}, 1.0}, {{n, m}, -1.0}, {{n - 1, m + 1}, -1.0}, {{n - 1, m}, 1.0}});
    make({{{n, m + 1}, 1.0}, {{n, m}, -2.0}, {{n, m - 1}, 1.0}});
    return out;
}

std::vector<Eigen::VectorXd> sphere_oracle_directions(const DiracAnsatz& a) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(a.size()), sr = r, si = r;
    for (int k = 0; k < a.size(); ++k) {
        const auto& u = a.unknowns[k];
        const double l = u.features[0], m = u.features[1];
        const double up = std::sqrt((l + 1 + m) * (l - m)), dn = std::sqrt((l - m + 1) * (l + m));
        if (u.group == "d11.im") r(k) = m;
        if (u.group == "d22.im") r(k) = -m;
        if (u.group == "d21.re") sr(k) = up;
        if (u.group == "d12.re") sr(k) = dn;
        if (u.group == "d21.im") si(k) = up;
        if (u.group == "d12.im") si(k) = -dn;
    }
    return {r, sr, si};
}

Eigen::VectorXd sphere_imaginary_constant(const DiracAnsatz& a) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(a.size());
    for (int k = 0; k < a.size(); ++k)
        if (a.unknowns[k].group == "d11.im" || a.unknowns[k].group == "d22.im") v(k) = 1.0;
    return v;
}

AxiomReport verify_family(const SolutionFamily& f, const DiracAnsatz& ansatz, const TripleBundle& b,
                          const SuiteOptions& o, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> xs;
    for (int i = 0; i < f.basis.cols(); ++i) xs.push_back(f.basis.col(i));
    if (f.basis.cols() > 0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        Eigen::VectorXd c(f.basis.cols());
        for (int i = 0; i < c.size(); ++i) c(i) = nd(rng);
        xs.push_back(f.basis * c);
    }
    AxiomReport out;
    for (size_t i = 0; i < xs.size(); ++i) {
        TripleBundle bi = b;
        bi.dirac = ansatz.evaluate(xs[i] / xs[i].norm());
        AxiomReport r = run_suite(bi, o);
        const std::string tag = i + 1 == xs.size() && f.basis.cols() > 0 ? "family.random." : "family.v" + std::to_string(i) + ".";
        for (auto& c : r.checks) {
            c.name = tag + c.name;
            out.add(c);
        }
    }
    return out;
}

NegativeControl negative_control(const DiracAnsatz& ansatz, const TripleBundle& b, const SolutionFamily& order_one,
                                 const Eigen::VectorXd& x, double magnitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd d(ansatz.size());
    for (int i = 0; i < d.size(); ++i) d(i) = nd(rng);
    d -= order_one.kernel * (order_one.kernel.transpose() * d);
    if (d.norm() == 0.0) throw std::invalid_argument("negative control: kernel is the whole space");
    d *= magnitude / d.norm();
    const Eigen::VectorXd base = x / x.norm();
    NegativeControl nc;
    nc.magnitude = magnitude;
    TripleBundle bb = b;
    bb.dirac = ansatz.evaluate(base);
    nc.base_violation = check_order_one(bb, false).violation;
    bb.dirac = ansatz.evaluate(base + d);
    nc.perturbed_violation = check_order_one(bb, false).violation;
    return nc;
}

}  // namespace ncl
