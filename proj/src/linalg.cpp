#include "ncl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseQR>

namespace ncl {

namespace {

void require_same(const LinOp& a, const LinOp& b, const char* what) {
    if (a.dim() != b.dim())
        throw LinearAlgebraError(std::string(what) + ": dimension mismatch (" +
                                 std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

// Sparse accumulator reused across columns.
struct Accum {
    std::vector<cplx> val;
    std::vector<char> used;
    std::vector<int> rows;
    explicit Accum(int n) : val(static_cast<size_t>(n)), used(static_cast<size_t>(n), 0) {}
    void add(int r, cplx v) {
        if (!used[r]) {
            used[r] = 1;
            rows.push_back(r);
            val[r] = v;
        } else {
            val[r] += v;
        }
    }
    std::vector<Entry> flush() {
        std::sort(rows.begin(), rows.end());
        std::vector<Entry> out;
        out.reserve(rows.size());
        for (int r : rows) {
            out.push_back({r, val[r]});
            used[r] = 0;
            val[r] = 0.0;
        }
        rows.clear();
        return out;
    }
};

}  // namespace

LinOp build_from_columns(int dim, std::vector<std::vector<Entry>> cols) {
    double mx = 0.0;
    for (auto& c : cols)
        for (auto& e : c) mx = std::max(mx, std::abs(e.v));
    const double cut = kDedupRel * mx;
    for (auto& c : cols) {
        c.erase(std::remove_if(c.begin(), c.end(),
                               [&](const Entry& e) { return std::abs(e.v) <= cut; }),
                c.end());
    }
    LinOp out(dim);
    out.cols_ = std::move(cols);
    return out;
}

LinOp LinOp::from_triplets(int dim, std::vector<Triplet> t) {
    std::vector<std::vector<Entry>> cols(static_cast<size_t>(dim));
    for (const auto& x : t) {
        if (x.row < 0 || x.row >= dim || x.col < 0 || x.col >= dim)
            throw LinearAlgebraError("triplet index out of range");
        cols[x.col].push_back({x.row, x.v});
    }
    for (auto& c : cols) {
        std::sort(c.begin(), c.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
        std::vector<Entry> merged;
        for (auto& e : c) {
            if (!merged.empty() && merged.back().row == e.row)
                merged.back().v += e.v;
            else
                merged.push_back(e);
        }
        c = std::move(merged);
    }
    return build_from_columns(dim, std::move(cols));
}

LinOp LinOp::identity(int dim) {
    LinOp o(dim);
    for (int i = 0; i < dim; ++i) o.cols_[i].push_back({i, 1.0});
    return o;
}

LinOp LinOp::diag(const CVec& d) {
    std::vector<Triplet> t;
    for (int i = 0; i < static_cast<int>(d.size()); ++i) t.push_back({i, i, d[i]});
    return from_triplets(static_cast<int>(d.size()), std::move(t));
}

LinOp LinOp::from_dense(const DenseC& m) {
    if (m.rows() != m.cols()) throw LinearAlgebraError("from_dense: matrix not square");
    std::vector<Triplet> t;
    for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < m.rows(); ++r)
            if (m(r, c) != cplx(0.0)) t.push_back({r, c, m(r, c)});
    return from_triplets(static_cast<int>(m.rows()), std::move(t));
}

size_t LinOp::nnz() const {
    size_t n = 0;
    for (auto& c : cols_) n += c.size();
    return n;
}

double LinOp::max_abs() const {
    double m = 0.0;
    for (auto& c : cols_)
        for (auto& e : c) m = std::max(m, std::abs(e.v));
    return m;
}

cplx LinOp::at(int r, int c) const {
    for (auto& e : cols_[c])
        if (e.row == r) return e.v;
    return 0.0;
}

DenseC LinOp::to_dense() const {
    DenseC m = DenseC::Zero(dim_, dim_);
    for (int c = 0; c < dim_; ++c)
        for (auto& e : cols_[c]) m(e.row, c) = e.v;
    return m;
}

std::vector<Triplet> LinOp::triplets() const {
    std::vector<Triplet> t;
    for (int c = 0; c < dim_; ++c)
        for (auto& e : cols_[c]) t.push_back({e.row, c, e.v});
    return t;
}

CVec LinOp::apply(const CVec& x) const {
    CVec y(static_cast<size_t>(dim_), 0.0);
    for (int c = 0; c < dim_; ++c) {
        if (x[c] == cplx(0.0)) continue;
        for (auto& e : cols_[c]) y[e.row] += e.v * x[c];
    }
    return y;
}

CVec LinOp::apply_adjoint(const CVec& x) const {
    CVec y(static_cast<size_t>(dim_), 0.0);
    for (int c = 0; c < dim_; ++c) {
        cplx s = 0.0;
        for (auto& e : cols_[c]) s += std::conj(e.v) * x[e.row];
        y[c] = s;
    }
    return y;
}

LinOp LinOp::keep_columns(const std::vector<char>& mask) const {
    LinOp o(dim_);
    for (int c = 0; c < dim_; ++c)
        if (mask[c]) o.cols_[c] = cols_[c];
    return o;
}

LinOp LinOp::conj_entries() const {
    LinOp o = *this;
    for (auto& c : o.cols_)
        for (auto& e : c) e.v = std::conj(e.v);
    return o;
}

LinOp LinOp::scaled(cplx s) const {
    if (s == cplx(0.0)) return LinOp(dim_);
    LinOp o = *this;
    for (auto& c : o.cols_)
        for (auto& e : c) e.v *= s;
    return o;
}

bool LinOp::operator==(const LinOp& o) const {
    if (dim_ != o.dim_) return false;
    for (int c = 0; c < dim_; ++c) {
        if (cols_[c].size() != o.cols_[c].size()) return false;
        for (size_t k = 0; k < cols_[c].size(); ++k)
            if (cols_[c][k].row != o.cols_[c][k].row || cols_[c][k].v != o.cols_[c][k].v) return false;
    }
    return true;
}

LinOp compose(const LinOp& a, const LinOp& b) {
    require_same(a, b, "compose");
    const int n = a.dim();
    Accum acc(n);
    std::vector<std::vector<Entry>> cols(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
        for (auto& eb : b.col(c))
            for (auto& ea : a.col(eb.row)) acc.add(ea.row, ea.v * eb.v);
        cols[c] = acc.flush();
    }
    return build_from_columns(n, std::move(cols));
}

LinOp adjoint(const LinOp& a) {
    const int n = a.dim();
    std::vector<std::vector<Entry>> cols(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c)
        for (auto& e : a.col(c)) cols[e.row].push_back({c, std::conj(e.v)});
    // rows were pushed in increasing c, so each column is already sorted
    return build_from_columns(n, std::move(cols));
}

LinOp add(const LinOp& a, const LinOp& b, cplx alpha, cplx beta) {
    require_same(a, b, "add");
    const int n = a.dim();
    Accum acc(n);
    std::vector<std::vector<Entry>> cols(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
        for (auto& e : a.col(c)) acc.add(e.row, alpha * e.v);
        for (auto& e : b.col(c)) acc.add(e.row, beta * e.v);
        cols[c] = acc.flush();
    }
    return build_from_columns(n, std::move(cols));
}

LinOp commutator(const LinOp& a, const LinOp& b) {
    require_same(a, b, "commutator");
    return sub(compose(a, b), compose(b, a));
}

LinOp anticommutator(const LinOp& a, const LinOp& b) {
    require_same(a, b, "anticommutator");
    return add(compose(a, b), compose(b, a));
}

LinOp linear_inverse(const LinOp& l) {
    const int n = l.dim();
    // monomial fast path: one entry per column on distinct rows
    bool monomial = true;
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int c = 0; c < n && monomial; ++c) {
        if (l.col(c).size() != 1 || seen[l.col(c)[0].row]) monomial = false;
        else seen[l.col(c)[0].row] = 1;
    }
    if (monomial) {
        std::vector<Triplet> t;
        for (int c = 0; c < n; ++c) {
            const Entry& e = l.col(c)[0];
            t.push_back({c, e.row, 1.0 / e.v});
        }
        return LinOp::from_triplets(n, std::move(t));
    }
    if (n > dense_cap) throw LinearAlgebraError("linear_inverse: non-monomial operator above dense cap");
    Eigen::FullPivLU<DenseC> lu(l.to_dense());
    if (!lu.isInvertible()) throw LinearAlgebraError("linear_inverse: singular linear part");
    DenseC inv = lu.inverse();
    return LinOp::from_dense(inv);
}

LinOp conj_by_antilinear(const AntiLinOp& j, const LinOp& t) {
    require_same(j.linear_part, t, "conj_by_antilinear");
    LinOp inv = linear_inverse(j.linear_part);
    return compose(j.linear_part, compose(t.conj_entries(), inv));
}

LinOp antilinear_square(const AntiLinOp& j) {
    return compose(j.linear_part, j.linear_part.conj_entries());
}

LinOp linear_times_antilinear(const LinOp& t, const AntiLinOp& j) {
    return compose(t, j.linear_part);
}

LinOp antilinear_times_linear(const AntiLinOp& j, const LinOp& t) {
    return compose(j.linear_part, t.conj_entries());
}

// ---------------------------------------------------------------- eigen

namespace {

double residual(const DenseC& a, cplx lam, const Eigen::VectorXcd& v) {
    double nv = v.norm();
    if (nv == 0.0) return std::numeric_limits<double>::infinity();
    return (a * v - lam * v).norm() / nv;
}

// eigenpairs of a 2x2 from the characteristic polynomial
void eig2(const DenseC& a, std::vector<cplx>& lam, std::vector<Eigen::VectorXcd>& vec) {
    cplx p = a(0, 0), q = a(0, 1), r = a(1, 0), s = a(1, 1);
    cplx half_tr = 0.5 * (p + s);
    cplx disc = std::sqrt(0.25 * (p - s) * (p - s) + q * r);
    lam = {half_tr + disc, half_tr - disc};
    vec.clear();
    for (int k = 0; k < 2; ++k) {
        Eigen::VectorXcd v1(2), v2(2);
        v1 << q, lam[k] - p;
        v2 << lam[k] - s, r;
        Eigen::VectorXcd v = v1.norm() >= v2.norm() ? v1 : v2;
        if (v.norm() == 0.0) {
            // scalar matrix, any basis works
            v << (k == 0 ? 1.0 : 0.0), (k == 0 ? 0.0 : 1.0);
        }
        vec.push_back(v / v.norm());
    }
}

}  // namespace

EigResult eig_dense(const DenseC& a, double tol, bool keep_vectors) {
    const int n = static_cast<int>(a.rows());
    if (a.rows() != a.cols()) throw LinearAlgebraError("eig_dense: matrix not square");
    if (n > dense_cap) throw LinearAlgebraError("eig_dense: dimension above dense cap");
    EigResult out;
    if (n == 0) return out;
    std::vector<cplx> lam;
    std::vector<Eigen::VectorXcd> vec;
    if (n == 1) {
        lam = {a(0, 0)};
        Eigen::VectorXcd v(1);
        v << 1.0;
        vec = {v};
    } else if (n == 2) {
        eig2(a, lam, vec);
    } else {
        Eigen::ComplexEigenSolver<DenseC> es(a, true);
        if (es.info() != Eigen::Success) throw LinearAlgebraError("eig_dense: QR iteration did not converge");
        for (int k = 0; k < n; ++k) {
            lam.push_back(es.eigenvalues()(k));
            vec.push_back(es.eigenvectors().col(k));
        }
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) {
        double r = residual(a, lam[k], vec[k]);
        out.eigenvalues.push_back(lam[k]);
        out.residuals.push_back(r);
        if (r > tol * scale) out.flagged = true;
    }
    if (keep_vectors) {
        std::vector<CVec> vs;
        for (auto& v : vec) vs.emplace_back(v.data(), v.data() + v.size());
        out.vectors = std::move(vs);
    }
    return out;
}

EigResult eig_dense(const LinOp& a, double tol, bool keep_vectors) {
    if (a.dim() > dense_cap) throw LinearAlgebraError("eig_dense: dimension above dense cap");
    return eig_dense(a.to_dense(), tol, keep_vectors);
}

HermitianEig eig_hermitian(const DenseC& a, double herm_tol) {
    if (a.rows() != a.cols()) throw LinearAlgebraError("eig_hermitian: matrix not square");
    HermitianEig out;
    if (a.rows() == 0) return out;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
        throw LinearAlgebraError("eig_hermitian: input is not Hermitian");
    DenseC h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseC> es(h);
    if (es.info() != Eigen::Success) throw LinearAlgebraError("eig_hermitian: did not converge");
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    out.vectors = es.eigenvectors();
    return out;
}

HermitianEig eig_hermitian(const LinOp& a, double herm_tol) {
    if (a.dim() > dense_cap) throw LinearAlgebraError("eig_hermitian: dimension above dense cap");
    return eig_hermitian(a.to_dense(), herm_tol);
}

// ------------------------------------------------------------ nullspace

void RowSystem::add_row(std::vector<std::pair<int, double>> r) {
    for (auto& [c, v] : r)
        if (c < 0 || c >= ncols) throw LinearAlgebraError("RowSystem: column out of range");
    rows.push_back(std::move(r));
}

namespace {

NullspaceResult from_svd_of(const DenseR& m, double tol, int ncols) {
    NullspaceResult out;
    Eigen::BDCSVD<DenseR> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    out.singular_values.assign(s.data(), s.data() + s.size());
    out.sigma_max = s.size() ? s(0) : 0.0;
    int rank = 0;
    for (int k = 0; k < s.size(); ++k)
        if (s(k) > tol * out.sigma_max) ++rank;
    out.rank = rank;
    out.basis = svd.matrixV().rightCols(ncols - rank);
    return out;
}

}  // namespace

NullspaceResult nullspace(const DenseR& rows, double tol) {
    const int n = static_cast<int>(rows.cols());
    if (rows.rows() == 0) {
        NullspaceResult out;
        out.basis = DenseR::Identity(n, n);
        return out;
    }
    if (rows.rows() > 2 * rows.cols()) {
        Eigen::HouseholderQR<DenseR> qr(rows);
        DenseR r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        return from_svd_of(r, tol, n);
    }
    return from_svd_of(rows, tol, n);
}

NullspaceResult nullspace(const RowSystem& rs, double tol) {
    const int n = rs.ncols;
    const int m = static_cast<int>(rs.nrows());
    if (m == 0 || n == 0) {
        NullspaceResult out;
        out.basis = DenseR::Identity(n, n);
        return out;
    }
    if (static_cast<double>(m) * n <= 2.0e6) {
        DenseR a = DenseR::Zero(m, n);
        for (int i = 0; i < m; ++i)
            for (auto& [c, v] : rs.rows[i]) a(i, c) += v;
        return nullspace(a, tol);
    }
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < m; ++i)
        for (auto& [c, v] : rs.rows[i]) t.emplace_back(i, c, v);
    Eigen::SparseMatrix<double> a(m, n);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
    qr.compute(a);
    if (qr.info() != Eigen::Success) throw LinearAlgebraError("nullspace: sparse QR failed");
    const int k = std::min(m, n);
    DenseR r = DenseR(qr.matrixR()).topRows(k);
    NullspaceResult out = from_svd_of(r, tol, n);
    // A P = Q R, so kernel vectors of A are P v
    DenseR b = qr.colsPermutation() * out.basis;
    out.basis = b;
    return out;
}

int numerical_rank(const DenseR& m, double tol) {
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<DenseR> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (int k = 0; k < s.size(); ++k)
        if (s(k) > tol * s(0)) ++r;
    return r;
}

// ----------------------------------------------------------------- norms

namespace {

// power iteration on A^dagger A, started on the columns that carry entries
NormResult power_norm(const LinOp& a, double tol, int max_iter) {
    NormResult out;
    const int n = a.dim();
    std::mt19937_64 rng(0x5eedULL + static_cast<uint64_t>(n));
    std::normal_distribution<double> g(0.0, 1.0);
    CVec x(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
        double re = g(rng), im = g(rng);
        x[c] = a.col(c).empty() ? cplx(0.0) : cplx(re, im);
    }
    auto nrm = [](const CVec& v) {
        double s = 0.0;
        for (auto& z : v) s += std::norm(z);
        return std::sqrt(s);
    };
    double nx = nrm(x);
    for (auto& z : x) z /= nx;
    double prev = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        CVec y = a.apply(x);
        double sigma = nrm(y);
        if (sigma == 0.0) {
            out.value = 0.0;
            out.iterations = it;
            return out;
        }
        CVec z = a.apply_adjoint(y);
        double nz = nrm(z);
        for (int c = 0; c < n; ++c) x[c] = z[c] / nz;
        out.value = sigma;
        out.iterations = it;
        if (it > 5 && std::abs(sigma - prev) <= tol * sigma) return out;
        prev = sigma;
    }
    out.converged = false;
    return out;
}

int find_root(std::vector<int>& p, int i) {
    while (p[i] != i) i = p[i] = p[p[i]];
    return i;
}

}  // namespace

// The norm is the largest over the components of the row/column graph; each small component is
// solved as a dense Gram eigenproblem, large ones fall back to power iteration.
NormResult op_norm_ex(const LinOp& a, double tol, int max_iter) {
    NormResult out;
    const int n = a.dim();
    if (n == 0 || a.nnz() == 0) return out;
    // nodes 0..n-1 are columns, n..2n-1 rows
    std::vector<int> parent(static_cast<size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) parent[i] = i;
    for (int c = 0; c < n; ++c)
        for (const Entry& e : a.col(c)) {
            int x = find_root(parent, c), y = find_root(parent, n + e.row);
            if (x != y) parent[x] = y;
        }
    std::map<int, std::vector<int>> cols;
    for (int c = 0; c < n; ++c)
        if (!a.col(c).empty()) cols[find_root(parent, c)].push_back(c);
    constexpr int kDenseMax = 600;
    std::vector<int> local(static_cast<size_t>(n), -1);
    for (auto& [root, cs] : cols) {
        const int s = static_cast<int>(cs.size());
        double sigma = 0.0;
        if (s <= kDenseMax) {
            // rows of this component
            std::vector<int> rows;
            for (int c : cs)
                for (const Entry& e : a.col(c))
                    if (local[e.row] < 0) {
                        local[e.row] = static_cast<int>(rows.size());
                        rows.push_back(e.row);
                    }
            DenseC m = DenseC::Zero(static_cast<int>(rows.size()), s);
            for (int k = 0; k < s; ++k)
                for (const Entry& e : a.col(cs[k])) m(local[e.row], k) += e.v;
            for (int r : rows) local[r] = -1;
            if (s == 1 || rows.size() == 1) {
                sigma = m.norm();
            } else {
                DenseC gram = m.rows() < m.cols() ? DenseC(m * m.adjoint()) : DenseC(m.adjoint() * m);
                Eigen::SelfAdjointEigenSolver<DenseC> es(gram, Eigen::EigenvaluesOnly);
                sigma = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
            }
        } else {
            std::vector<char> keep(static_cast<size_t>(n), 0);
            for (int c : cs) keep[c] = 1;
            NormResult p = power_norm(a.keep_columns(keep), tol, max_iter);
            sigma = p.value;
            out.iterations = std::max(out.iterations, p.iterations);
            out.converged = out.converged && p.converged;
        }
        out.value = std::max(out.value, sigma);
    }
    return out;
}

double op_norm(const LinOp& a, double tol) { return op_norm_ex(a, tol).value; }

double frobenius(const LinOp& a) {
    double s = 0.0;
    for (int c = 0; c < a.dim(); ++c)
        for (auto& e : a.col(c)) s += std::norm(e.v);
    return std::sqrt(s);
}

}  // namespace ncl
