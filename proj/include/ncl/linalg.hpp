// Sparse complex operators on truncated Hilbert spaces, plus the few dense
// kernels (eigen, svd, nullspace) the geometries need.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncl {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using DenseC = Eigen::MatrixXcd;
using DenseR = Eigen::MatrixXd;

inline constexpr double kDedupRel = 1e-14;

struct Entry {
    int row;
    cplx v;
};

struct Triplet {
    int row;
    int col;
    cplx v;
};

class LinearAlgebraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Column-major sparse operator. Each column keeps its entries sorted by row.
class LinOp {
public:
    LinOp() = default;
    explicit LinOp(int dim) : dim_(dim), cols_(static_cast<size_t>(dim)) {}

    // duplicates are summed, then tiny entries (relative to the largest) dropped
    static LinOp from_triplets(int dim, std::vector<Triplet> t);
    static LinOp identity(int dim);
    static LinOp zero(int dim) { return LinOp(dim); }
    static LinOp diag(const CVec& d);
    static LinOp from_dense(const DenseC& m);

    int dim() const { return dim_; }
    const std::vector<Entry>& col(int c) const { return cols_[static_cast<size_t>(c)]; }
    size_t nnz() const;
    double max_abs() const;
    cplx at(int r, int c) const;

    DenseC to_dense() const;
    std::vector<Triplet> triplets() const;
    CVec apply(const CVec& x) const;
    CVec apply_adjoint(const CVec& x) const;

    // keep only columns flagged in mask; other columns become empty
    LinOp keep_columns(const std::vector<char>& mask) const;
    LinOp conj_entries() const;
    LinOp scaled(cplx s) const;

    bool operator==(const LinOp& o) const;

private:
    friend LinOp build_from_columns(int, std::vector<std::vector<Entry>>);
    int dim_ = 0;
    std::vector<std::vector<Entry>> cols_;
};

LinOp compose(const LinOp& a, const LinOp& b);
LinOp adjoint(const LinOp& a);
LinOp add(const LinOp& a, const LinOp& b, cplx alpha = 1.0, cplx beta = 1.0);
inline LinOp sub(const LinOp& a, const LinOp& b) { return add(a, b, 1.0, -1.0); }
LinOp commutator(const LinOp& a, const LinOp& b);
LinOp anticommutator(const LinOp& a, const LinOp& b);

// A v = L conj(v)
struct AntiLinOp {
    LinOp linear_part;
    int dim() const { return linear_part.dim(); }
};

LinOp linear_inverse(const LinOp& l);
// J T J^{-1} = L conj(T) L^{-1}
LinOp conj_by_antilinear(const AntiLinOp& j, const LinOp& t);
// linear part of J^2
LinOp antilinear_square(const AntiLinOp& j);
// linear parts of T J and J T
LinOp linear_times_antilinear(const LinOp& t, const AntiLinOp& j);
LinOp antilinear_times_linear(const AntiLinOp& j, const LinOp& t);

struct EigResult {
    std::vector<cplx> eigenvalues;
    std::vector<double> residuals;
    std::optional<std::vector<CVec>> vectors;
    bool flagged = false;  // some residual exceeded the requested tolerance
};

struct HermitianEig {
    std::vector<double> eigenvalues;  // ascending
    DenseC vectors;
};

inline int dense_cap = 4096;

EigResult eig_dense(const LinOp& a, double tol = 1e-10, bool keep_vectors = false);
EigResult eig_dense(const DenseC& a, double tol = 1e-10, bool keep_vectors = false);
HermitianEig eig_hermitian(const LinOp& a, double herm_tol = 1e-9);
HermitianEig eig_hermitian(const DenseC& a, double herm_tol = 1e-9);

// Real row system stored sparsely, rows appended one at a time.
struct RowSystem {
    int ncols = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;
    void add_row(std::vector<std::pair<int, double>> r);
    size_t nrows() const { return rows.size(); }
};

struct NullspaceResult {
    DenseR basis;                        // ncols x k, orthonormal columns
    std::vector<double> singular_values; // descending
    double sigma_max = 0.0;
    int rank = 0;
};

NullspaceResult nullspace(const RowSystem& rows, double tol = 1e-9);
NullspaceResult nullspace(const DenseR& rows, double tol = 1e-9);
int numerical_rank(const DenseR& m, double tol = 1e-9);

struct NormResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
};

NormResult op_norm_ex(const LinOp& a, double tol = 1e-12, int max_iter = 20000);
double op_norm(const LinOp& a, double tol = 1e-12);
double frobenius(const LinOp& a);

}  // namespace ncl
