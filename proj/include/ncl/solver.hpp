// Dirac families as null spaces of order-one / reality / Krein constraint rows.
#pragma once

#include <array>
#include <random>

#include "ncl/triple.hpp"

namespace ncl {

struct Unknown {
    std::string group;             // e.g. "d+.re"
    std::vector<double> features;  // index labels the closed form is fitted in
    std::string label;
    bool core = false;  // every column it touches is deep enough for the order-one rows
};

// D(x) = sum_k x_k pieces[k], x real
struct DiracAnsatz {
    std::string geometry;
    std::vector<std::string> feature_names;
    std::vector<Unknown> unknowns;
    std::vector<LinOp> pieces;

    int size() const { return static_cast<int>(unknowns.size()); }
    LinOp evaluate(const Eigen::VectorXd& x) const;
    int index_of(const std::string& label) const;  // -1 if absent
};

DiracAnsatz torus_ansatz(const TripleBundle& b);
DiracAnsatz sphere_ansatz(const TripleBundle& b);

struct ConstraintOptions {
    bool order_one = true;
    bool reality = true;
    bool beta_selfadjoint = true;
    bool reverse_pairs = false;  // generator-pair order, for invariance tests
    int order_one_depth = 2;
};

struct ConstraintSystem {
    RowSystem rows;
    long order_one_rows = 0, reality_rows = 0, beta_rows = 0;
};
ConstraintSystem assemble_constraints(const DiracAnsatz& ansatz, const TripleBundle& b,
                                      const ConstraintOptions& o = {});

struct AffineFit {
    std::string group;
    std::vector<double> coefficients;  // one per feature, then the constant
    double residual = 0.0;             // relative to the core norm of the vector
    bool affine = false;
};

struct SolutionFamily {
    int unknowns = 0;
    int raw_kernel_dim = 0;  // including window-boundary freedom
    int kernel_dim = 0;      // rank on core unknowns
    DenseR kernel;           // orthonormal raw kernel, unknowns x raw_kernel_dim
    DenseR basis;            // kernel vectors whose core parts are orthonormal
    std::vector<std::vector<AffineFit>> fits;  // per basis vector, per group
    std::vector<double> singular_values;
    double sigma_max = 0.0;
};
SolutionFamily solve_family(const ConstraintSystem& sys, const DiracAnsatz& ansatz, double tol = 1e-9,
                            double fit_tol = 1e-8);

// max relative residual of the core parts of v after projection onto the family's core span
double span_deviation(const SolutionFamily& f, const DiracAnsatz& ansatz, const std::vector<Eigen::VectorXd>& v);
// ||K^T r|| / ||r||: zero iff r lies in the row space
double row_space_residual(const SolutionFamily& f, const Eigen::VectorXd& r);

// closed-form directions: n + sigma+, m + sigma- per chirality (plus constants when asked)
std::vector<Eigen::VectorXd> torus_oracle_directions(const DiracAnsatz& a, const std::array<int, 2>& spin,
                                                     bool constants);
// the four recursions of the real parts of d+ (or d-) around (n, m)
std::vector<Eigen::VectorXd> torus_recursions(const DiracAnsatz& a, int n, int m, char chirality);
// (R, Re S, Im S) directions
std::vector<Eigen::VectorXd> sphere_oracle_directions(const DiracAnsatz& a);
// D = i c 1
Eigen::VectorXd sphere_imaginary_constant(const DiracAnsatz& a);

// suite on bundles whose Dirac operator is replaced by each kernel vector and a random combination
AxiomReport verify_family(const SolutionFamily& f, const DiracAnsatz& ansatz, const TripleBundle& b,
                          const SuiteOptions& o, std::uint64_t seed = 7);

struct NegativeControl {
    double base_violation = 0.0;
    double perturbed_violation = 0.0;
    double magnitude = 0.0;
};
// x + delta with |delta| = magnitude, delta orthogonal to the order-one kernel
NegativeControl negative_control(const DiracAnsatz& ansatz, const TripleBundle& b, const SolutionFamily& order_one,
                                 const Eigen::VectorXd& x, double magnitude = 1e-3, std::uint64_t seed = 11);

}  // namespace ncl
