// Lorentzian spinor model on SU_q(2): spin representation, Dirac operator, probes.
#pragma once

#include "ncl/spectrum.hpp"
#include "ncl/triple.hpp"

namespace ncl {

// [x] = (q^x - q^-x) / (q - 1/q)
double qnum(double x, double q);

struct SuqParams {
    double q = 0.5;
    double r_up = 1.0, r_dn = -1.0;
    double R_up = 1.5, R_dn = 0.5;
    double S = 1.0;
    int J2 = 16;               // cutoff 2j
    double phase_twist = 0.0;  // multiplies the spin matrices at source j by exp(i twist 2j)

    // r_up = -r_dn = r, R_up = 3r/2, R_dn = r/2
    static SuqParams reduced(double r, double q = 0.5, double S = 1.0, int J2 = 16);
    bool is_reduced() const;
};

// 2x2 spin matrices, entry (t, s) maps source spin s to target spin t; 0 = up
struct SpinMatrices {
    Eigen::Matrix2d a_plus, a_minus, b_plus, b_minus;
};
SpinMatrices suq2_spin_matrices(int j2, int mu2, int n2, double q);

// off-diagonal Dirac coefficient (j+n+1/2) q^(j-2n) ([j-n+1/2]/[j+n+1/2])^(1/2), without S
double suq2_offdiag(int j2, int n2, double q);

TripleBundle build_suq2(const SuqParams& p);
SuiteOptions suq2_suite_options();

// ba = q ab, b*a = q ab*, bb* = b*b, a*a + q^2 b*b = 1, aa* + bb* = 1 on interior vectors
AxiomReport suq2_relations(const TripleBundle& b, double q);

// number of D entries between different (j, mu) sectors
long suq2_sector_leakage(const TripleBundle& b);

struct SuqSpectrumReport {
    SpectralReport spectrum;
    double edge_deviation = 0.0;      // edge states vs i(r_up 2j + R_up)
    double edge_real_part = 0.0;      // max |Re| over edge eigenvalues
    double interior_deviation = 0.0;  // 2x2 sectors vs closed form below
    std::string interior_form;
    int edge_count = 0;
};
SuqSpectrumReport suq2_dirac_spectrum(const SuqParams& p);

struct SuqAbsRow {
    int j2 = 0;
    double max_rel_error = 0.0;  // approximate formula, best sign choice
    double budget = 0.0;         // q^j
};
struct SuqAbsReport {
    SpectralReport spectrum;           // eigenvalues of ⟨D⟩²
    double closed_form_deviation = 0.0;  // vs alpha^2 + S^2 c^2, delta^2 + S^2 c^2
    std::vector<SuqAbsRow> approx;     // vs 1/2 r^2 (j+1 +- 1/2)^2 + S^2 q^(2(j-n)) (j+n+1/2)^2
    CountingTable counting;
};
SuqAbsReport suq2_abs_spectrum(const SuqParams& p, const std::vector<int>& counting_sizes = {8, 12, 16},
                               const std::vector<double>& lambdas = {3.0, 6.0, 9.0});

struct SuqBoundedness {
    LadderReport dirac, regularity;
    std::vector<int> tail_j2;
    std::vector<double> tail_norms;  // ||[beta, pi(a)] P_{j >= J}||
    double fitted_slope = 0.0;       // d log(norm) / dj
    double expected_slope = 0.0;     // 2 ln q
    bool decay_ok = false;           // within 20%
    double beta_commutator_norm = 0.0;
    double order_one_violation = 0.0;
    bool order_one_nonzero = false;
    long sector_leak = 0;
};
SuqBoundedness suq2_boundedness_probe(const SuqParams& p, const std::vector<int>& ladder_j2 = {4, 8, 16},
                                      int tail_cut_j2 = 18, int tail_from_j2 = 6, int tail_to_j2 = 16);

}  // namespace ncl
