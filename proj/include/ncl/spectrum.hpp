// Block-wise spectra with multiplicities.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ncl/linalg.hpp"
#include "ncl/triple.hpp"

namespace ncl {

struct SpectralLine {
    Label block;        // geometry specific block key
    std::string label;  // printable form of the key
    cplx value;
    int multiplicity = 1;
    double residual = 0.0;
};

struct SpectralReport {
    std::vector<SpectralLine> lines;
    double max_residual = 0.0;
    bool flagged = false;
    // comparison against a closed form, when one is available
    double max_formula_deviation = 0.0;
    std::string convention;
    std::vector<CountingTable> counting;
};

using BlockKey = std::function<Label(const Label&)>;
using BlockName = std::function<std::string(const Label&)>;

// Groups basis vectors by key, diagonalizes op on each group (eig_dense) and
// merges equal eigenvalues (|difference| <= merge_tol) into one line.
SpectralReport block_spectrum(const LinOp& op, const Basis& basis, const BlockKey& key, const BlockName& name,
                              double tol = 1e-10, double merge_tol = 1e-9);

// Same grouping for a Hermitian operator, eigenvalues real.
SpectralReport block_spectrum_hermitian(const LinOp& op, const Basis& basis, const BlockKey& key,
                                        const BlockName& name, double merge_tol = 1e-9);

// Flat multiset of values (with multiplicity), sorted by (re, im).
std::vector<cplx> flatten(const SpectralReport& r);

// 2l in doubled units -> "3/2", "1"
std::string half_str(int doubled);

}  // namespace ncl
