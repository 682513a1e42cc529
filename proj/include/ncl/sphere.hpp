// (1,2) Lorentzian spectral triple on the isospectral three-sphere.
#pragma once

#include <map>

#include "ncl/spectrum.hpp"
#include "ncl/triple.hpp"

namespace ncl {

struct SphereParams {
    double theta = 0.6180339887498949;
    double R = 1.0;
    cplx S = 1.0;
    int L2 = 8;  // cutoff 2L, basis l = 0, 1/2, ..., L
};

TripleBundle build_sphere(const SphereParams& p);

struct SphereBlock {
    int l2 = 0, n2 = 0;
    std::vector<int> indices;  // into the bundle basis
    DenseC d;                  // D restricted to the block
};
std::vector<SphereBlock> sphere_blocks(const SphereParams& p);
// number of D entries connecting different (l, n) blocks; exactly 0 expected
long sphere_block_leakage(const TripleBundle& b);

// Closed-form eigenvalue families of one (l, n) block with root prefactor c.
std::vector<cplx> sphere_block_oracle(const SphereParams& p, int l2, double c);
// eigenvalues of ⟨D⟩² on one block
std::vector<double> sphere_abs_oracle(const SphereParams& p, int l2);

struct SphereSpectrumReport {
    SpectralReport spectrum;
    double deviation_half = 0.0;  // best matching with c = 1/2
    double deviation_one = 0.0;   // with c = 1
    double c = 1.0;               // the prefactor the numerics support
    double reflection_deviation = 0.0;          // paired values under z -> conj(z) - iR, edge states i R l removed
    double reflection_deviation_full = 0.0;     // same map on the whole block
    double reflection_deviation_printed = 0.0;  // whole block under z -> -iR - conj(z)
};
SphereSpectrumReport sphere_spectrum(const SphereParams& p);

struct SphereAbsReport {
    SpectralReport spectrum;  // eigenvalues of ⟨D⟩²
    double max_rel_deviation = 0.0;
};
SphereAbsReport sphere_abs_spectrum(const SphereParams& p);

struct SphereTimeReport {
    AxiomCheck check;                // with the coefficients found to work
    double printed_violation = 0.0;  // coefficient i/R, A = a*, B = b*
    std::map<std::string, cplx> lsq; // best coefficients of x[D,y]
    double lsq_residual = 0.0;
    cplx coefficient;                // coefficient used in check
};
// coefficient multiplying a*[D,a] + b*[D,b] - a[D,a*] - b[D,b*] is 1/R
std::vector<TimeTerm> sphere_time_terms(const SphereParams& p);
SphereTimeReport sphere_time_orientation(const SphereParams& p);

struct SphereMetric {
    Eigen::Matrix3d g;
    Eigen::Matrix3d expected;
    double scalar_violation = 0.0;     // worst non-scalar part of an anticommutator
    double deviation = 0.0;            // max |g - expected|
    double printed_forms_scalar_violation = 0.0;
    int positive = 0, negative = 0;
    bool formal = false;
};
SphereMetric sphere_metric(const SphereParams& p, bool formal = false);

SuiteOptions sphere_suite_options(const SphereParams& p);

}  // namespace ncl
