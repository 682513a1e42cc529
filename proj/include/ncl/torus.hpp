// (1,1) Lorentzian spectral triple on the noncommutative torus.
#pragma once

#include <array>

#include "ncl/spectrum.hpp"
#include "ncl/triple.hpp"

namespace ncl {

struct TorusParams {
    double theta = 0.6180339887498949;             // lambda = exp(2 pi i theta)
    std::array<double, 4> tau{1.0, 0.0, 0.0, 1.0};  // tau1+, tau2+, tau1-, tau2-
    std::array<int, 2> spin{0, 0};                  // 2 sigma+, 2 sigma- (each 0 or 1)
    int N = 6;

    double t1p() const { return tau[0]; }
    double t2p() const { return tau[1]; }
    double t1m() const { return tau[2]; }
    double t2m() const { return tau[3]; }
    // tau1+ tau2- - tau2+ tau1-
    double delta() const { return tau[0] * tau[3] - tau[1] * tau[2]; }
    double d_plus(int n, int m) const;
    double d_minus(int n, int m) const;
};

TripleBundle build_torus(const TorusParams& p);
// Gamma blocks [[0, tau_i+], [tau_i-, 0]]
Eigen::Matrix2d torus_gamma(const TorusParams& p, int i);

SpectralReport torus_spectrum(const TorusParams& p);

struct Ellipticity {
    bool elliptic = false;
    Eigen::Matrix2d quadratic_form;
    double det = 0.0;
};
Ellipticity torus_ellipticity(const TorusParams& p);

struct TorusMetric {
    Eigen::Matrix2d g;
    double det = 0.0;
    double det_closed_form = 0.0;
    double anticommutator_violation = 0.0;  // operator identity on interior
    double formula_deviation = 0.0;         // measured g vs displayed g
    int positive = 0, negative = 0;
    bool formal = false;
};
TorusMetric torus_metric(const TorusParams& p);

// coefficients of U^dagger[D,U] and V^dagger[D,V]
struct TwoFormCoefficients {
    double u = 0.0, v = 0.0;
};
TwoFormCoefficients torus_two_form_coefficients(const TorusParams& p);
AxiomCheck torus_orientation_two_form(const TorusParams& p);
std::vector<TimeTerm> torus_time_terms(const TorusParams& p);

SuiteOptions torus_suite_options(const TorusParams& p);

class DegenerateTau : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ncl
