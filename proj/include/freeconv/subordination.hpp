#pragma once

#include <vector>

#include "freeconv/measure.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

constexpr double kProbeHeight = 1e-9;      // y_min for the f_p = 0 test
constexpr double kOmegaResidual = 1e-10;
constexpr double kPsiResidual = 1e-8;

// H(z) = p z + (1 - p) F(z)
struct HFunction {
    ReciprocalTransform F;
    double p;

    FValue eval(cplx z) const;
    cplx operator()(cplx z) const { return eval(z).f; }
    double threshold() const { return 1.0 / (p - 1.0); }
};

HFunction make_h(const Measure& mu, double p);

double mass_ratio(const ReciprocalTransform& F, double x, double y);
double mass_ratio(const Measure& mu, double x, double y);

double f_p(const HFunction& H, double x);
double f_p(const Measure& mu, double p, double x);

struct PsiPoint {
    double x;
    double f;
    double psi;
    double residual;  // |Im H(x + i f)|
};

PsiPoint psi_point(const HFunction& H, double x);
double psi_p(const HFunction& H, double x);
double psi_p(const Measure& mu, double p, double x);

// x with psi_p(x) = u, i.e. the boundary preimage of a real point
double invert_psi(const HFunction& H, double u);

struct OmegaSolution {
    cplx w;
    double residual;
    int iterations;
};

OmegaSolution solve_omega(const HFunction& H, cplx z);
cplx omega_p(const HFunction& H, cplx z);
cplx omega_p(const Measure& mu, double p, cplx z);

struct VPlusInterval {
    double left;
    double right;
    bool left_refined = true;
    bool right_refined = true;
    bool below_resolution = false;
};

Interval default_x_window(const ReciprocalTransform& F, double p);

std::vector<VPlusInterval> v_plus(const HFunction& H, Interval window, int coarse_n = 2001);
std::vector<VPlusInterval> v_plus(const Measure& mu, double p, Interval window, int coarse_n = 2001);

struct SubordinationSolution {
    double p;
    std::vector<double> grid;
    std::vector<double> fp_values;
    std::vector<double> psi_values;
    std::vector<VPlusInterval> vplus_intervals;
};

SubordinationSolution solve_subordination(const HFunction& H, Interval window, int coarse_n = 2001);

}  // namespace freeconv
