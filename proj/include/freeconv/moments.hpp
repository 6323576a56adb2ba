#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "freeconv/measure.hpp"

namespace freeconv {

constexpr int kMaxMomentOrder = 12;

// m[0] = 1, m[k] = k-th raw moment.
struct MomentVector {
    std::vector<double> m;

    int order() const { return static_cast<int>(m.size()) - 1; }
    double operator[](std::size_t k) const { return m[k]; }
};

MomentVector moments(const Measure& mu, int n);
std::pair<double, double> mean_variance(const Measure& mu);

// Smallest eigenvalue of the Hankel matrices (m_{i+j}), scaled by their norm.
double hankel_min_eigenvalue(const MomentVector& m);
bool hankel_psd(const MomentVector& m, double tol = 1e-8);

struct DensityTable {
    std::vector<double> x;
    std::vector<double> density;
    std::vector<Interval> support;

    std::size_t size() const { return x.size(); }
    double trapezoid_moment(int k) const;
};

struct StieltjesOptions {
    std::vector<double> eps;  // decreasing
    double tolerance = 1e-9;
    static StieltjesOptions defaults();
};

struct StieltjesPoint {
    double density;
    bool converged;
};

// one point; throws NonConvergent when the values grow like an atom's pole
StieltjesPoint stieltjes_point(const std::function<cplx(cplx)>& G, double x, const StieltjesOptions& opt);

DensityTable stieltjes_invert(const std::function<cplx(cplx)>& G, Interval window, std::size_t n,
                              const StieltjesOptions& opt = StieltjesOptions::defaults());
DensityTable stieltjes_invert(const std::function<cplx(cplx)>& G, const std::vector<double>& grid,
                              const StieltjesOptions& opt = StieltjesOptions::defaults());

}  // namespace freeconv
