#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freeconv/errors.hpp"
#include "freeconv/moments.hpp"

namespace freeconv {

namespace {
constexpr int kMaxColumns = 6;
constexpr double kClamp = 1e-12;
}  // namespace

StieltjesOptions StieltjesOptions::defaults() {
    StieltjesOptions o;
    for (int k = 3; k <= 20; ++k) o.eps.push_back(std::ldexp(1.0, -k));
    return o;
}

StieltjesPoint stieltjes_point(const std::function<cplx(cplx)>& G, double x, const StieltjesOptions& opt) {
    const auto& eps = opt.eps;
    std::vector<std::vector<double>> R;
    std::vector<double> raw;
    double prev_best = 0.0, best = 0.0;
    int growth = 0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        double v = -G(cplx(x, eps[k])).imag() / std::numbers::pi;
        if (!std::isfinite(v)) fail(ErrorCode::NonConvergent, "Cauchy transform not finite near the axis");
        raw.push_back(v);
        std::vector<double> row{v};
        int cols = std::min<int>(static_cast<int>(k), kMaxColumns - 1);
        for (int j = 1; j <= cols; ++j) {
            double e_far = eps[k - j], e_near = eps[k];
            row.push_back((e_far * row[j - 1] - e_near * R[k - 1][j - 1]) / (e_far - e_near));
        }
        R.push_back(row);
        best = row.back();
        if (k >= 1 && raw[k - 1] > 0.0 && v / raw[k - 1] > 1.8)
            ++growth;
        else
            growth = 0;
        if (growth >= 4 && v > 1e3) {
            std::ostringstream os;
            os.precision(17);
            os << "imaginary part grows like a pole near x = " << x;
            fail(ErrorCode::NonConvergent, os.str());
        }
        if (k >= 2 && std::abs(best - prev_best) < opt.tolerance) return {std::max(best, 0.0), true};
        prev_best = best;
    }
    return {best < 0.0 ? 0.0 : best, false};
}

DensityTable stieltjes_invert(const std::function<cplx(cplx)>& G, const std::vector<double>& grid,
                              const StieltjesOptions& opt) {
    DensityTable t;
    t.x = grid;
    t.density.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0 && !(grid[i] > grid[i - 1])) fail(ErrorCode::NonMonotoneGrid, "inversion grid must increase");
        double d = stieltjes_point(G, grid[i], opt).density;
        // below the extrapolation tolerance the value is indistinguishable from 0
        t.density.push_back(d < std::max(kClamp, opt.tolerance) ? 0.0 : d);
    }
    // support: runs of positive density, closed off at the neighbouring zero samples
    for (std::size_t i = 0; i < grid.size();) {
        if (t.density[i] == 0.0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < grid.size() && t.density[j + 1] > 0.0) ++j;
        t.support.push_back({grid[i > 0 ? i - 1 : i], grid[j + 1 < grid.size() ? j + 1 : j]});
        i = j + 1;
    }
    return t;
}

DensityTable stieltjes_invert(const std::function<cplx(cplx)>& G, Interval window, std::size_t n,
                              const StieltjesOptions& opt) {
    if (n < 2 || !(window.right > window.left) || !std::isfinite(window.left) || !std::isfinite(window.right))
        fail(ErrorCode::InvalidParameter, "inversion window must be finite with n >= 2");
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = window.left + (window.right - window.left) * static_cast<double>(i) / static_cast<double>(n - 1);
    return stieltjes_invert(G, grid, opt);
}

}  // namespace freeconv
