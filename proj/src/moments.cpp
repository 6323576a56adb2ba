#include "freeconv/moments.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// integral of g(x) * weight(theta) over x = mid + half*cos(theta), theta in [0, pi]
template <class Fn>
double theta_integral(Fn&& fn) {
    return GK::integrate(fn, 0.0, std::numbers::pi, 15, 1e-14);
}

std::vector<double> family_moments(const Shape& shape, int n) {
    std::vector<double> out(n + 1, 0.0);
    auto fill = [&](double mid, double half, auto weight) {
        for (int k = 0; k <= n; ++k)
            out[k] = theta_integral([&](double th) {
                double x = mid + half * std::cos(th);
                return std::pow(x, k) * weight(th, x);
            });
    };
    const double pi = std::numbers::pi;
    if (auto* s = std::get_if<Semicircle>(&shape)) {
        double r = 2.0 * std::sqrt(s->variance);
        fill(s->center, r, [&](double th, double) { return 2.0 / pi * std::sin(th) * std::sin(th); });
    } else if (auto* a = std::get_if<Arcsine>(&shape)) {
        fill(0.5 * (a->left + a->right), 0.5 * (a->right - a->left), [&](double, double) { return 1.0 / pi; });
    } else if (auto* m = std::get_if<MarchenkoPastur>(&shape)) {
        double r = std::sqrt(m->rate);
        double lo = m->jump * (1 - r) * (1 - r), hi = m->jump * (1 + r) * (1 + r);
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        fill(mid, half, [&](double th, double x) {
            double s = std::sin(th);
            // sqrt((x-lo)(hi-x)) dx / (2 pi a x) with x = mid + half cos
            return half * half * s * s / (2.0 * pi * m->jump * x);
        });
        if (m->rate < 1.0) out[0] += 1.0 - m->rate;  // atom at the origin only feeds m0
    } else if (auto* t = std::get_if<Tabulated>(&shape)) {
        using GL = boost::math::quadrature::gauss<double, 10>;
        for (std::size_t i = 0; i + 1 < t->grid.size(); ++i) {
            double s0 = t->grid[i], s1 = t->grid[i + 1], h = s1 - s0;
            double d0 = t->density[i], d1 = t->density[i + 1];
            const auto& xs = GL::abscissa();
            const auto& ws = GL::weights();
            for (std::size_t j = 0; j < xs.size(); ++j)
                for (int sgn : {-1, 1}) {
                    if (xs[j] == 0.0 && sgn > 0) continue;
                    double u = 0.5 * (1.0 + sgn * xs[j]);
                    double x = s0 + h * u;
                    double w = 0.5 * h * ws[j] * (d0 + (d1 - d0) * u);
                    double p = 1.0;
                    for (int k = 0; k <= n; ++k, p *= x) out[k] += w * p;
                }
        }
    }
    return out;
}

}  // namespace

MomentVector moments(const Measure& mu, int n) {
    if (n < 0 || n > kMaxMomentOrder) fail(ErrorCode::InvalidParameter, "moment order must lie in [0, 12]");
    if (n >= 1 && mu.has_heavy_tail()) fail(ErrorCode::HeavyTail, "a Cauchy component has no moments of order >= 1");
    MomentVector out;
    out.m.assign(n + 1, 0.0);
    for (const auto& a : mu.atoms()) {
        double p = 1.0;
        for (int k = 0; k <= n; ++k, p *= a.position) out.m[k] += a.mass * p;
    }
    for (const auto& c : mu.components()) {
        if (std::holds_alternative<CauchyLaw>(c.shape)) {
            out.m[0] += c.weight;
            continue;
        }
        auto fm = family_moments(c.shape, n);
        for (int k = 0; k <= n; ++k) out.m[k] += c.weight * fm[k];
    }
    out.m[0] = 1.0;
    return out;
}

std::pair<double, double> mean_variance(const Measure& mu) {
    auto m = moments(mu, 2);
    return {m[1], std::max(0.0, m[2] - m[1] * m[1])};
}

double hankel_min_eigenvalue(const MomentVector& m) {
    int d = m.order() / 2 + 1;
    Eigen::MatrixXd H(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) H(i, j) = m[i + j];
    Eigen::VectorXd s(d);
    for (int i = 0; i < d; ++i) s(i) = H(i, i) > 0 ? 1.0 / std::sqrt(H(i, i)) : 1.0;
    Eigen::MatrixXd Hn = s.asDiagonal() * H * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hn, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool hankel_psd(const MomentVector& m, double tol) {
    for (int i = 0; 2 * i <= m.order(); ++i)
        if (m[2 * i] < -tol) return false;
    return hankel_min_eigenvalue(m) >= -tol;
}

double DensityTable::trapezoid_moment(int k) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s += 0.5 * (x[i + 1] - x[i]) * (std::pow(x[i], k) * density[i] + std::pow(x[i + 1], k) * density[i + 1]);
    return s;
}

}  // namespace freeconv
