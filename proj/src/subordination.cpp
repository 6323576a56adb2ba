#include "freeconv/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "freeconv/errors.hpp"
#include "freeconv/parallel.hpp"
#include "roots.hpp"

namespace freeconv {

namespace {

constexpr int kFixedPointBudget = 10000;
constexpr double kFixedPointStep = 1e-13;
constexpr double kNewtonHandoff = 1e-6;
constexpr double kFpTol = 1e-12;
constexpr int kEdgeBisections = 50;

void require_p_above_one(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) fail(ErrorCode::InvalidParameter, "subordination needs p > 1");
}

bool in_vplus(const HFunction& H, double x) { return mass_ratio(H.F, x, kProbeHeight) > H.threshold(); }

// Damped Newton on H(w) = z.  Keeps w in the open upper half-plane when
// z is there; returns the final residual.
double newton_polish(const HFunction& H, cplx z, cplx& w, int max_steps = 60) {
    FValue h = H.eval(w);
    double r = std::abs(h.f - z);
    for (int k = 0; k < max_steps && r > 0.0; ++k) {
        if (!finite(h.df) || h.df == cplx(0.0, 0.0)) break;
        cplx step = (h.f - z) / h.df;
        bool accepted = false;
        for (double lam = 1.0; lam > 1e-6; lam *= 0.5) {
            cplx wn = w - lam * step;
            if (z.imag() > 0.0 ? !(wn.imag() > 0.0) : wn.imag() < 0.0) continue;
            FValue hn = H.eval(wn);
            if (!finite(hn.f)) continue;
            double rn = std::abs(hn.f - z);
            if (rn < r) {
                w = wn;
                h = hn;
                r = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return r;
}

}  // namespace

FValue HFunction::eval(cplx z) const {
    FValue v = F.eval(z);
    return {p * z + (1.0 - p) * v.f, p + (1.0 - p) * v.df};
}

HFunction make_h(const Measure& mu, double p) {
    require_p_above_one(p);
    return {reciprocal(mu), p};
}

double mass_ratio(const ReciprocalTransform& F, double x, double y) {
    if (!(y > 0.0)) fail(ErrorCode::InvalidParameter, "mass_ratio needs y > 0");
    cplx f = F(cplx(x, y));
    return std::max(0.0, f.imag() / y - 1.0);
}

double mass_ratio(const Measure& mu, double x, double y) { return mass_ratio(reciprocal(mu), x, y); }

double f_p(const HFunction& H, double x) {
    require_p_above_one(H.p);
    const double T = H.threshold();
    auto g = [&](double y) { return mass_ratio(H.F, x, y) - T; };
    if (g(kProbeHeight) <= 0.0) return 0.0;
    double lo, hi, glo, ghi;
    double g1 = g(1.0);
    if (g1 > 0.0) {
        lo = 1.0, glo = g1, hi = 2.0, ghi = g(hi);
        while (ghi > 0.0) {
            lo = hi, glo = ghi, hi *= 2.0;
            if (hi > 1e300) fail(ErrorCode::NoConvergence, "boundary curve unbounded");
            ghi = g(hi);
        }
    } else {
        hi = 1.0, ghi = g1, lo = 0.5, glo = g(lo);
        while (glo <= 0.0) {
            hi = lo, ghi = glo, lo *= 0.5;
            if (lo < kProbeHeight) {
                lo = kProbeHeight;
                glo = g(lo);
                break;
            }
            glo = g(lo);
        }
    }
    return detail::solve_bracketed(g, lo, hi, glo, ghi, kFpTol);
}

double f_p(const Measure& mu, double p, double x) { return f_p(make_h(mu, p), x); }

PsiPoint psi_point(const HFunction& H, double x) {
    double f = f_p(H, x);
    cplx h = H(cplx(x, f));
    if (!finite(h)) {
        std::ostringstream os;
        os.precision(17);
        os << "H is singular on the boundary curve at x = " << x;
        fail(ErrorCode::ResidualTooLarge, os.str());
    }
    double res = std::abs(h.imag());
    if (!(res < kPsiResidual)) {
        std::ostringstream os;
        os.precision(17);
        os << "|Im H| = " << res << " on the boundary curve at x = " << x;
        fail(ErrorCode::ResidualTooLarge, os.str());
    }
    return {x, f, h.real(), res};
}

double psi_p(const HFunction& H, double x) { return psi_point(H, x).psi; }
double psi_p(const Measure& mu, double p, double x) { return psi_p(make_h(mu, p), x); }

double invert_psi(const HFunction& H, double u) {
    Interval w = default_x_window(H.F, H.p);
    double a = w.left, b = w.right, span = b - a;
    auto psi = [&](double x) { return psi_p(H, x); };
    double pa = psi(a), pb = psi(b);
    for (int k = 0; pa > u; ++k) {
        if (k > 60) fail(ErrorCode::NoConvergence, "cannot bracket the boundary preimage");
        b = a, pb = pa, a -= span, span *= 2.0, pa = psi(a);
    }
    for (int k = 0; pb < u; ++k) {
        if (k > 60) fail(ErrorCode::NoConvergence, "cannot bracket the boundary preimage");
        a = b, pa = pb, b += span, span *= 2.0, pb = psi(b);
    }
    return detail::solve_bracketed([&](double x) { return psi(x) - u; }, a, b, pa - u, pb - u, 0.0);
}

OmegaSolution solve_omega(const HFunction& H, cplx z) {
    require_p_above_one(H.p);
    if (!finite(z) || z.imag() < 0.0) fail(ErrorCode::InvalidParameter, "omega needs z in the closed upper half-plane");
    OmegaSolution sol{z, 0.0, 0};
    if (z.imag() == 0.0) {
        double x = invert_psi(H, z.real());
        cplx w(x, f_p(H, x));
        sol.residual = std::abs(H(w) - z);
        if (sol.residual > 1e-14 && w.imag() > 0.0) {
            cplx wn = w;
            double rn = newton_polish(H, z, wn, 8);
            if (rn < sol.residual) w = wn, sol.residual = rn;
        }
        sol.w = w;
    } else {
        const double a = 1.0 / H.p, b = 1.0 - 1.0 / H.p;
        cplx w = z + cplx(0.0, 1.0);
        bool done = false;
        double handoff = kNewtonHandoff;
        int it = 0;
        for (; it < kFixedPointBudget; ++it) {
            cplx wn = a * z + b * H.F(w);
            double step = std::abs(wn - w);
            w = wn;
            double scale = std::max(1.0, std::abs(w));
            if (step < kFixedPointStep * scale) break;
            if (step < handoff * scale) {
                handoff *= 1e-2;
                cplx wt = w;
                if (newton_polish(H, z, wt) < 1e-3 * kOmegaResidual) {
                    w = wt;
                    done = true;
                    break;
                }
            }
        }
        sol.iterations = it;
        if (!done) newton_polish(H, z, w);
        sol.w = w;
        sol.residual = std::abs(H(w) - z);
    }
    if (!(sol.residual < kOmegaResidual)) {
        std::ostringstream os;
        os.precision(17);
        os << "subordination residual " << sol.residual << " at z = (" << z.real() << ", " << z.imag() << ")";
        fail(ErrorCode::NoConvergence, os.str());
    }
    return sol;
}

cplx omega_p(const HFunction& H, cplx z) { return solve_omega(H, z).w; }
cplx omega_p(const Measure& mu, double p, cplx z) { return omega_p(make_h(mu, p), z); }

Interval default_x_window(const ReciprocalTransform& F, double p) {
    Interval h = F.support_hint();
    double diam = h.width();
    double pad = 2.0 * (1.0 + std::sqrt(std::max(0.0, p - 1.0))) * (1.0 + diam);
    return {h.left - pad, h.right + pad};
}

std::vector<VPlusInterval> v_plus(const HFunction& H, Interval window, int coarse_n) {
    require_p_above_one(H.p);
    if (coarse_n < 3 || !(window.right > window.left))
        fail(ErrorCode::InvalidParameter, "v_plus needs a nonempty window and coarse_n >= 3");
    const std::size_t n = static_cast<std::size_t>(coarse_n);
    const double h = window.width() / static_cast<double>(n - 1);
    std::vector<double> xs(n), fs(n, 0.0);
    std::vector<char> in(n, 0);
    for (std::size_t i = 0; i < n; ++i) xs[i] = window.left + h * static_cast<double>(i);
    parallel_for(n, [&](std::size_t i) {
        in[i] = in_vplus(H, xs[i]);
        if (in[i]) fs[i] = f_p(H, xs[i]);
    });
    if (in.front() || in.back()) fail(ErrorCode::WindowTooSmall, "boundary curve is positive at the window edge");

    // midpoint probes: cells outside V+, and thin cells inside it
    std::vector<double> px;
    std::vector<char> pin;
    std::vector<std::size_t> probe_cells;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (in[i] == in[i + 1] && (!in[i] || std::min(fs[i], fs[i + 1]) < 1e-6)) probe_cells.push_back(i);
    std::vector<char> probe_in(probe_cells.size());
    parallel_for(probe_cells.size(), [&](std::size_t k) {
        std::size_t i = probe_cells[k];
        probe_in[k] = in_vplus(H, 0.5 * (xs[i] + xs[i + 1]));
    });
    for (std::size_t i = 0, k = 0; i < n; ++i) {
        px.push_back(xs[i]);
        pin.push_back(in[i]);
        if (k < probe_cells.size() && probe_cells[k] == i) {
            px.push_back(0.5 * (xs[i] + xs[i + 1]));
            pin.push_back(probe_in[k]);
            ++k;
        }
    }

    // refine each sign change
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i + 1 < px.size(); ++i)
        if (pin[i] != pin[i + 1]) cells.push_back(i);
    std::vector<double> edge(cells.size());
    auto inside = [&](double x) { return in_vplus(H, x); };
    parallel_for(cells.size(), [&](std::size_t k) {
        std::size_t i = cells[k];
        edge[k] = pin[i] ? detail::bisect_edge(inside, px[i + 1], px[i], kEdgeBisections)
                         : detail::bisect_edge(inside, px[i], px[i + 1], kEdgeBisections);
    });

    std::vector<VPlusInterval> out;
    for (std::size_t k = 0; k + 1 < cells.size(); k += 2) {
        VPlusInterval v{edge[k], edge[k + 1]};
        if (!out.empty() && v.left - out.back().right <= 1e-12)
            out.back().right = v.right;
        else
            out.push_back(v);
    }
    // an atom of mu with f_mu < 1/(p-1) is an isolated zero of f_p inside V+
    if (const auto& atoms = H.F.atom_positions()) {
        std::vector<VPlusInterval> split;
        for (const auto& v : out) {
            std::vector<double> cuts;
            for (double a : *atoms)
                if (a > v.left && a < v.right && !in_vplus(H, a)) cuts.push_back(a);
            std::sort(cuts.begin(), cuts.end());
            double l = v.left;
            bool lr = v.left_refined;
            for (double a : cuts) {
                split.push_back({l, a, lr, true});
                l = a;
                lr = true;
            }
            split.push_back({l, v.right, lr, v.right_refined});
        }
        out = std::move(split);
    }
    for (auto& v : out) v.below_resolution = v.right - v.left < 1e-6;
    return out;
}

std::vector<VPlusInterval> v_plus(const Measure& mu, double p, Interval window, int coarse_n) {
    return v_plus(make_h(mu, p), window, coarse_n);
}

SubordinationSolution solve_subordination(const HFunction& H, Interval window, int coarse_n) {
    SubordinationSolution s;
    s.p = H.p;
    s.vplus_intervals = v_plus(H, window, coarse_n);
    const std::size_t n = static_cast<std::size_t>(coarse_n);
    s.grid.resize(n);
    s.fp_values.resize(n);
    s.psi_values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.grid[i] = window.left + window.width() * static_cast<double>(i) / static_cast<double>(n - 1);
    parallel_for(n, [&](std::size_t i) {
        PsiPoint pp = psi_point(H, s.grid[i]);
        s.fp_values[i] = pp.f;
        s.psi_values[i] = pp.psi;
    });
    for (std::size_t i = 1; i < n; ++i)
        if (!(s.psi_values[i] > s.psi_values[i - 1])) {
            std::ostringstream os;
            os.precision(17);
            os << "psi fails to increase at x = " << s.grid[i];
            fail(ErrorCode::MonotonicityViolation, os.str());
        }
    return s;
}

}  // namespace freeconv
