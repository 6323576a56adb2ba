// Free powers below one.  H_p(w) = p w + (1 - p) F_mu(w) is inverted along a
// vertical path from high in the upper half-plane down to the target; past the
// real axis F_mu is continued analytically, with the square-root families
// tracked sheet by sheet.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "freeconv/convolution.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/oracle.hpp"
#include "freeconv/parallel.hpp"
#include "roots.hpp"

namespace freeconv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void not_defined(const std::string& why) {
    fail(ErrorCode::NotDefined, "free power below one is not certified: " + why);
}

cplx root_pair(cplx z, double l, double r) { return std::sqrt(z - l) * std::sqrt(z - r); }

enum class SqrtKind { Semicircle, Arcsine, MarchenkoPastur };

struct SqrtTerm {
    double weight;
    SqrtKind kind;
    double l, r;
    double shift;  // semicircle center, or a(1 - lambda) for MP
};

// mu's Cauchy transform, continued across the real axis
class ContinuedTransform {
public:
    explicit ContinuedTransform(const Measure& mu) {
        for (const auto& a : mu.atoms()) atoms_.push_back(a);
        for (const auto& c : mu.components()) {
            if (auto* s = std::get_if<Semicircle>(&c.shape)) {
                double R = 2.0 * std::sqrt(s->variance);
                sqrt_.push_back({c.weight, SqrtKind::Semicircle, s->center - R, s->center + R, s->center});
            } else if (auto* a = std::get_if<Arcsine>(&c.shape)) {
                sqrt_.push_back({c.weight, SqrtKind::Arcsine, a->left, a->right, 0.0});
            } else if (auto* m = std::get_if<MarchenkoPastur>(&c.shape)) {
                double e0 = m->jump * std::pow(1.0 - std::sqrt(m->rate), 2), e1 = m->jump * std::pow(1.0 + std::sqrt(m->rate), 2);
                sqrt_.push_back({c.weight, SqrtKind::MarchenkoPastur, std::min(e0, e1), std::max(e0, e1),
                                 m->jump * (1.0 - m->rate)});
            } else if (auto* cl = std::get_if<CauchyLaw>(&c.shape)) {
                cauchy_.push_back({c.weight, cl->location, cl->scale});
            } else {
                not_defined("tabulated components have no analytic continuation");
            }
        }
    }

    std::size_t sheets() const { return sqrt_.size(); }

    // Principal roots, used high in the upper half-plane.
    std::vector<cplx> principal(cplx w) const {
        std::vector<cplx> s;
        for (const auto& t : sqrt_) s.push_back(root_pair(w, t.l, t.r));
        return s;
    }

    // Roots continued from `prev`; false when the sign choice is ambiguous.
    bool continue_roots(cplx w, const std::vector<cplx>& prev, std::vector<cplx>& out) const {
        out.resize(sqrt_.size());
        for (std::size_t j = 0; j < sqrt_.size(); ++j) {
            cplx s = root_pair(w, sqrt_[j].l, sqrt_[j].r);
            double dp = std::abs(s - prev[j]), dm = std::abs(s + prev[j]);
            // at a branch point both signs agree to working precision
            bool at_branch = std::abs(s) <= 1e-7 * (sqrt_[j].r - sqrt_[j].l);
            if (!at_branch && std::min(dp, dm) > 0.5 * std::max(dp, dm)) return false;
            out[j] = dp <= dm ? s : -s;
        }
        return true;
    }

    FValue eval(cplx w, const std::vector<cplx>& S) const {
        cplx g = 0.0, dg = 0.0;
        for (const auto& a : atoms_) {
            cplx d = 1.0 / (w - a.position);
            g += a.mass * d;
            dg -= a.mass * d * d;
        }
        for (const auto& c : cauchy_) {
            cplx d = 1.0 / (w - c[1] + cplx(0.0, c[2]));
            g += c[0] * d;
            dg -= c[0] * d * d;
        }
        for (std::size_t j = 0; j < sqrt_.size(); ++j) {
            const SqrtTerm& t = sqrt_[j];
            const cplx s = S[j], ds = (w - 0.5 * (t.l + t.r)) / s;
            cplx gt, dgt;
            switch (t.kind) {
                case SqrtKind::Semicircle: {
                    gt = 2.0 / (w - t.shift + s);
                    dgt = -0.5 * gt * gt * (1.0 + ds);
                    break;
                }
                case SqrtKind::Arcsine: {
                    gt = 1.0 / s;
                    dgt = -gt * gt * ds;
                    break;
                }
                case SqrtKind::MarchenkoPastur: {
                    gt = 2.0 / (w + t.shift + s);
                    dgt = -0.5 * gt * gt * (1.0 + ds);
                    break;
                }
            }
            g += t.weight * gt;
            dg += t.weight * dgt;
        }
        cplx f = 1.0 / g;
        return {f, -dg * f * f};
    }

private:
    std::vector<Atom> atoms_;
    std::vector<SqrtTerm> sqrt_;
    std::vector<std::array<double, 3>> cauchy_;
};

struct PathPoint {
    cplx w;
    cplx dh;         // H'(w)
    double residual;
    bool ok;
    bool escaped;    // w ran off to infinity: G of the output vanishes
};

class SubOneSolver {
public:
    SubOneSolver(const Measure& mu, double p, double scale, double mean)
        : C_(mu), p_(p), scale_(scale), mean_(mean) {}

    FValue H(cplx w, const std::vector<cplx>& S) const {
        FValue f = C_.eval(w, S);
        return {p_ * w + (1.0 - p_) * f.f, p_ + (1.0 - p_) * f.df};
    }

    // Newton on H(w) = z with the roots continued from `S`.
    bool newton(cplx z, cplx& w, std::vector<cplx>& S, cplx& dh, double& res) const {
        std::vector<cplx> Sn;
        for (int it = 0; it < 60; ++it) {
            if (!C_.continue_roots(w, S, Sn)) return false;
            FValue h = H(w, Sn);
            if (!finite(h.f) || !finite(h.df) || h.df == cplx(0.0, 0.0)) return false;
            res = std::abs(h.f - z);
            dh = h.df;
            // rounding floor: cancellation in H and the ulp of w near a branch point
            FValue f = C_.eval(w, Sn);
            const double eps = std::numeric_limits<double>::epsilon();
            const double floor = 16.0 * eps * (p_ * std::abs(w) + (1.0 - p_) * std::abs(f.f) + std::abs(h.df) * std::abs(w));
            if (res <= 1e-14 * (1.0 + std::abs(z)) + floor || (it > 3 && res <= 1e-12 * (1.0 + std::abs(z)) + floor)) {
                S = Sn;
                return true;
            }
            cplx step = (h.f - z) / h.df;
            if (std::abs(step) > 0.25 * (scale_ + std::abs(w))) step *= 0.25 * (scale_ + std::abs(w)) / std::abs(step);
            w -= step;
            S = Sn;
        }
        return false;
    }

    PathPoint solve(cplx z) const {
        const double top = std::max(z.imag(), 8.0 * scale_);
        cplx zc(z.real(), top);
        cplx w = zc - (p_ - 1.0) * mean_;
        std::vector<cplx> S = C_.principal(w);
        cplx dh;
        double res;
        if (!newton(zc, w, S, dh, res)) return {w, dh, res, false, false};
        double y = top, step = 0.125 * (top - z.imag());
        while (y > z.imag()) {
            double yn = std::max(z.imag(), y - step);
            cplx zn(z.real(), yn);
            cplx wn = w + (zn - zc) / dh;
            std::vector<cplx> Sn = S;
            cplx dhn;
            double rn;
            bool ok = newton(zn, wn, Sn, dhn, rn) && std::abs(wn - w) <= 4.0 * std::abs(zn - zc) / std::abs(dh) + 1e-12 * scale_;
            if (ok) {
                w = wn, S = Sn, dh = dhn, res = rn, zc = zn, y = yn;
                step *= 1.5;
                if (std::abs(w) > 1e7 * scale_) return {w, dh, res, false, true};
            } else {
                step *= 0.5;
                if (step < 1e-15 * scale_) {
                    if (std::abs(w) > 1e5 * scale_) return {w, dh, res, false, true};
                    return {w, dh, res, false, false};
                }
            }
        }
        return {w, dh, res, true, false};
    }

    double p() const { return p_; }
    double scale() const { return scale_; }

private:
    ContinuedTransform C_;
    double p_, scale_, mean_;
};

struct OutValue {
    cplx f;        // F of the output
    cplx df;
    bool escaped;  // F infinite (G = 0)
};

OutValue output_F(const SubOneSolver& s, cplx z) {
    PathPoint pp = s.solve(z);
    if (!pp.ok && z.imag() == 0.0 && !pp.escaped) pp = s.solve(cplx(z.real(), 1e-10));
    if (!pp.ok && z.imag() == 0.0 && !pp.escaped) {
        // omega sits on a branch point of mu's transform; F of the output is
        // continuous there, so average the two real neighbours
        for (double d : {1e-9, 1e-7, 1e-5}) {
            d *= s.scale();
            PathPoint a = s.solve(cplx(z.real() - d, 0.0)), b = s.solve(cplx(z.real() + d, 0.0));
            if (a.ok && b.ok) {
                pp = a;
                pp.w = 0.5 * (a.w + b.w);
                pp.dh = 2.0 / (1.0 / a.dh + 1.0 / b.dh);
                break;
            }
        }
    }
    if (pp.escaped) return {cplx(kNaN, 0.0), cplx(kNaN, 0.0), true};
    if (!pp.ok) {
        std::ostringstream os;
        os.precision(17);
        os << "continuation failed at z = (" << z.real() << ", " << z.imag() << ")";
        not_defined(os.str());
    }
    const double p = s.p();
    cplx dw = finite(pp.dh) ? 1.0 / pp.dh : cplx(0.0, 0.0);
    return {(p * pp.w - z) / (p - 1.0), (p * dw - 1.0) / (p - 1.0), false};
}

double density_of(const OutValue& v) {
    if (v.escaped) return 0.0;
    double d = v.f.imag() / (kPi * std::norm(v.f));
    return d > 1e-12 ? d : 0.0;
}

std::vector<Interval> merge_touching(std::vector<Interval> v) {
    std::vector<Interval> out;
    for (const auto& i : v) {
        if (!out.empty() && i.left <= out.back().right)
            out.back().right = std::max(out.back().right, i.right);
        else
            out.push_back(i);
    }
    return out;
}

double cluster(double t) {
    double g = 0.5 * (1.0 - std::cos(kPi * t));
    return 0.5 * (1.0 - std::cos(kPi * g));
}

}  // namespace

SpectralResult free_power_sub_one(const Measure& mu, double p, const OpOptions& opt) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParameter, "free_power_sub_one needs p in (0, 1)");
    SpectralParams params;
    params.operation = "free_power_sub_one";
    params.p = p;

    if (auto a = mu.point_mass_location()) {
        SpectralResult r;
        r.params = params;
        r.atoms.push_back({p * *a, 1.0, *a, {0.0, 0.0, 1.0, AtomRegime::FreePower}});
        Interval U = opt.window ? *opt.window : Interval{p * *a - 1.0, p * *a + 1.0};
        for (std::size_t i = 0; i < opt.grid_n; ++i) {
            r.density.x.push_back(U.left + U.width() * static_cast<double>(i) / static_cast<double>(opt.grid_n - 1));
            r.density.density.push_back(0.0);
        }
        return r;
    }

    // moment consistency: the candidate moments must be those of a measure
    const bool heavy = mu.has_heavy_tail();
    MomentVector predicted;
    double mean = 0.0, sigma = 1.0;
    if (!heavy) {
        predicted = predict_moments_bpq(moments(mu, 6), p, 1.0);
        if (!hankel_psd(predicted))
            not_defined("predicted moments fail the Hankel positivity test");
        auto mv = mean_variance(mu);
        mean = mv.first;
        sigma = std::sqrt(std::max(mv.second, 0.0));
    }
    Interval hull = reciprocal(mu).support_hint();
    const double scale = std::max({1.0, sigma, 0.5 * hull.width()});
    SubOneSolver solver(mu, p, scale, mean);

    Interval U;
    if (opt.window) {
        U = *opt.window;
    } else {
        double shift = (p - 1.0) * mean, pad = 0.1 * std::max(hull.width(), 1.0);
        U = {hull.left + shift - pad, hull.right + shift + pad};
    }
    if (!(U.right > U.left)) fail(ErrorCode::InvalidParameter, "window must have left < right");

    // (a) residuals and the Pick inequality on a 20 x 20 grid
    {
        std::vector<cplx> zs;
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j)
                zs.emplace_back(U.left + U.width() * i / 19.0, scale * std::pow(10.0, -2.0 + 3.0 * j / 19.0));
        std::vector<double> worst(zs.size());
        std::vector<char> pick(zs.size());
        parallel_for(zs.size(), [&](std::size_t k) {
            PathPoint pp = solver.solve(zs[k]);
            worst[k] = pp.ok ? pp.residual : std::numeric_limits<double>::infinity();
            if (pp.ok) {
                cplx f = (p * pp.w - zs[k]) / (p - 1.0);
                pick[k] = f.imag() >= zs[k].imag() - 1e-10;
            }
        });
        for (std::size_t k = 0; k < zs.size(); ++k) {
            if (!(worst[k] < kOmegaResidual)) not_defined("subordination residual above 1e-10 on the validation grid");
            if (!pick[k]) not_defined("output transform leaves the upper half-plane");
        }
    }

    // support of the output from a coarse scan, edges by bisection
    const std::size_t n0 = 1201;
    std::vector<double> xs(n0), d0(n0);
    for (std::size_t i = 0; i < n0; ++i) xs[i] = U.left + U.width() * static_cast<double>(i) / static_cast<double>(n0 - 1);
    parallel_for(n0, [&](std::size_t i) { d0[i] = density_of(output_F(solver, cplx(xs[i], 0.0))); });
    auto inside = [&](double x) { return density_of(output_F(solver, cplx(x, 0.0))) > 0.0; };
    if (d0.front() > 0.0 || d0.back() > 0.0) fail(ErrorCode::WindowTooSmall, "density is positive at the window edge");
    std::vector<Interval> supp;
    for (std::size_t i = 0; i + 1 < n0; ++i) {
        if ((d0[i] > 0.0) == (d0[i + 1] > 0.0)) continue;
        double e = d0[i] > 0.0 ? detail::bisect_edge(inside, xs[i + 1], xs[i], 48)
                               : detail::bisect_edge(inside, xs[i], xs[i + 1], 48);
        if (d0[i] > 0.0) {
            if (supp.empty()) not_defined("support scan lost an edge");
            supp.back().right = e;
        } else {
            supp.push_back({e, e});
        }
    }
    supp = merge_touching(supp);

    // atoms at real zeros of the output F in the gaps
    std::vector<AtomRecord> atoms;
    {
        std::vector<std::pair<double, double>> gaps;
        double cur = U.left;
        for (const auto& s : supp) {
            if (s.left > cur) gaps.push_back({cur, s.left});
            cur = s.right;
        }
        if (cur < U.right) gaps.push_back({cur, U.right});
        auto g = [&](double x) {
            OutValue v = output_F(solver, cplx(x, 0.0));
            if (v.escaped || !finite(v.f) || std::abs(v.f.imag()) > 1e-9 * (1.0 + std::abs(v.f))) return kNaN;
            return v.f.real();
        };
        for (const auto& [a, b] : gaps) {
            const std::size_t n = 4096;
            std::vector<double> gx(n), gv(n);
            for (std::size_t i = 0; i < n; ++i) gx[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
            parallel_for(n, [&](std::size_t i) { gv[i] = g(gx[i]); });
            for (std::size_t i = 0; i + 1 < n; ++i) {
                if (!std::isfinite(gv[i]) || !std::isfinite(gv[i + 1])) continue;
                if ((gv[i] > 0.0) == (gv[i + 1] > 0.0) && gv[i] != 0.0) continue;
                double r = detail::solve_bracketed(g, gx[i], gx[i + 1], gv[i], gv[i + 1], 0.0);
                OutValue v = output_F(solver, cplx(r, 0.0));
                if (v.escaped || !(std::abs(v.f) <= 1e-7 * scale)) continue;  // pole of F, not a zero
                double jc = v.df.real();
                if (!(jc >= 1.0 - 1e-9)) not_defined("atom with derivative below one");
                if (!atoms.empty() && std::abs(atoms.back().position - r) <= 1e-9 * scale) continue;
                atoms.push_back({r, 1.0 / jc, r, {v.f.real(), jc - 1.0, jc, AtomRegime::FreePower}});
            }
        }
    }

    // density table: clustered on the support, uniform on the gaps
    SpectralResult r;
    r.params = params;
    {
        std::vector<std::pair<Interval, bool>> pieces;
        double cur = U.left;
        for (const auto& s : supp) {
            if (s.left > cur) pieces.push_back({{cur, s.left}, false});
            pieces.push_back({s, true});
            cur = s.right;
        }
        if (cur < U.right) pieces.push_back({{cur, U.right}, false});
        double total = 0.0;
        for (const auto& [iv, ac] : pieces) total += iv.width() * (ac ? 4.0 : 1.0);
        const std::size_t cells = std::max<std::size_t>(opt.grid_n, 2) - 1;
        std::vector<double> nodes;
        for (const auto& [iv, ac] : pieces) {
            std::size_t m = std::max<std::size_t>(ac ? 16 : 1,
                                                  static_cast<std::size_t>(cells * iv.width() * (ac ? 4.0 : 1.0) / total));
            for (std::size_t j = 0; j < m; ++j) {
                double t = static_cast<double>(j) / static_cast<double>(m);
                nodes.push_back(iv.left + iv.width() * (ac ? cluster(t) : t));
            }
        }
        nodes.push_back(U.right);
        std::vector<double> uniq;
        for (double x : nodes)
            if (uniq.empty() || x > uniq.back()) uniq.push_back(x);
        std::vector<double> dens(uniq.size(), 0.0);
        std::vector<char> edge(uniq.size(), 0);
        for (std::size_t i = 0; i < uniq.size(); ++i)
            for (const auto& s : supp)
                if (uniq[i] == s.left || uniq[i] == s.right) edge[i] = 1;
        parallel_for(uniq.size(), [&](std::size_t i) {
            if (!edge[i]) dens[i] = density_of(output_F(solver, cplx(uniq[i], 0.0)));
        });
        r.density.x = uniq;
        r.density.density = dens;
        r.density.support = supp;
    }
    r.atoms = atoms;

    // (b) mass and (c) moments
    double mass = r.total_mass();
    if (!(std::abs(mass - 1.0) <= 1e-4)) {
        std::ostringstream os;
        os.precision(10);
        os << "total mass " << mass << " is off by more than 1e-4";
        not_defined(os.str());
    }
    if (!heavy) {
        MomentComparison c = compare(r, predicted, 6, 1e-4);
        r.diagnostics.moment_deviation = c.deviation;
        if (!c.pass) not_defined("moments disagree with the cumulant prediction beyond 1e-4");
    }
    return r;
}

}  // namespace freeconv
