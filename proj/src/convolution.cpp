#include "freeconv/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "freeconv/errors.hpp"
#include "freeconv/parallel.hpp"
#include "roots.hpp"

namespace freeconv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
    if (!ok) fail(ErrorCode::InvalidParameter, msg);
}

// t -> t^4-like clustering at both ends of [0, 1]
double cluster(double t) {
    double g = 0.5 * (1.0 - std::cos(kPi * t));
    return 0.5 * (1.0 - std::cos(kPi * g));
}

struct Piece {
    double a, b;
    bool ac;
};

// Split n - 1 grid cells over the pieces; ac pieces are weighted up.
std::vector<std::size_t> allocate(const std::vector<double>& weight, const std::vector<Piece>& pieces,
                                  std::size_t n) {
    const std::size_t k = pieces.size();
    std::vector<std::size_t> c(k, 1), mins(k, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (pieces[i].ac) mins[i] = 16;
        total += weight[i];
    }
    std::size_t cells = n > 1 ? n - 1 : 1, used = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double share = total > 0.0 ? weight[i] / total : 1.0 / static_cast<double>(k);
        c[i] = std::max(mins[i], static_cast<std::size_t>(std::floor(share * static_cast<double>(cells))));
        used += c[i];
    }
    std::size_t big = static_cast<std::size_t>(std::max_element(weight.begin(), weight.end()) - weight.begin());
    if (used < cells) {
        c[big] += cells - used;
    } else {
        std::size_t excess = used - cells;
        std::size_t room = c[big] - mins[big];
        c[big] -= std::min(excess, room);
    }
    return c;
}

std::vector<double> piece_nodes(const std::vector<Piece>& pieces, const std::vector<std::size_t>& counts) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Piece& pc = pieces[i];
        const double m = static_cast<double>(counts[i]);
        for (std::size_t j = 0; j < counts[i]; ++j) {
            double t = static_cast<double>(j) / m;
            xs.push_back(pc.a + (pc.b - pc.a) * (pc.ac ? cluster(t) : t));
        }
    }
    xs.push_back(pieces.back().b);
    std::vector<double> out;
    for (double x : xs)
        if (out.empty() || x > out.back()) out.push_back(x);
    return out;
}

std::vector<Interval> merge(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.left < b.left; });
    std::vector<Interval> out;
    for (const auto& i : v) {
        // touching intervals stay apart: the common point can carry an atom
        if (!out.empty() && i.left < out.back().right)
            out.back().right = std::max(out.back().right, i.right);
        else
            out.push_back(i);
    }
    return out;
}

Interval auto_window(const std::vector<Interval>& support, const std::vector<AtomRecord>& atoms) {
    double lo = kInf, hi = -kInf;
    for (const auto& s : support) lo = std::min(lo, s.left), hi = std::max(hi, s.right);
    for (const auto& a : atoms) lo = std::min(lo, a.position), hi = std::max(hi, a.position);
    if (!(lo <= hi)) fail(ErrorCode::NoConvergence, "operation produced neither density nor atoms");
    double w = hi - lo;
    double pad = w > 0.0 ? 0.05 * w : 0.5 * std::max(1.0, std::abs(lo));
    return {lo - pad, hi + pad};
}

std::vector<AtomRecord> atoms_in(const std::vector<AtomRecord>& atoms, Interval u) {
    std::vector<AtomRecord> out;
    for (const auto& a : atoms)
        if (u.contains(a.position)) out.push_back(a);
    return out;
}

std::vector<Interval> clip(const std::vector<Interval>& s, Interval u) {
    std::vector<Interval> out;
    for (const auto& i : s) {
        Interval c{std::max(i.left, u.left), std::min(i.right, u.right)};
        if (c.right > c.left) out.push_back(c);
    }
    return out;
}

using DensityRule = std::function<double(const PsiPoint&)>;

// Density sampled along the boundary curve: x-space grid mapped through psi.
SpectralResult boundary_table(const HFunction& H, const DensityRule& rule, const std::vector<AtomRecord>& atoms,
                              const std::vector<VPlusInterval>& vplus, const OpOptions& opt,
                              SpectralParams params) {
    std::vector<Interval> usupp;
    for (const auto& v : vplus) usupp.push_back({psi_p(H, v.left), psi_p(H, v.right)});
    Interval U = opt.window ? *opt.window : auto_window(usupp, atoms);
    require(U.right > U.left, "window must have left < right");
    const double xl = invert_psi(H, U.left), xr = invert_psi(H, U.right);

    std::vector<Piece> pieces;
    double cur = xl;
    for (const auto& v : vplus) {
        if (v.right <= cur || v.left >= xr) continue;
        double a = std::max(v.left, cur), b = std::min(v.right, xr);
        if (a > cur) pieces.push_back({cur, a, false});
        pieces.push_back({a, b, true});
        cur = b;
    }
    if (cur < xr) pieces.push_back({cur, xr, false});
    if (pieces.empty()) pieces.push_back({xl, xr, false});

    std::vector<double> weight;
    for (const auto& pc : pieces) {
        double du = std::abs(psi_p(H, pc.b) - psi_p(H, pc.a));
        weight.push_back(pc.ac ? 4.0 * du : du);
    }
    std::vector<double> xs = piece_nodes(pieces, allocate(weight, pieces, opt.grid_n));

    const std::size_t n = xs.size();
    std::vector<double> u(n), d(n), res(n);
    parallel_for(n, [&](std::size_t i) {
        PsiPoint pp = psi_point(H, xs[i]);
        u[i] = pp.psi;
        d[i] = pp.f > 0.0 ? rule(pp) : 0.0;
        res[i] = pp.residual;
    });

    SpectralResult r;
    r.params = std::move(params);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(d[i]) || d[i] < 0.0) {
            std::ostringstream os;
            os.precision(17);
            os << "density is not finite at u = " << u[i];
            fail(ErrorCode::NoConvergence, os.str());
        }
        if (!r.density.x.empty() && !(u[i] > r.density.x.back())) {
            if (u[i] == r.density.x.back()) continue;
            std::ostringstream os;
            os.precision(17);
            os << "psi fails to increase near u = " << u[i];
            fail(ErrorCode::MonotonicityViolation, os.str());
        }
        r.density.x.push_back(u[i]);
        r.density.density.push_back(d[i]);
        r.diagnostics.max_residual = std::max(r.diagnostics.max_residual, res[i]);
    }
    r.density.support = clip(merge(usupp), U);
    r.atoms = atoms_in(atoms, U);
    return r;
}

SpectralResult point_mass_result(double a, AtomRegime regime, const OpOptions& opt, SpectralParams params) {
    SpectralResult r;
    r.params = std::move(params);
    r.atoms.push_back({a, 1.0, a, {0.0, 0.0, 1.0, regime}});
    Interval U = opt.window ? *opt.window : Interval{a - 1.0, a + 1.0};
    require(U.right > U.left, "window must have left < right");
    const std::size_t n = std::max<std::size_t>(opt.grid_n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        r.density.x.push_back(U.left + U.width() * static_cast<double>(i) / static_cast<double>(n - 1));
        r.density.density.push_back(0.0);
    }
    r.atoms = atoms_in(r.atoms, U);
    return r;
}

// B_{p,q} boundary value; q' = 0 means F_B = omega_p.
FValue bpq_value(const HFunction& H, double q, double qp, bool special, cplx z) {
    OmegaSolution s = solve_omega(H, z);
    FValue h = H.eval(s.w);
    cplx dw = 1.0 / h.df;
    if (special) return {s.w, dw};
    const double pq = H.p * q, pm1 = H.p - 1.0;
    return {(pq * s.w - qp * z) / pm1, (pq * dw - qp) / pm1};
}

void check_bpq(const BpqParams& b) {
    require(std::isfinite(b.p) && b.p >= 1.0, "p must be >= 1");
    require(std::isfinite(b.q) && b.q > 0.0, "q must be > 0");
}

SpectralResult boolean_power_impl(const ReciprocalTransform& F, double q, const OpOptions& opt,
                                  SpectralParams params) {
    require(std::isfinite(q) && q > 0.0, "q must be > 0");
    if (F.point_mass()) return point_mass_result(q * *F.point_mass(), AtomRegime::Boolean, opt, std::move(params));
    if (!F.ac_support()) fail(ErrorCode::InvalidParameter, "boolean power needs the continuous support of the input");
    ReciprocalTransform Fq = boolean_reciprocal(F, q);
    AtomScan scan = scan_atoms(F, 1.0, q, Fq.support_hint());
    std::vector<Interval> supp = merge(*F.ac_support());
    Interval U = opt.window ? *opt.window : auto_window(supp, scan.atoms);
    require(U.right > U.left, "window must have left < right");

    std::vector<Piece> pieces;
    double cur = U.left;
    for (const auto& s : clip(supp, U)) {
        if (s.left > cur) pieces.push_back({cur, s.left, false});
        pieces.push_back({s.left, s.right, true});
        cur = s.right;
    }
    if (cur < U.right) pieces.push_back({cur, U.right, false});
    std::vector<double> weight;
    for (const auto& pc : pieces) weight.push_back((pc.b - pc.a) * (pc.ac ? 4.0 : 1.0));
    std::vector<double> xs = piece_nodes(pieces, allocate(weight, pieces, opt.grid_n));

    std::vector<char> interior(xs.size(), 0);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (const auto& s : supp)
            if (xs[i] > s.left && xs[i] < s.right) interior[i] = 1;
    auto G = [&Fq](cplx z) { return 1.0 / Fq(z); };
    const StieltjesOptions sopt = StieltjesOptions::defaults();
    std::vector<double> d(xs.size(), 0.0);
    std::vector<char> conv(xs.size(), 1);
    parallel_for(xs.size(), [&](std::size_t i) {
        if (!interior[i]) return;
        StieltjesPoint sp = stieltjes_point(G, xs[i], sopt);
        d[i] = sp.density < 1e-12 ? 0.0 : sp.density;
        conv[i] = sp.converged;
    });

    SpectralResult r;
    r.params = std::move(params);
    r.density.x = xs;
    r.density.density = d;
    r.density.support = clip(supp, U);
    r.diagnostics.stieltjes_unconverged = static_cast<std::size_t>(std::count(conv.begin(), conv.end(), 0));
    r.atoms = atoms_in(scan.atoms, U);
    return r;
}

SpectralParams tag(const char* op, std::optional<double> p, std::optional<double> q) {
    SpectralParams s;
    s.operation = op;
    s.p = p;
    s.q = q;
    return s;
}

SpectralResult bpq_impl(const ReciprocalTransform& F, const BpqParams& b, const OpOptions& opt,
                        SpectralParams params) {
    check_bpq(b);
    if (b.p == 1.0) return boolean_power_impl(F, b.q, opt, std::move(params));
    if (F.point_mass()) {
        AtomRegime reg = b.q == 1.0 ? AtomRegime::FreePower : b.special() ? AtomRegime::BpqSpecial : AtomRegime::BpqGeneral;
        return point_mass_result(b.p * b.q * *F.point_mass(), reg, opt, std::move(params));
    }
    HFunction H{F, b.p};
    Interval xwin = default_x_window(F, b.p);
    std::vector<VPlusInterval> vplus = v_plus(H, xwin);
    AtomScan scan = scan_atoms(F, b.p, b.q, xwin, &vplus);
    DensityRule rule;
    if (b.special()) {
        rule = [](const PsiPoint& pp) { return pp.f / (kPi * (pp.x * pp.x + pp.f * pp.f)); };
    } else {
        const double p = b.p, pq = b.p * b.q, qp = b.qprime();
        rule = [p, pq, qp](const PsiPoint& pp) {
            return (p - 1.0) * pq * pp.f / (kPi * std::norm(cplx(pq * pp.x - qp * pp.psi, pq * pp.f)));
        };
    }
    return boundary_table(H, rule, scan.atoms, vplus, opt, std::move(params));
}

ReciprocalTransform brownian_virtual(const Measure& nu, double t) {
    auto eval = [nu, t](cplx z) -> FValue {
        CauchyValue k = cauchy_kernel(nu, z);
        if (!finite(k.g)) return {cplx(kInf, 0.0), cplx(kInf, 0.0)};
        return {z - t * k.g, 1.0 - t * k.dg};
    };
    Interval h = nu.support_hull();
    double r = std::sqrt(t);
    return ReciprocalTransform(eval, {h.left - r, h.right + r}, t, "brownian-virtual");
}

}  // namespace

BpqParams BpqParams::rational(long long pn, long long pd, long long qn, long long qd) {
    require(pd > 0 && qd > 0 && pn > 0 && qn > 0, "rational parameters need positive parts");
    BpqParams b(static_cast<double>(pn) / static_cast<double>(pd), static_cast<double>(qn) / static_cast<double>(qd));
    // q' = (pd qd + pn qn - pn qd) / (pd qd)
    __int128 num = static_cast<__int128>(pd) * qd + static_cast<__int128>(pn) * qn - static_cast<__int128>(pn) * qd;
    b.exact_qprime_sign = (num > 0) - (num < 0);
    return b;
}

double BpqParams::p_star() const { return p == 1.0 ? kInf : p / (p - 1.0); }
double BpqParams::q_star() const { return q == 1.0 ? kInf : q / (q - 1.0); }

double BpqParams::qprime() const {
    if (exact_qprime_sign && *exact_qprime_sign == 0) return 0.0;
    return 1.0 + p * q - p;
}

std::optional<double> BpqParams::pprime() const {
    if (special()) return std::nullopt;
    return p * q / qprime();
}

bool BpqParams::special() const {
    if (exact_qprime_sign) return *exact_qprime_sign == 0;
    return std::abs(qprime()) <= kRegimeTolerance;
}

bool BpqParams::infinitely_divisible() const {
    if (exact_qprime_sign) return *exact_qprime_sign <= 0;
    return qprime() <= kRegimeTolerance;
}

double SpectralResult::atom_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

double SpectralResult::total_mass() const { return atom_mass() + density.trapezoid_moment(0); }

SpectralResult free_power(const Measure& mu, double p, const OpOptions& opt) {
    return free_power(reciprocal(mu), p, opt);
}

SpectralResult free_power(const ReciprocalTransform& F, double p, const OpOptions& opt) {
    require(std::isfinite(p) && p >= 1.0, "free_power needs p >= 1");
    return bpq_impl(F, BpqParams(p, 1.0), opt, tag("free_power", p, std::nullopt));
}

SpectralResult boolean_power(const Measure& mu, double q, const OpOptions& opt) {
    return boolean_power_impl(reciprocal(mu), q, opt, tag("boolean_power", std::nullopt, q));
}

SpectralResult bpq(const Measure& mu, const BpqParams& params, const OpOptions& opt) {
    return bpq(reciprocal(mu), params, opt);
}

SpectralResult bpq(const ReciprocalTransform& F, const BpqParams& params, const OpOptions& opt) {
    return bpq_impl(F, params, opt, tag("bpq", params.p, params.q));
}

SpectralResult b_t(const Measure& mu, double t, const OpOptions& opt) {
    require(std::isfinite(t) && t >= 0.0, "b_t needs t >= 0");
    SpectralParams s = tag("b_t", t + 1.0, 1.0 / (t + 1.0));
    s.t = t;
    BpqParams b(t + 1.0, 1.0 / (t + 1.0));
    if (t == 1.0) b.exact_qprime_sign = 0;
    return bpq_impl(reciprocal(mu), b, opt, std::move(s));
}

SpectralResult free_brownian(const Measure& nu, double t, const OpOptions& opt) {
    require(std::isfinite(t) && t > 0.0, "free_brownian needs t > 0");
    ReciprocalTransform Fv = brownian_virtual(nu, t);
    HFunction H{Fv, 2.0};
    std::vector<VPlusInterval> vplus = v_plus(H, default_x_window(Fv, 2.0));
    SpectralParams s;
    s.operation = "free_brownian";
    s.t = t;
    auto rule = [t](const PsiPoint& pp) { return pp.f / (kPi * t); };
    return boundary_table(H, rule, {}, vplus, opt, std::move(s));
}

ReciprocalTransform poisson_seed(const Measure& nu) {
    // F(z) = 2z - z^2 G_nu(z)
    auto eval = [nu](cplx z) -> FValue {
        CauchyValue k = cauchy_kernel(nu, z);
        if (!finite(k.g) || !finite(k.dg)) return {cplx(kInf, 0.0), cplx(kInf, 0.0)};
        return {2.0 * z - z * z * k.g, 2.0 - 2.0 * z * k.g - z * z * k.dg};
    };
    ReciprocalTransform nf = reciprocal(nu);
    Interval h = nf.support_hint();
    Interval hint{std::min({0.0, h.left, 2.0 * h.left}), std::max({0.0, h.right, 2.0 * h.right})};
    double r = 0.5 * hint.width();
    ReciprocalTransform F(eval, hint, r * r, "poisson-seed");
    if (nf.point_mass() && *nf.point_mass() == 0.0) F.set_point_mass(0.0);
    return F;
}

namespace {
BpqParams poisson_params(double lambda) {
    BpqParams b(1.0 + lambda, lambda / (1.0 + lambda));
    b.exact_qprime_sign = 0;
    return b;
}
}  // namespace

SpectralResult compound_free_poisson(double lambda, const Measure& nu, const OpOptions& opt) {
    require(std::isfinite(lambda) && lambda > 0.0, "compound_free_poisson needs lambda > 0");
    BpqParams b = poisson_params(lambda);
    SpectralParams s = tag("compound_free_poisson", b.p, b.q);
    s.lambda = lambda;
    return bpq_impl(poisson_seed(nu), b, opt, std::move(s));
}

ReciprocalTransform bpq_reciprocal(const ReciprocalTransform& F, const BpqParams& b) {
    check_bpq(b);
    if (b.p == 1.0) return boolean_reciprocal(F, b.q);
    if (F.point_mass()) return shift_transform(b.p * b.q * *F.point_mass());
    HFunction H{F, b.p};
    const double q = b.q, qp = b.qprime();
    const bool special = b.special();
    auto eval = [H, q, qp, special](cplx z) { return bpq_value(H, q, qp, special, z); };

    // support: psi-image of V+ plus the atoms
    Interval xwin = default_x_window(F, b.p);
    std::vector<VPlusInterval> vplus = v_plus(H, xwin);
    AtomScan scan = scan_atoms(F, b.p, b.q, xwin, &vplus);
    std::vector<Interval> ac;
    double lo = kInf, hi = -kInf;
    for (const auto& v : vplus) {
        ac.push_back({psi_p(H, v.left), psi_p(H, v.right)});
        lo = std::min(lo, ac.back().left), hi = std::max(hi, ac.back().right);
    }
    for (const auto& a : scan.atoms) lo = std::min(lo, a.position), hi = std::max(hi, a.position);
    if (!(lo <= hi)) fail(ErrorCode::NoConvergence, "transform has neither density nor atoms");
    double r = 0.5 * (hi - lo);
    ReciprocalTransform out(eval, {lo, hi}, r * r, "bpq");
    out.set_ac_support(merge(ac));
    std::vector<double> pos;
    for (const auto& a : scan.atoms) pos.push_back(a.position);
    out.set_atom_positions(std::move(pos));
    return out;
}

ReciprocalTransform b_t_reciprocal(const ReciprocalTransform& F, double t) {
    require(std::isfinite(t) && t >= 0.0, "b_t needs t >= 0");
    if (t == 0.0) return F;
    BpqParams b(t + 1.0, 1.0 / (t + 1.0));
    if (t == 1.0) b.exact_qprime_sign = 0;
    return bpq_reciprocal(F, b);
}

ReciprocalTransform compound_free_poisson_reciprocal(double lambda, const Measure& nu) {
    require(std::isfinite(lambda) && lambda > 0.0, "compound_free_poisson needs lambda > 0");
    return bpq_reciprocal(poisson_seed(nu), poisson_params(lambda));
}

ReciprocalTransform free_brownian_reciprocal(const Measure& nu, double t) {
    require(std::isfinite(t) && t > 0.0, "free_brownian needs t > 0");
    HFunction H{brownian_virtual(nu, t), 2.0};
    auto eval = [H, nu](cplx z) -> FValue {
        OmegaSolution s = solve_omega(H, z);
        CauchyValue k = cauchy_kernel(nu, s.w);
        cplx f = 1.0 / k.g;
        cplx dw = 1.0 / H.eval(s.w).df;
        return {f, -k.dg * f * f * dw};
    };
    Interval h = nu.support_hull();
    double r = 2.0 * std::sqrt(t);
    auto [m, v] = mean_variance(nu);
    (void)m;
    return ReciprocalTransform(eval, {h.left - r, h.right + r}, v + t, "brownian");
}

cplx phi_bpq(const ReciprocalTransform& F, const BpqParams& b, cplx z) {
    check_bpq(b);
    require(b.p > 1.0, "phi_bpq needs p > 1");
    if (!b.infinitely_divisible())
        fail(ErrorCode::RegimeError, "phi_bpq needs q <= 1/p* (infinitely divisible regime)");
    if (b.special()) return (b.p - 1.0) * (z - F(z));
    const double p1 = b.p * (1.0 - b.q), q1 = b.q / (1.0 - b.q);
    HFunction H{F, p1};
    const double qp1 = 1.0 + p1 * q1 - p1;
    return z - bpq_value(H, q1, qp1, false, z).f;
}

cplx phi_bpq(const Measure& mu, const BpqParams& params, cplx z) { return phi_bpq(reciprocal(mu), params, z); }

Measure phi_map(const Measure& mu, std::size_t grid_n) {
    auto [m1, var] = mean_variance(mu);
    if (!(std::abs(m1) < 1e-9)) fail(ErrorCode::NonCenteredInput, "phi_map needs a centered measure");
    if (!(var > 0.0)) fail(ErrorCode::InvalidParameter, "phi_map needs positive variance");
    MeasureSpec spec;

    // continuous part from the boundary values of E / sigma^2
    auto Gnu = [&mu, var](cplx z) {
        CauchyValue k = cauchy_kernel(mu, z);
        return (z - 1.0 / k.g) / var;
    };
    std::vector<Interval> supp = mu.ac_support();
    double total = 0.0;
    for (const auto& s : supp) {
        std::vector<double> grid;
        std::size_t n = std::max<std::size_t>(grid_n, 16);
        for (std::size_t j = 0; j < n; ++j)
            grid.push_back(s.left + s.width() * cluster(static_cast<double>(j) / static_cast<double>(n - 1)));
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        std::vector<double> inner(grid.begin() + 1, grid.end() - 1);
        DensityTable t = stieltjes_invert(Gnu, inner);
        Tabulated tab;
        tab.grid = grid;
        tab.density.assign(grid.size(), 0.0);
        for (std::size_t j = 0; j < inner.size(); ++j) tab.density[j + 1] = t.density[j];
        double w = 0.0;
        for (std::size_t j = 0; j + 1 < grid.size(); ++j)
            w += 0.5 * (grid[j + 1] - grid[j]) * (tab.density[j] + tab.density[j + 1]);
        if (w <= 0.0) continue;
        for (double& d : tab.density) d /= w;
        spec.ac.push_back({w, tab});
        total += w;
    }

    // atoms at the real zeros of G_mu in the gaps
    std::vector<Interval> sing = supp;
    for (const auto& a : mu.all_point_masses()) sing.push_back({a.position, a.position});
    sing = merge(sing);
    for (std::size_t k = 0; k + 1 < sing.size(); ++k) {
        const double a = sing[k].right, b = sing[k + 1].left;
        if (!(b > a)) continue;
        const int n = 4096;
        auto g = [&mu](double x) { return cauchy_kernel(mu, cplx(x, 0.0)).g.real(); };
        double xp = a + (b - a) * 0.5 / n, gp = g(xp);
        for (int j = 1; j < n; ++j) {
            double x = a + (b - a) * (j + 0.5) / n, gx = g(x);
            if (std::isfinite(gp) && std::isfinite(gx) && (gp > 0.0) != (gx > 0.0)) {
                double r = detail::solve_bracketed(g, xp, x, gp, gx, 0.0);
                double dg = cauchy_kernel(mu, cplx(r, 0.0)).dg.real();
                double mass = -1.0 / (var * dg);
                spec.atoms.push_back({r, mass});
                total += mass;
            }
            xp = x, gp = gx;
        }
    }
    if (!(total > 0.0)) fail(ErrorCode::NoConvergence, "phi_map recovered no mass");
    for (auto& a : spec.atoms) a.mass /= total;
    for (auto& c : spec.ac) c.weight /= total;
    return build_measure(spec);
}

Measure to_measure(const SpectralResult& r) {
    MeasureSpec spec;
    double total = 0.0;
    const auto& x = r.density.x;
    const auto& d = r.density.density;
    for (const auto& s : r.density.support) {
        Tabulated tab;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] >= s.left && x[i] <= s.right) tab.grid.push_back(x[i]), tab.density.push_back(d[i]);
        if (tab.grid.size() < 2) continue;
        tab.density.front() = 0.0;
        tab.density.back() = 0.0;
        double w = 0.0;
        for (std::size_t j = 0; j + 1 < tab.grid.size(); ++j)
            w += 0.5 * (tab.grid[j + 1] - tab.grid[j]) * (tab.density[j] + tab.density[j + 1]);
        if (w <= 0.0) continue;
        for (double& v : tab.density) v /= w;
        spec.ac.push_back({w, tab});
        total += w;
    }
    for (const auto& a : r.atoms) {
        spec.atoms.push_back({a.position, a.mass});
        total += a.mass;
    }
    if (!(total > 0.0)) fail(ErrorCode::InvalidParameter, "result carries no mass");
    for (auto& a : spec.atoms) a.mass /= total;
    for (auto& c : spec.ac) c.weight /= total;
    return build_measure(spec);
}

}  // namespace freeconv
