#include "freeconv/transforms.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Offset used when the engine needs a boundary value inside a tabulated support.
constexpr double kTabulatedLift = 1e-13;

struct GPair {
    cplx g;
    cplx dg;
};

// sqrt(z - l) * sqrt(z - r): the branch that behaves like z at infinity and
// is continuous on the closed upper half-plane.
cplx root_pair(cplx z, double l, double r) { return std::sqrt(z - l) * std::sqrt(z - r); }

GPair semicircle_g(const Semicircle& s, cplx z) {
    double rad = 2.0 * std::sqrt(s.variance);
    cplx w = z - s.center;
    cplx S = root_pair(w, -rad, rad);
    cplx g = 2.0 / (w + S);
    cplx dS = w / S;
    return {g, -0.5 * g * g * (1.0 + dS)};
}

GPair arcsine_g(const Arcsine& a, cplx z) {
    cplx S = root_pair(z, a.left, a.right);
    cplx g = 1.0 / S;
    cplx dS = (z - 0.5 * (a.left + a.right)) / S;
    return {g, -g * g * dS};
}

GPair mp_positive(double rate, double jump, cplx z) {
    double r = std::sqrt(rate);
    double lo = jump * (1.0 - r) * (1.0 - r);
    double hi = jump * (1.0 + r) * (1.0 + r);
    cplx S = root_pair(z, lo, hi);
    cplx N = z + jump * (1.0 - rate);
    cplx g = 2.0 / (N + S);
    cplx dS = (z - 0.5 * (lo + hi)) / S;
    return {g, -0.5 * g * g * (1.0 + dS)};
}

GPair mp_g(const MarchenkoPastur& m, cplx z) {
    if (m.jump > 0.0) return mp_positive(m.rate, m.jump, z);
    // reflection s -> -s
    cplx zr(-z.real(), z.imag());
    GPair p = mp_positive(m.rate, -m.jump, zr);
    return {-std::conj(p.g), std::conj(p.dg)};
}

GPair cauchy_g(const CauchyLaw& c, cplx z) {
    cplx g = 1.0 / (z - c.location + cplx(0.0, c.scale));
    return {g, -g * g};
}

GPair tabulated_g(const Tabulated& t, cplx z) {
    using GL = boost::math::quadrature::gauss<double, 10>;
    if (z.imag() == 0.0 && z.real() > t.grid.front() && z.real() < t.grid.back())
        z = cplx(z.real(), kTabulatedLift * std::max(1.0, std::abs(z.real())));
    cplx g = 0.0, dg = 0.0;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    for (std::size_t i = 0; i + 1 < t.grid.size(); ++i) {
        double s0 = t.grid[i], s1 = t.grid[i + 1];
        double d0 = t.density[i], d1 = t.density[i + 1];
        if (d0 == 0.0 && d1 == 0.0) continue;
        double h = s1 - s0;
        double k = (d1 - d0) / h;
        double mid = 0.5 * (s0 + s1);
        if (std::abs(z - mid) > 4.0 * h) {
            for (std::size_t j = 0; j < xs.size(); ++j) {
                for (int sgn : {-1, 1}) {
                    if (xs[j] == 0.0 && sgn > 0) continue;
                    double s = mid + sgn * 0.5 * h * xs[j];
                    double d = d0 + k * (s - s0);
                    cplx inv = 1.0 / (z - s);
                    double w = 0.5 * h * ws[j];
                    g += w * d * inv;
                    dg -= w * d * inv * inv;
                }
            }
        } else {
            cplx u0 = z - s0, u1 = z - s1;
            cplx D = d0 + k * (z - s0);
            cplx L = std::log(u0) - std::log(u1);
            g += D * L - k * h;
            dg += k * L + D * (1.0 / u0 - 1.0 / u1);
        }
    }
    return {g, dg};
}

GPair shape_g(const Shape& shape, cplx z) {
    return std::visit(
        [&](const auto& s) -> GPair {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Semicircle>) return semicircle_g(s, z);
            if constexpr (std::is_same_v<T, MarchenkoPastur>) return mp_g(s, z);
            if constexpr (std::is_same_v<T, CauchyLaw>) return cauchy_g(s, z);
            if constexpr (std::is_same_v<T, Arcsine>) return arcsine_g(s, z);
            if constexpr (std::is_same_v<T, Tabulated>) return tabulated_g(s, z);
        },
        shape);
}

void check_argument(cplx z) {
    if (!finite(z) || z.imag() < 0.0)
        fail(ErrorCode::InvalidParameter, "argument must be finite with nonnegative imaginary part");
}

void check_boundary(const Measure& mu, cplx z) {
    if (z.imag() != 0.0) return;
    double x = z.real();
    for (const auto& a : mu.all_point_masses())
        if (a.position == x) {
            std::ostringstream os;
            os.precision(17);
            os << "real argument " << x << " sits on an atom";
            fail(ErrorCode::EvaluationOnSingularity, os.str());
        }
    for (const auto& c : mu.components())
        if (auto* t = std::get_if<Tabulated>(&c.shape); t && x >= t->grid.front() && x <= t->grid.back())
            fail(ErrorCode::EvaluationOnSingularity, "real argument inside a tabulated support");
}

}  // namespace

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

CauchyValue cauchy_kernel(const Measure& mu, cplx z) {
    cplx g = 0.0, dg = 0.0;
    for (const auto& a : mu.atoms()) {
        cplx inv = 1.0 / (z - a.position);
        g += a.mass * inv;
        dg -= a.mass * inv * inv;
    }
    for (const auto& c : mu.components()) {
        GPair p = shape_g(c.shape, z);
        g += c.weight * p.g;
        dg += c.weight * p.dg;
    }
    return {g, dg};
}

cplx eval_G(const Measure& mu, cplx z) {
    check_argument(z);
    check_boundary(mu, z);
    cplx g = cauchy_kernel(mu, z).g;
    if (!finite(g)) fail(ErrorCode::EvaluationOnSingularity, "Cauchy transform is singular at this point");
    return g;
}

cplx eval_F(const Measure& mu, cplx z) {
    cplx g = eval_G(mu, z);
    if (g == cplx(0.0, 0.0)) fail(ErrorCode::ZeroCauchyTransform, "G vanishes; F is undefined here");
    cplx f = 1.0 / g;
    if (!finite(f)) fail(ErrorCode::ZeroCauchyTransform, "G underflows; F is undefined here");
    return f;
}

cplx eval_E(const Measure& mu, cplx z) { return z - eval_F(mu, z); }

ReciprocalTransform::ReciprocalTransform(Evaluator eval, Interval support_hint, double variance_hint,
                                         std::string label)
    : eval_(std::move(eval)), hint_(support_hint), variance_(variance_hint), label_(std::move(label)) {}

ReciprocalTransform reciprocal(const Measure& mu) {
    auto point_masses = mu.all_point_masses();
    auto eval = [mu, point_masses](cplx z) -> FValue {
        if (z.imag() == 0.0)
            for (const auto& a : point_masses)
                if (a.position == z.real()) return {0.0, 1.0 / a.mass};
        CauchyValue k = cauchy_kernel(mu, z);
        if (k.g == cplx(0.0, 0.0) || !finite(k.g)) return {cplx(kInf, 0.0), cplx(kInf, 0.0)};
        cplx f = 1.0 / k.g;
        return {f, -k.dg * f * f};
    };
    Interval hull = mu.support_hull();
    double var = kInf;
    if (!mu.has_heavy_tail()) {
        // variance from the family parameters, cheap and exact
        double m1 = 0.0, m2 = 0.0;
        for (const auto& a : mu.atoms()) {
            m1 += a.mass * a.position;
            m2 += a.mass * a.position * a.position;
        }
        for (const auto& c : mu.components()) {
            double e1 = 0.0, e2 = 0.0;
            if (auto* s = std::get_if<Semicircle>(&c.shape)) {
                e1 = s->center;
                e2 = s->center * s->center + s->variance;
            } else if (auto* m = std::get_if<MarchenkoPastur>(&c.shape)) {
                e1 = m->rate * m->jump;
                e2 = m->jump * m->jump * (m->rate + m->rate * m->rate);
            } else if (auto* a = std::get_if<Arcsine>(&c.shape)) {
                double mid = 0.5 * (a->left + a->right), r = 0.5 * (a->right - a->left);
                e1 = mid;
                e2 = mid * mid + 0.5 * r * r;
            } else if (auto* t = std::get_if<Tabulated>(&c.shape)) {
                for (std::size_t i = 0; i + 1 < t->grid.size(); ++i) {
                    double s0 = t->grid[i], s1 = t->grid[i + 1], h = s1 - s0;
                    double d0 = t->density[i], d1 = t->density[i + 1];
                    // exact for the linear interpolant
                    e1 += h * (d0 * (2 * s0 + s1) + d1 * (s0 + 2 * s1)) / 6.0;
                    e2 += h * (d0 * (3 * s0 * s0 + 2 * s0 * s1 + s1 * s1) +
                               d1 * (s0 * s0 + 2 * s0 * s1 + 3 * s1 * s1)) / 12.0;
                }
            }
            m1 += c.weight * e1;
            m2 += c.weight * e2;
        }
        var = std::max(0.0, m2 - m1 * m1);
    } else {
        for (const auto& c : mu.components())
            if (auto* cl = std::get_if<CauchyLaw>(&c.shape)) {
                hull.left = std::min(std::isfinite(hull.left) ? hull.left : cl->location, cl->location - 10.0 * cl->scale);
                hull.right = std::max(std::isfinite(hull.right) ? hull.right : cl->location, cl->location + 10.0 * cl->scale);
            }
    }
    ReciprocalTransform F(eval, hull, var, "measure");
    F.set_ac_support(mu.ac_support());
    if (auto a = mu.point_mass_location()) F.set_point_mass(*a);
    std::vector<double> pos;
    for (const auto& a : mu.all_point_masses()) pos.push_back(a.position);
    F.set_atom_positions(std::move(pos));
    return F;
}

ReciprocalTransform shift_transform(double a) {
    ReciprocalTransform F([a](cplx z) -> FValue { return {z - a, 1.0}; }, {a, a}, 0.0, "dirac");
    F.set_ac_support({});
    F.set_point_mass(a);
    F.set_atom_positions({a});
    return F;
}

ReciprocalTransform boolean_reciprocal(const ReciprocalTransform& F, double q) {
    if (!(q > 0.0)) fail(ErrorCode::InvalidParameter, "boolean power needs q > 0");
    if (F.point_mass()) return shift_transform(q * *F.point_mass());
    auto eval = [F, q](cplx z) -> FValue {
        FValue v = F.eval(z);
        if (!finite(v.f)) return v;
        return {q * v.f + (1.0 - q) * z, q * v.df + (1.0 - q)};
    };
    Interval h = F.support_hint();
    double pad = std::sqrt(std::max(1.0, q) * F.variance_hint());
    Interval hint{std::min(h.left, q * h.left) - pad, std::max(h.right, q * h.right) + pad};
    ReciprocalTransform out(eval, hint, q * F.variance_hint(), "boolean");
    if (F.ac_support()) out.set_ac_support(*F.ac_support());
    // atoms of the Boolean power sit where F = (1 - 1/q) x, not at those of F
    return out;
}

}  // namespace freeconv
