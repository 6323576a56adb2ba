#include "freeconv/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "freeconv/convolution.hpp"
#include "freeconv/errors.hpp"
#include "freeconv/parallel.hpp"
#include "roots.hpp"

namespace freeconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kScanPoints = 4096;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct Gap {
    double a, b;
};

std::vector<Gap> gaps_of(const std::vector<Interval>& blocked, Interval window) {
    std::vector<Gap> out;
    double cur = window.left;
    for (const auto& s : blocked) {
        if (s.right < cur) continue;
        if (s.left > window.right) break;
        if (s.left > cur) out.push_back({cur, s.left});
        cur = std::max(cur, s.right);
    }
    if (cur < window.right) out.push_back({cur, window.right});
    return out;
}

bool near(double x, double y) { return std::abs(x - y) <= 1e-9 * (1.0 + std::abs(x)); }

}  // namespace

std::string regime_name(AtomRegime r) {
    switch (r) {
        case AtomRegime::FreePower: return "free-power";
        case AtomRegime::Boolean: return "boolean";
        case AtomRegime::BpqGeneral: return "bpq-general";
        case AtomRegime::BpqSpecial: return "bpq-special";
    }
    return "unknown";
}

FmuLimit f_mu_limit(const ReciprocalTransform& F, double x) {
    double prev = -1.0;
    int stable = 0;
    for (int k = 0; k <= 40; ++k) {
        double v = mass_ratio(F, x, std::ldexp(1.0, -k));
        if (!std::isfinite(v) || v > kDivergence) return {kInf, true};
        if (std::abs(v - prev) <= 1e-14 * (1.0 + v)) {
            if (++stable >= 2) return {v, false};
        } else {
            stable = 0;
        }
        prev = v;
    }
    return {prev, false};
}

FmuLimit f_mu_limit(const Measure& mu, double x) { return f_mu_limit(reciprocal(mu), x); }

AtomScan scan_atoms(const ReciprocalTransform& F, double p, double q, Interval window,
                    const std::vector<VPlusInterval>* vplus) {
    if (!(p >= 1.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q))
        fail(ErrorCode::InvalidParameter, "find_atoms needs p >= 1 and q > 0");
    AtomScan out;
    if (F.point_mass()) {
        double a = p * q * *F.point_mass() + 0.0;
        AtomRegime reg = p == 1.0 ? AtomRegime::Boolean : q == 1.0 ? AtomRegime::FreePower : AtomRegime::BpqGeneral;
        out.atoms.push_back({a, 1.0, *F.point_mass(), {0.0, 0.0, 1.0, reg}});
        out.candidates.push_back({*F.point_mass(), a, 0.0, false, true, "point mass"});
        return out;
    }

    BpqParams b(p, q);
    const bool boolean = p == 1.0;
    const double T = boolean ? kInf : 1.0 / (p - 1.0);

    if (!boolean && b.special()) {
        // a single candidate at the origin
        FValue v = F.eval(cplx(0.0, 0.0));
        AtomCandidate c{0.0, kInf, 0.0, false, false, ""};
        if (!finite(v.f) || std::abs(v.f.imag()) > 1e-12 * (1.0 + std::abs(v.f))) {
            c.reason = "F(0) is not real";
            out.candidates.push_back(c);
            return out;
        }
        FmuLimit fm = f_mu_limit(F, 0.0);
        c.position = (1.0 - p) * v.f.real() + 0.0;
        c.f_mu = fm.value;
        c.f_mu_infinite = fm.infinite;
        if (fm.infinite || !(fm.value > 0.0) || !(fm.value < T * (1.0 - kStrictMargin))) {
            c.reason = "f_mu(0) not strictly inside (0, 1/(p-1))";
        } else {
            c.accepted = true;
            double mass = 1.0 - (p - 1.0) * fm.value;
            out.atoms.push_back({c.position, mass, 0.0, {v.f.real(), fm.value, 1.0 / mass, AtomRegime::BpqSpecial}});
        }
        out.candidates.push_back(c);
        return out;
    }

    const double qp = b.qprime();
    const double c = boolean ? 1.0 - 1.0 / q : p * (q - 1.0) / qp;
    AtomRegime regime = boolean ? AtomRegime::Boolean : q == 1.0 ? AtomRegime::FreePower : AtomRegime::BpqGeneral;

    std::vector<Interval> blocked;
    if (boolean) {
        if (F.ac_support()) blocked = *F.ac_support();
    } else {
        std::vector<VPlusInterval> local;
        if (!vplus) local = v_plus(HFunction{F, p}, window);
        for (const auto& v : vplus ? *vplus : local) blocked.push_back({v.left, v.right});
    }
    std::sort(blocked.begin(), blocked.end(), [](const Interval& x, const Interval& y) { return x.left < y.left; });
    std::vector<Gap> gaps = gaps_of(blocked, window);
    auto at_edge = [&](double x) {
        for (const auto& s : blocked)
            if (near(x, s.left) || near(x, s.right)) return true;
        return false;
    };

    // g(x) = F(x) - c x on the real boundary; NaN where F is not real or singular
    auto g = [&](double x) {
        FValue v = F.eval(cplx(x, 0.0));
        if (!finite(v.f) || std::abs(v.f.imag()) > 1e-9 * (1.0 + std::abs(v.f)))
            return std::numeric_limits<double>::quiet_NaN();
        return v.f.real() - c * x;
    };

    std::vector<double> roots;
    for (const auto& gap : gaps) {
        const std::size_t n = kScanPoints;
        std::vector<double> xs(n), gs(n);
        for (std::size_t i = 0; i < n; ++i)
            xs[i] = gap.a + (gap.b - gap.a) * static_cast<double>(i) / static_cast<double>(n - 1);
        parallel_for(n, [&](std::size_t i) { gs[i] = g(xs[i]); });
        auto tiny = [&](std::size_t i) { return std::abs(gs[i]) <= 1e-12 * (1.0 + std::abs(xs[i])); };
        if (std::isfinite(gs.front()) && tiny(0)) roots.push_back(xs.front());
        if (std::isfinite(gs.back()) && tiny(n - 1)) roots.push_back(xs.back());
        std::vector<std::size_t> cells;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!std::isfinite(gs[i]) || !std::isfinite(gs[i + 1])) continue;
            if (gs[i] == 0.0) roots.push_back(xs[i]);
            else if ((gs[i] > 0.0) != (gs[i + 1] > 0.0) && gs[i + 1] != 0.0) cells.push_back(i);
        }
        if (gs.back() == 0.0) roots.push_back(xs.back());
        std::vector<double> found(cells.size(), std::numeric_limits<double>::quiet_NaN());
        parallel_for(cells.size(), [&](std::size_t k) {
            std::size_t i = cells[k];
            double r = detail::solve_bracketed(g, xs[i], xs[i + 1], gs[i], gs[i + 1], 0.0);
            double gr = g(r);
            // a pole of F also flips the sign; keep genuine zeros only
            if (std::isfinite(gr) && std::abs(gr) <= 1e-7 * (1.0 + std::abs(r) + std::abs(c * r))) found[k] = r;
        });
        for (double r : found)
            if (std::isfinite(r)) roots.push_back(r);
    }
    // known atoms of mu inside or at the edge of a blocked interval
    std::vector<double> embedded;
    if (const auto& known = F.atom_positions())
        for (double a : *known) {
            if (a < window.left || a > window.right) continue;
            bool inside = false;
            for (const auto& s : blocked) inside = inside || (a >= s.left && a <= s.right);
            if (!inside) continue;
            double ga = g(a);
            if (std::isfinite(ga) && std::abs(ga) <= 1e-12 * (1.0 + std::abs(a))) {
                roots.push_back(a);
                embedded.push_back(a);
            }
        }
    auto is_embedded = [&](double x) {
        for (double a : embedded)
            if (near(a, x)) return true;
        return false;
    };
    std::sort(roots.begin(), roots.end());
    std::vector<double> uniq;
    for (double r : roots)
        if (uniq.empty() || !near(uniq.back(), r)) uniq.push_back(r);

    const double pprime = boolean ? 1.0 : p * q / qp;
    for (double x : uniq) {
        FmuLimit fm = f_mu_limit(F, x);
        FValue v = F.eval(cplx(x, 0.0));
        AtomCandidate cand{x, pprime * x + 0.0, fm.value, fm.infinite, false, ""};
        const bool emb = is_embedded(x);
        bool edge = at_edge(x) && !emb;
        if (fm.infinite) {
            if (!edge && !emb)
                fail(ErrorCode::ScanInconclusive,
                     "f_mu diverges at a real root of the atom equation inside a gap, x = " + fmt(x));
            cand.reason = emb ? "f_mu diverges at an embedded atom" : "f_mu diverges at a support edge";
        } else if (!(fm.value > 0.0)) {
            cand.reason = "f_mu vanishes";
        } else if (!boolean && !(fm.value < T * (1.0 - kStrictMargin))) {
            cand.reason = "f_mu is not strictly below 1/(p-1)";
        } else if (boolean && edge) {
            cand.reason = "candidate sits on a support edge";
        } else {
            double jc, mass;
            if (boolean) {
                jc = q * (1.0 + fm.value) + 1.0 - q;
            } else {
                double hd = 1.0 - (p - 1.0) * fm.value;
                jc = (p * q / hd - qp) / (p - 1.0);
            }
            mass = 1.0 / jc;
            if (!(mass > 0.0) || !(mass <= 1.0 + 1e-12)) {
                cand.reason = "mass outside (0, 1]";
            } else {
                cand.accepted = true;
                out.atoms.push_back({cand.position, std::min(mass, 1.0), x, {v.f.real(), fm.value, jc, regime}});
            }
        }
        out.candidates.push_back(cand);
    }
    return out;
}

std::vector<AtomRecord> find_atoms(const ReciprocalTransform& F, double p, double q, std::optional<Interval> window) {
    Interval w;
    if (window) {
        w = *window;
    } else if (p == 1.0) {
        w = boolean_reciprocal(F, q).support_hint();
    } else {
        w = default_x_window(F, p);
    }
    return scan_atoms(F, p, q, w).atoms;
}

std::vector<AtomRecord> find_atoms(const Measure& mu, double p, double q, std::optional<Interval> window) {
    return find_atoms(reciprocal(mu), p, q, window);
}

ComponentCount component_count(const ReciprocalTransform& F, double p, std::optional<Interval> window) {
    if (!(p > 1.0)) fail(ErrorCode::InvalidParameter, "component_count needs p > 1");
    if (F.point_mass()) return {0, {}};
    auto iv = v_plus(HFunction{F, p}, window ? *window : default_x_window(F, p));
    return {static_cast<int>(iv.size()), iv};
}

ComponentCount component_count(const Measure& mu, double p, std::optional<Interval> window) {
    return component_count(reciprocal(mu), p, window);
}

ComponentReport monotonicity_report(const ReciprocalTransform& F, const std::vector<double>& p_list,
                                    std::optional<Interval> window) {
    if (p_list.empty()) fail(ErrorCode::InvalidParameter, "p_list is empty");
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        if (!(p_list[i] > 1.0)) fail(ErrorCode::InvalidParameter, "p_list entries must exceed 1");
        if (i && !(p_list[i] > p_list[i - 1])) fail(ErrorCode::InvalidParameter, "p_list must increase");
    }
    Interval w = window ? *window : default_x_window(F, p_list.back());
    ComponentReport rep;
    rep.p_values = p_list;
    rep.counts.resize(p_list.size());
    rep.intervals.resize(p_list.size());
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        ComponentCount c = component_count(F, p_list[i], w);
        rep.counts[i] = c.count;
        rep.intervals[i] = c.intervals;
    }
    for (std::size_t i = 1; i < p_list.size(); ++i)
        if (rep.counts[i] > rep.counts[i - 1]) {
            std::ostringstream os;
            os.precision(17);
            os << "component count rises from " << rep.counts[i - 1] << " at p = " << p_list[i - 1] << " to "
               << rep.counts[i] << " at p = " << p_list[i] << "; V+ intervals:";
            for (std::size_t k : {i - 1, i}) {
                os << " p=" << p_list[k] << ":";
                for (const auto& v : rep.intervals[k]) os << " [" << v.left << ", " << v.right << "]";
            }
            fail(ErrorCode::MonotonicityViolation, os.str());
        }
    return rep;
}

ComponentReport monotonicity_report(const Measure& mu, const std::vector<double>& p_list,
                                    std::optional<Interval> window) {
    return monotonicity_report(reciprocal(mu), p_list, window);
}

InfdivReport infdiv_diagnostics(const Measure& mu, const BpqParams& params, std::size_t sample_n,
                                std::uint64_t seed) {
    if (!(params.p > 1.0)) fail(ErrorCode::InvalidParameter, "infdiv_diagnostics needs p > 1");
    if (sample_n == 0) fail(ErrorCode::InvalidParameter, "sample_n must be positive");
    ReciprocalTransform F = reciprocal(mu);
    (void)phi_bpq(F, params, cplx(0.0, 1.0));  // regime gate
    ReciprocalTransform FB = bpq_reciprocal(F, params);
    ReciprocalTransform Fq = boolean_reciprocal(F, params.q);
    HFunction H{F, params.p};

    Interval h = FB.support_hint();
    const double mid = 0.5 * (h.left + h.right);
    const double scale = std::max(1.0, 0.5 * h.width());

    // pairs of points in the closed upper half-plane, half of them close together
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto draw = [&]() {
        double x = mid + scale * (4.0 * U(rng) - 2.0);
        if (U(rng) < 0.1) return cplx(x, 0.0);
        return cplx(x, scale * std::pow(10.0, -3.0 + 3.5 * U(rng)));
    };
    std::vector<std::pair<cplx, cplx>> pairs(sample_n);
    for (auto& pr : pairs) {
        pr.first = draw();
        if (U(rng) < 0.5) {
            pr.second = draw();
        } else {
            double r = scale * std::pow(10.0, -4.0 + 3.0 * U(rng)), th = std::numbers::pi * U(rng);
            pr.second = pr.first + cplx(r * std::cos(th), r * std::sin(th));
            if (pr.second.imag() < 0.0) pr.second.imag(0.0);
        }
    }

    struct Eval {
        cplx fb1, fb2, phi1, phi2, phiw, om1, om2, fq1, fq2;
    };
    std::vector<Eval> ev(sample_n);
    parallel_for(sample_n, [&](std::size_t k) {
        auto [w1, w2] = pairs[k];
        Eval& e = ev[k];
        e.fb1 = FB(w1), e.fb2 = FB(w2);
        e.phi1 = e.fb1.imag() > 0.0 ? phi_bpq(F, params, e.fb1) : w1 - e.fb1;
        e.phi2 = e.fb2.imag() > 0.0 ? phi_bpq(F, params, e.fb2) : w2 - e.fb2;
        e.phiw = w1.imag() > 0.0 ? phi_bpq(F, params, w1) : cplx(0.0, 0.0);
        e.om1 = omega_p(H, w1), e.om2 = omega_p(H, w2);
        e.fq1 = Fq(e.om1), e.fq2 = Fq(e.om2);
    });

    InfdivReport rep;
    InequalityCheck cim{"Im phi <= 1e-10", 0, kInf};
    InequalityCheck cphi{"|phi(z1)-phi(z2)| <= |z1-z2| on closure of F(C+)", 0, kInf};
    InequalityCheck cf{"|w1-w2|/2 <= |F(w1)-F(w2)| on C+ and R", 0, kInf};
    InequalityCheck clip{"|F_boolean(z1)-F_boolean(z2)| <= (1+q/(p-1))|z1-z2| on closure of Omega_p", 0, kInf};
    InequalityCheck cinv{"phi(F(w)) = w - F(w)", 0, kInf};
    const double L = 1.0 + params.q / (params.p - 1.0);
    std::string witness;
    auto note = [&](InequalityCheck& c, double slack, cplx a, cplx b) {
        ++c.pairs;
        if (slack < c.worst_slack) c.worst_slack = slack;
        if (slack < 0.0 && witness.empty()) {
            std::ostringstream os;
            os.precision(17);
            os << c.name << " violated by " << -slack << " at pair (" << a.real() << "," << a.imag() << "), ("
               << b.real() << "," << b.imag() << ")";
            witness = os.str();
        }
    };
    for (std::size_t k = 0; k < sample_n; ++k) {
        auto [w1, w2] = pairs[k];
        const Eval& e = ev[k];
        if (w1.imag() > 0.0) note(cim, 1e-10 - e.phiw.imag(), w1, w1);
        note(cim, 1e-10 - e.phi1.imag(), e.fb1, e.fb1);
        double dz = std::abs(e.fb1 - e.fb2), dw = std::abs(w1 - w2), dom = std::abs(e.om1 - e.om2);
        note(cphi, dz * (1.0 + 1e-9) + 1e-12 - std::abs(e.phi1 - e.phi2), e.fb1, e.fb2);
        note(cf, dz * (1.0 + 1e-9) + 1e-12 - 0.5 * dw, w1, w2);
        note(clip, L * dom * (1.0 + 1e-9) + 1e-12 - std::abs(e.fq1 - e.fq2), e.om1, e.om2);
        if (e.fb1.imag() > 0.0)
            note(cinv, 1e-8 * (1.0 + std::abs(w1)) - std::abs(e.phi1 - (w1 - e.fb1)), w1, e.fb1);
    }
    rep.checks = {cim, cphi, cf, clip, cinv};
    for (const auto& c : rep.checks) rep.passed = rep.passed && c.worst_slack >= 0.0;
    if (!rep.passed) fail(ErrorCode::DiagnosticFailure, witness);
    return rep;
}

}  // namespace freeconv
