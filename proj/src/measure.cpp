#include "freeconv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kTabulatedTol = 1e-6;

std::string at(const char* what, std::size_t i) {
    std::ostringstream os;
    os << what << "[" << i << "]";
    return os.str();
}

double trapezoid(const Tabulated& t) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < t.grid.size(); ++i)
        s += 0.5 * (t.grid[i + 1] - t.grid[i]) * (t.density[i] + t.density[i + 1]);
    return s;
}

void validate_shape(const Shape& shape, const std::string& where) {
    auto bad = [&](const std::string& msg) { fail(ErrorCode::InvalidParameter, where + ": " + msg); };
    if (auto* s = std::get_if<Semicircle>(&shape)) {
        if (!std::isfinite(s->center) || !(s->variance > 0.0) || !std::isfinite(s->variance))
            bad("semicircle needs finite center and variance > 0");
    } else if (auto* m = std::get_if<MarchenkoPastur>(&shape)) {
        if (!(m->rate > 0.0) || !std::isfinite(m->rate) || m->jump == 0.0 || !std::isfinite(m->jump))
            bad("marchenko_pastur needs rate > 0 and nonzero jump");
    } else if (auto* c = std::get_if<CauchyLaw>(&shape)) {
        if (!std::isfinite(c->location) || !(c->scale > 0.0) || !std::isfinite(c->scale))
            bad("cauchy needs finite location and scale > 0");
    } else if (auto* a = std::get_if<Arcsine>(&shape)) {
        if (!std::isfinite(a->left) || !std::isfinite(a->right) || !(a->left < a->right))
            bad("arcsine needs left < right");
    } else if (auto* t = std::get_if<Tabulated>(&shape)) {
        if (t->grid.size() < 2 || t->grid.size() != t->density.size())
            bad("tabulated needs matching grid/density of length >= 2");
        for (std::size_t i = 0; i < t->grid.size(); ++i) {
            if (!std::isfinite(t->grid[i]) || !std::isfinite(t->density[i]))
                bad("non-finite entry at " + at("grid", i));
            if (t->density[i] < 0.0) bad("negative density at " + at("density", i));
            if (i > 0 && !(t->grid[i] > t->grid[i - 1]))
                fail(ErrorCode::NonMonotoneGrid, where + ": grid not strictly increasing at " + at("grid", i));
        }
        double total = trapezoid(*t);
        if (std::abs(total - 1.0) > kTabulatedTol) {
            std::ostringstream os;
            os << where << ": tabulated density integrates to " << total;
            fail(ErrorCode::NonUnitMass, os.str());
        }
    }
}

Interval mp_interval(const MarchenkoPastur& m) {
    double r = std::sqrt(m.rate);
    double lo = m.jump * (1.0 - r) * (1.0 - r);
    double hi = m.jump * (1.0 + r) * (1.0 + r);
    if (lo > hi) std::swap(lo, hi);
    return {lo, hi};
}

Interval shape_interval(const Shape& shape) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (auto* s = std::get_if<Semicircle>(&shape)) {
        double r = 2.0 * std::sqrt(s->variance);
        return {s->center - r, s->center + r};
    }
    if (auto* m = std::get_if<MarchenkoPastur>(&shape)) return mp_interval(*m);
    if (std::holds_alternative<CauchyLaw>(shape)) return {-inf, inf};
    if (auto* a = std::get_if<Arcsine>(&shape)) return {a->left, a->right};
    auto& t = std::get<Tabulated>(shape);
    return {t.grid.front(), t.grid.back()};
}

}  // namespace

Measure build_measure(MeasureSpec spec) {
    if (spec.atoms.empty() && spec.ac.empty())
        fail(ErrorCode::InvalidParameter, "measure has neither atoms nor components");

    double total = 0.0;
    for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
        const auto& a = spec.atoms[i];
        if (!std::isfinite(a.position) || !std::isfinite(a.mass))
            fail(ErrorCode::InvalidParameter, at("atoms", i) + ": non-finite entry");
        if (!(a.mass > 0.0) || a.mass > 1.0 + kMassTol)
            fail(ErrorCode::InvalidParameter, at("atoms", i) + ".mass must lie in (0,1]");
        total += a.mass;
    }
    for (std::size_t i = 0; i < spec.ac.size(); ++i) {
        const auto& c = spec.ac[i];
        if (!std::isfinite(c.weight) || !(c.weight > 0.0) || c.weight > 1.0 + kMassTol)
            fail(ErrorCode::InvalidParameter, at("ac", i) + ".weight must lie in (0,1]");
        validate_shape(c.shape, at("ac", i));
        total += c.weight;
    }
    if (std::abs(total - 1.0) > kMassTol) {
        std::ostringstream os;
        os.precision(17);
        os << "total mass " << total << " differs from 1 by more than 1e-9";
        fail(ErrorCode::NonUnitMass, os.str());
    }

    std::sort(spec.atoms.begin(), spec.atoms.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });
    for (std::size_t i = 1; i < spec.atoms.size(); ++i)
        if (spec.atoms[i].position == spec.atoms[i - 1].position) {
            std::ostringstream os;
            os.precision(17);
            os << "duplicate atom at " << spec.atoms[i].position;
            fail(ErrorCode::DuplicateAtom, os.str());
        }

    for (auto& a : spec.atoms) a.mass /= total;
    for (auto& c : spec.ac) c.weight /= total;

    Measure mu;
    mu.atoms_ = std::move(spec.atoms);
    mu.ac_ = std::move(spec.ac);
    return mu;
}

Interval Measure::support_hull() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& a : all_point_masses()) {
        lo = std::min(lo, a.position);
        hi = std::max(hi, a.position);
    }
    for (const auto& c : ac_) {
        Interval s = shape_interval(c.shape);
        lo = std::min(lo, s.left);
        hi = std::max(hi, s.right);
    }
    return {lo, hi};
}

std::vector<Interval> Measure::ac_support() const {
    std::vector<Interval> v;
    for (const auto& c : ac_) v.push_back(shape_interval(c.shape));
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.left < b.left; });
    std::vector<Interval> merged;
    for (const auto& s : v) {
        if (!merged.empty() && s.left <= merged.back().right)
            merged.back().right = std::max(merged.back().right, s.right);
        else
            merged.push_back(s);
    }
    return merged;
}

std::vector<Atom> Measure::all_point_masses() const {
    std::vector<Atom> out = atoms_;
    for (const auto& c : ac_)
        if (auto* m = std::get_if<MarchenkoPastur>(&c.shape); m && m->rate < 1.0) {
            double mass = c.weight * (1.0 - m->rate);
            auto it = std::find_if(out.begin(), out.end(), [](const Atom& a) { return a.position == 0.0; });
            if (it != out.end())
                it->mass += mass;
            else
                out.push_back({0.0, mass});
        }
    std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
    return out;
}

std::optional<double> Measure::point_mass_location() const {
    if (ac_.empty() && atoms_.size() == 1) return atoms_.front().position;
    return std::nullopt;
}

bool Measure::has_heavy_tail() const {
    return std::any_of(ac_.begin(), ac_.end(),
                       [](const AcComponent& c) { return std::holds_alternative<CauchyLaw>(c.shape); });
}

Measure dirac(double a) { return build_measure({{{a, 1.0}}, {}}); }

Measure bernoulli() { return build_measure({{{-1.0, 0.5}, {1.0, 0.5}}, {}}); }

Measure semicircle(double center, double variance) {
    return build_measure({{}, {{1.0, Semicircle{center, variance}}}});
}

Measure arcsine(double left, double right) { return build_measure({{}, {{1.0, Arcsine{left, right}}}}); }

Measure marchenko_pastur(double rate, double jump) {
    return build_measure({{}, {{1.0, MarchenkoPastur{rate, jump}}}});
}

Measure cauchy(double location, double scale) {
    return build_measure({{}, {{1.0, CauchyLaw{location, scale}}}});
}

std::string family_name(const Shape& shape) {
    switch (shape.index()) {
        case 0: return "semicircle";
        case 1: return "marchenko_pastur";
        case 2: return "cauchy";
        case 3: return "arcsine";
        default: return "tabulated";
    }
}

}  // namespace freeconv
