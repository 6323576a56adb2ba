#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace freeconv {

using cplx = std::complex<double>;

struct Interval {
    double left = 0.0;
    double right = 0.0;

    double width() const { return right - left; }
    bool contains(double x) const { return x >= left && x <= right; }
};

struct Atom {
    double position = 0.0;
    double mass = 0.0;
};

struct Semicircle {
    double center = 0.0;
    double variance = 1.0;
};

// Free Poisson law with rate `rate` and jump size `jump`.  For rate < 1 this
// includes the point mass 1 - rate at the origin.
struct MarchenkoPastur {
    double rate = 1.0;
    double jump = 1.0;
};

struct CauchyLaw {
    double location = 0.0;
    double scale = 1.0;
};

struct Arcsine {
    double left = -2.0;
    double right = 2.0;
};

// Piecewise-linear density through (grid[i], density[i]), zero outside.
struct Tabulated {
    std::vector<double> grid;
    std::vector<double> density;
};

using Shape = std::variant<Semicircle, MarchenkoPastur, CauchyLaw, Arcsine, Tabulated>;

struct AcComponent {
    double weight = 1.0;
    Shape shape;
};

struct MeasureSpec {
    std::vector<Atom> atoms;
    std::vector<AcComponent> ac;
};

class Measure {
public:
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<AcComponent>& components() const { return ac_; }

    // Hull of the support; unbounded (infinite ends) if a Cauchy component is present.
    Interval support_hull() const;

    // Closed intervals carrying the continuous part, sorted and merged.
    std::vector<Interval> ac_support() const;

    // Point masses including those hidden inside families (Marchenko-Pastur at 0).
    std::vector<Atom> all_point_masses() const;

    std::optional<double> point_mass_location() const;
    bool has_heavy_tail() const;

private:
    friend Measure build_measure(MeasureSpec spec);
    std::vector<Atom> atoms_;
    std::vector<AcComponent> ac_;
};

Measure build_measure(MeasureSpec spec);

Measure dirac(double a);
Measure bernoulli();  // (delta_{-1} + delta_{1}) / 2
Measure semicircle(double center, double variance);
Measure arcsine(double left, double right);
Measure marchenko_pastur(double rate, double jump);
Measure cauchy(double location, double scale);

std::string family_name(const Shape& shape);

}  // namespace freeconv
