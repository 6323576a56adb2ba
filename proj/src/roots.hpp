#pragma once

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

namespace freeconv::detail {

// Root of a continuous f on [lo, hi] given a sign change, to |hi - lo| <= tol
// (or a few ulps).  Returns the bracket midpoint.
template <class Fn>
double solve_bracketed(Fn&& f, double lo, double hi, double flo, double fhi, double tol) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    std::uintmax_t iters = 200;
    auto stop = [tol](double a, double b) {
        return std::abs(b - a) <= tol || std::abs(b - a) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(a);
    };
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    return 0.5 * (r.first + r.second);
}

// Bisection on a predicate that is false at `out` and true at `in`; returns
// the last point where it is false.
template <class Pred>
double bisect_edge(Pred&& inside, double out, double in, int steps) {
    for (int k = 0; k < steps; ++k) {
        double mid = 0.5 * (out + in);
        if (mid == out || mid == in) break;
        if (inside(mid))
            in = mid;
        else
            out = mid;
    }
    return out;
}

}  // namespace freeconv::detail
