#include "reference.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace ref {

namespace {
constexpr double kPi = std::numbers::pi;
}

double semicircle_density(double x, double center, double variance) {
    double r2 = 4.0 * variance - (x - center) * (x - center);
    return r2 > 0.0 ? std::sqrt(r2) / (2.0 * kPi * variance) : 0.0;
}

double arcsine_density(double x, double a, double b) {
    if (x <= a || x >= b) return 0.0;
    return 1.0 / (kPi * std::sqrt((x - a) * (b - x)));
}

double mp_density(double x, double rate) {
    double lo = std::pow(1.0 - std::sqrt(rate), 2), hi = std::pow(1.0 + std::sqrt(rate), 2);
    if (x <= lo || x >= hi) return 0.0;
    return std::sqrt((x - lo) * (hi - x)) / (2.0 * kPi * x);
}

cplx semicircle_G(cplx z, double t) {
    cplx d = std::sqrt(z * z - 4.0 * t);
    cplx g1 = (z - d) / (2.0 * t), g2 = (z + d) / (2.0 * t);
    return g1.imag() < g2.imag() ? g1 : g2;
}

cplx bernoulli_G(cplx z) { return z / (z * z - 1.0); }

cplx atomic_G(const std::vector<double>& pos, const std::vector<double>& mass, cplx z) {
    cplx g = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) g += mass[i] / (z - pos[i]);
    return g;
}

std::vector<double> atomic_moments(const std::vector<double>& pos, const std::vector<double>& mass, int n) {
    std::vector<double> m(n + 1, 0.0);
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (int k = 0; k <= n; ++k) m[k] += mass[i] * std::pow(pos[i], k);
    return m;
}

namespace {

// restricted growth strings enumerate set partitions
void each_partition(int n, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> a(n, 0);
    std::function<void(int, int)> rec = [&](int i, int maxb) {
        if (i == n) {
            fn(a);
            return;
        }
        for (int b = 0; b <= maxb + 1; ++b) {
            a[i] = b;
            rec(i + 1, std::max(maxb, b));
        }
    };
    if (n == 0) {
        fn(a);
        return;
    }
    a[0] = 0;
    rec(1, 0);
}

bool crossing(const std::vector<int>& a) {
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (int l = k + 1; l < n; ++l)
                    if (a[i] == a[k] && a[j] == a[l] && a[i] != a[j]) return true;
    return false;
}

}  // namespace

std::vector<double> moments_from_free_cumulants_bruteforce(const std::vector<double>& kappa, int n) {
    std::vector<double> m(n + 1, 0.0);
    m[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        each_partition(k, [&](const std::vector<int>& a) {
            if (crossing(a)) return;
            std::vector<int> sizes(k, 0);
            for (int b : a) ++sizes[b];
            double prod = 1.0;
            for (int s : sizes)
                if (s > 0) prod *= kappa[s];
            m[k] += prod;
        });
    }
    return m;
}

std::vector<double> moments_from_boolean_cumulants_bruteforce(const std::vector<double>& b, int n) {
    std::vector<double> m(n + 1, 0.0);
    m[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        // compositions of k <-> subsets of the k-1 cut points
        for (unsigned mask = 0; mask < (1u << (k - 1)); ++mask) {
            double prod = 1.0;
            int len = 1;
            for (int i = 0; i < k - 1; ++i) {
                if (mask & (1u << i)) {
                    prod *= b[len];
                    len = 1;
                } else {
                    ++len;
                }
            }
            m[k] += prod * b[len];
        }
    }
    return m;
}

std::uint64_t catalan(int n) {
    std::uint64_t c = 1;
    for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
    return c;
}

int atomic_component_count(const std::vector<double>& pos, const std::vector<double>& mass, double p,
                           double lo, double hi, int n) {
    const double thr = 1.0 / (p - 1.0);
    int count = 0;
    bool prev = false;
    for (int i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * i / (n - 1.0);
        double g = 0.0, g2 = 0.0;
        bool at_atom = false;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            double d = x - pos[j];
            if (d == 0.0) {
                at_atom = true;
                break;
            }
            g += mass[j] / d;
            g2 += mass[j] / (d * d);
        }
        double ratio;
        if (at_atom) {
            for (std::size_t j = 0; j < pos.size(); ++j)
                if (x == pos[j]) ratio = 1.0 / mass[j] - 1.0;
        } else {
            ratio = g2 / (g * g) - 1.0;  // F' - 1 with F = 1/G
        }
        bool in = ratio > thr;
        if (in && !prev) ++count;
        prev = in;
    }
    return count;
}

}  // namespace ref
