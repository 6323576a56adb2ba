#include "freeconv/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "freeconv/errors.hpp"

namespace freeconv {

namespace {

void check_order(int n) {
    if (n < 0 || n > kMaxMomentOrder) fail(ErrorCode::InvalidParameter, "moment order must be in [0, 12]");
}

using Poly = std::vector<double>;

// [x^0 .. x^n] of a * b
Poly mul(const Poly& a, const Poly& b, std::size_t n) {
    Poly c(n + 1, 0.0);
    for (std::size_t i = 0; i < a.size() && i <= n; ++i)
        for (std::size_t j = 0; j < b.size() && i + j <= n; ++j) c[i + j] += a[i] * b[j];
    return c;
}

// powers[k][j] = [x^j] M(x)^k with M(x) = sum m_i x^i
std::vector<Poly> powers_of(const std::vector<double>& m, std::size_t n) {
    std::vector<Poly> pw(n + 1);
    pw[0] = Poly(n + 1, 0.0);
    pw[0][0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) pw[k] = mul(pw[k - 1], m, n);
    return pw;
}

}  // namespace

// m_n = sum_{k=1..n} kappa_k [x^{n-k}] M(x)^k
CumulantVector moments_to_free_cumulants(const MomentVector& mv) {
    const int n = mv.order();
    check_order(n);
    CumulantVector k{CumulantKind::Free, std::vector<double>(n + 1, 0.0)};
    auto pw = powers_of(mv.m, n);
    for (int j = 1; j <= n; ++j) {
        double s = mv.m[j];
        for (int i = 1; i < j; ++i) s -= k.values[i] * pw[i][j - i];
        k.values[j] = s;  // [x^0] M^j = 1
    }
    return k;
}

MomentVector free_cumulants_to_moments(const CumulantVector& k) {
    const int n = k.order();
    check_order(n);
    if (k.kind != CumulantKind::Free) fail(ErrorCode::InvalidParameter, "expected free cumulants");
    MomentVector mv{std::vector<double>(n + 1, 0.0)};
    mv.m[0] = 1.0;
    for (int j = 1; j <= n; ++j) {
        // only m_0..m_{j-1} enter [x^{j-i}] M^i for i >= 1
        auto pw = powers_of(std::vector<double>(mv.m.begin(), mv.m.begin() + j), j);
        double s = k.values[j];
        for (int i = 1; i < j; ++i) s += k.values[i] * pw[i][j - i];
        mv.m[j] = s;
    }
    return mv;
}

// m_n = sum_{k=1..n} b_k m_{n-k}
CumulantVector moments_to_boolean_cumulants(const MomentVector& mv) {
    const int n = mv.order();
    check_order(n);
    CumulantVector b{CumulantKind::Boolean, std::vector<double>(n + 1, 0.0)};
    for (int j = 1; j <= n; ++j) {
        double s = mv.m[j];
        for (int i = 1; i < j; ++i) s -= b.values[i] * mv.m[j - i];
        b.values[j] = s;
    }
    return b;
}

MomentVector boolean_cumulants_to_moments(const CumulantVector& b) {
    const int n = b.order();
    check_order(n);
    if (b.kind != CumulantKind::Boolean) fail(ErrorCode::InvalidParameter, "expected boolean cumulants");
    MomentVector mv{std::vector<double>(n + 1, 0.0)};
    mv.m[0] = 1.0;
    for (int j = 1; j <= n; ++j) {
        double s = 0.0;
        for (int i = 1; i <= j; ++i) s += b.values[i] * mv.m[j - i];
        mv.m[j] = s;
    }
    return mv;
}

MomentVector predict_moments_bpq(const MomentVector& m, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) fail(ErrorCode::InvalidParameter, "predict_moments_bpq needs p, q > 0");
    CumulantVector k = moments_to_free_cumulants(m);
    for (double& v : k.values) v *= p;
    CumulantVector b = moments_to_boolean_cumulants(free_cumulants_to_moments(k));
    for (double& v : b.values) v *= q;
    return boolean_cumulants_to_moments(b);
}

MomentVector predict_moments_bpq(const Measure& mu, double p, double q, int n) {
    return predict_moments_bpq(moments(mu, n), p, q);
}

MomentVector result_moments(const SpectralResult& r, int n) {
    check_order(n);
    MomentVector mv{std::vector<double>(n + 1, 0.0)};
    for (int k = 0; k <= n; ++k) {
        double s = r.density.trapezoid_moment(k);
        for (const auto& a : r.atoms) s += a.mass * std::pow(a.position, k);
        mv.m[k] = s;
    }
    return mv;
}

MomentComparison compare(const MomentVector& computed, const MomentVector& predicted, int n, double rel_tol) {
    if (n > computed.order() || n > predicted.order())
        fail(ErrorCode::InvalidParameter, "compare needs both moment vectors through order n");
    MomentComparison c{{}, {}, {}, rel_tol, true};
    for (int k = 0; k <= n; ++k) {
        double a = computed.m[k], b = predicted.m[k];
        double d = std::abs(a - b) / std::max(std::abs(b), 1.0);
        c.computed.push_back(a);
        c.predicted.push_back(b);
        c.deviation.push_back(d);
        c.pass = c.pass && d <= rel_tol;
    }
    return c;
}

MomentComparison compare(const SpectralResult& r, const MomentVector& predicted, int n, double rel_tol) {
    return compare(result_moments(r, n), predicted, n, rel_tol);
}

}  // namespace freeconv
