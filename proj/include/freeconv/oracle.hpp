#pragma once

#include <vector>

#include "freeconv/convolution.hpp"
#include "freeconv/measure.hpp"
#include "freeconv/moments.hpp"

namespace freeconv {

enum class CumulantKind { Free, Boolean };

// values[k] is the k-th cumulant, k = 1..n; values[0] is unused (0).
struct CumulantVector {
    CumulantKind kind;
    std::vector<double> values;

    int order() const { return static_cast<int>(values.size()) - 1; }
};

CumulantVector moments_to_free_cumulants(const MomentVector& m);
MomentVector free_cumulants_to_moments(const CumulantVector& k);
CumulantVector moments_to_boolean_cumulants(const MomentVector& m);
MomentVector boolean_cumulants_to_moments(const CumulantVector& b);

// m(mu) -> kappa -> p kappa -> m -> b -> q b -> m
MomentVector predict_moments_bpq(const MomentVector& m, double p, double q);
MomentVector predict_moments_bpq(const Measure& mu, double p, double q, int n);

// atoms exactly plus the trapezoid rule over the density table
MomentVector result_moments(const SpectralResult& r, int n);

struct MomentComparison {
    std::vector<double> computed;
    std::vector<double> predicted;
    std::vector<double> deviation;  // |computed - predicted| / max(|predicted|, 1)
    double rel_tol;
    bool pass;
};

MomentComparison compare(const SpectralResult& r, const MomentVector& predicted, int n = 6, double rel_tol = 1e-4);
MomentComparison compare(const MomentVector& computed, const MomentVector& predicted, int n = 6,
                         double rel_tol = 1e-4);

}  // namespace freeconv
