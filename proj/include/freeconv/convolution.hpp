#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freeconv/measure.hpp"
#include "freeconv/moments.hpp"
#include "freeconv/regularity.hpp"
#include "freeconv/subordination.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

// Tolerance on q' = 1 + pq - p for the special regime when p, q are floats.
constexpr double kRegimeTolerance = 1e-14;

struct BpqParams {
    double p = 1.0;
    double q = 1.0;
    // Sign of q' when p and q came from exact rationals.
    std::optional<int> exact_qprime_sign;

    BpqParams() = default;
    BpqParams(double p_, double q_) : p(p_), q(q_) {}
    static BpqParams rational(long long pn, long long pd, long long qn, long long qd);

    double p_star() const;  // p/(p-1), +inf at p = 1
    double q_star() const;  // q/(q-1), +inf at q = 1
    double qprime() const;  // 1 + pq - p
    std::optional<double> pprime() const;  // pq/q', absent when q' = 0
    bool special() const;   // q = 1/p*
    bool infinitely_divisible() const;  // q <= 1/p*
};

struct SpectralParams {
    std::string operation;
    std::optional<double> p, q, t, lambda;
};

struct SpectralDiagnostics {
    double max_residual = 0.0;         // subordination residuals over the table
    std::vector<double> moment_deviation;
    std::size_t stieltjes_unconverged = 0;
};

struct SpectralResult {
    DensityTable density;
    std::vector<AtomRecord> atoms;
    SpectralParams params;
    SpectralDiagnostics diagnostics;

    double atom_mass() const;
    double total_mass() const;
};

struct OpOptions {
    std::optional<Interval> window;  // output window; default from the operation
    std::size_t grid_n = 2001;
};

SpectralResult free_power(const Measure& mu, double p, const OpOptions& opt = {});
SpectralResult free_power(const ReciprocalTransform& F, double p, const OpOptions& opt = {});
SpectralResult boolean_power(const Measure& mu, double q, const OpOptions& opt = {});
SpectralResult bpq(const Measure& mu, const BpqParams& params, const OpOptions& opt = {});
SpectralResult bpq(const ReciprocalTransform& F, const BpqParams& params, const OpOptions& opt = {});
SpectralResult b_t(const Measure& mu, double t, const OpOptions& opt = {});
SpectralResult free_brownian(const Measure& nu, double t, const OpOptions& opt = {});
SpectralResult compound_free_poisson(double lambda, const Measure& nu, const OpOptions& opt = {});
SpectralResult free_power_sub_one(const Measure& mu, double p, const OpOptions& opt = {});

// F of B_{p,q} from F of mu, evaluated through omega_p; composable.
ReciprocalTransform bpq_reciprocal(const ReciprocalTransform& F, const BpqParams& params);
ReciprocalTransform b_t_reciprocal(const ReciprocalTransform& F, double t);
// F of mu_0 in p(lambda, nu) = B_{1+lambda, 1/(1+lambda)*}(mu_0)
ReciprocalTransform poisson_seed(const Measure& nu);
// F of the compound free Poisson law itself
ReciprocalTransform compound_free_poisson_reciprocal(double lambda, const Measure& nu);
// F of nu boxplus gamma_t
ReciprocalTransform free_brownian_reciprocal(const Measure& nu, double t);

cplx phi_bpq(const ReciprocalTransform& F, const BpqParams& params, cplx z);
cplx phi_bpq(const Measure& mu, const BpqParams& params, cplx z);

// nu with E_mu = sigma^2 G_nu, tabulated continuous part plus atoms
Measure phi_map(const Measure& mu, std::size_t grid_n = 2001);

// Back to a Measure (tabulated density plus atoms), renormalized.
Measure to_measure(const SpectralResult& r);

}  // namespace freeconv
