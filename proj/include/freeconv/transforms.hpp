#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "freeconv/measure.hpp"

namespace freeconv {

// Public evaluation on the closed upper half-plane.  A real argument means the
// boundary value from above; it is refused at atoms and inside tabulated supports.
cplx eval_G(const Measure& mu, cplx z);
cplx eval_F(const Measure& mu, cplx z);
cplx eval_E(const Measure& mu, cplx z);

struct CauchyValue {
    cplx g;   // G(z)
    cplx dg;  // G'(z)
};

// Unchecked kernel: may return infinities at atoms; used by the analytic engine.
CauchyValue cauchy_kernel(const Measure& mu, cplx z);

struct FValue {
    cplx f;   // F(z)
    cplx df;  // F'(z)
};

// A probability measure seen through its reciprocal Cauchy transform F = 1/G.
// Evaluation at a real point returns the boundary value from above; at a
// real zero of G the value is flagged non-finite (infinite real part).
class ReciprocalTransform {
public:
    using Evaluator = std::function<FValue(cplx)>;

    ReciprocalTransform(Evaluator eval, Interval support_hint, double variance_hint,
                        std::string label);

    FValue eval(cplx z) const { return eval_(z); }
    cplx operator()(cplx z) const { return eval_(z).f; }

    // Bounded interval containing the support (may be loose).
    const Interval& support_hint() const { return hint_; }
    double variance_hint() const { return variance_; }
    const std::string& label() const { return label_; }

    // When known, the continuous part lives in these intervals.
    const std::optional<std::vector<Interval>>& ac_support() const { return ac_support_; }
    void set_ac_support(std::vector<Interval> s) { ac_support_ = std::move(s); }

    // Atom positions when known; atoms embedded in the continuous part are
    // otherwise invisible to grid scans.
    const std::optional<std::vector<double>>& atom_positions() const { return atoms_; }
    void set_atom_positions(std::vector<double> a) { atoms_ = std::move(a); }
    // Set for a point mass delta_a (F(z) = z - a).
    const std::optional<double>& point_mass() const { return point_mass_; }
    void set_point_mass(double a) { point_mass_ = a; }

private:
    Evaluator eval_;
    Interval hint_;
    double variance_;
    std::string label_;
    std::optional<std::vector<Interval>> ac_support_;
    std::optional<double> point_mass_;
    std::optional<std::vector<double>> atoms_;
};

ReciprocalTransform reciprocal(const Measure& mu);

// F(z) = z - a
ReciprocalTransform shift_transform(double a);

// Reciprocal transform of mu^{boolean q}: q F + (1 - q) z.
ReciprocalTransform boolean_reciprocal(const ReciprocalTransform& F, double q);

bool finite(cplx z);

}  // namespace freeconv
