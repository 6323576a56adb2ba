#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freeconv/measure.hpp"
#include "freeconv/subordination.hpp"
#include "freeconv/transforms.hpp"

namespace freeconv {

constexpr double kDivergence = 1e12;
// f_mu must stay below 1/(p-1) by this relative margin to certify an atom.
constexpr double kStrictMargin = 1e-9;

struct FmuLimit {
    double value;
    bool infinite;
};

FmuLimit f_mu_limit(const ReciprocalTransform& F, double x);
FmuLimit f_mu_limit(const Measure& mu, double x);

enum class AtomRegime { FreePower, Boolean, BpqGeneral, BpqSpecial };
std::string regime_name(AtomRegime r);

struct AtomCertificate {
    double boundary_F;     // F_mu at the preimage point
    double f_mu;           // f_mu at the preimage point
    double jc_derivative;  // F'_out at the atom
    AtomRegime regime;
};

struct AtomRecord {
    double position;
    double mass;
    double preimage;  // x with alpha = p' x (or 0 in the special regime)
    AtomCertificate certificate;
};

struct AtomCandidate {
    double preimage;
    double position;
    double f_mu;
    bool f_mu_infinite;
    bool accepted;
    std::string reason;
};

struct AtomScan {
    std::vector<AtomRecord> atoms;
    std::vector<AtomCandidate> candidates;  // everything examined, accepted or not
};

AtomScan scan_atoms(const ReciprocalTransform& F, double p, double q, Interval window,
                    const std::vector<VPlusInterval>* vplus = nullptr);
std::vector<AtomRecord> find_atoms(const ReciprocalTransform& F, double p, double q,
                                   std::optional<Interval> window = std::nullopt);
std::vector<AtomRecord> find_atoms(const Measure& mu, double p, double q,
                                   std::optional<Interval> window = std::nullopt);

struct ComponentCount {
    int count;
    std::vector<VPlusInterval> intervals;
};

ComponentCount component_count(const ReciprocalTransform& F, double p, std::optional<Interval> window = std::nullopt);
ComponentCount component_count(const Measure& mu, double p, std::optional<Interval> window = std::nullopt);

struct ComponentReport {
    std::vector<double> p_values;
    std::vector<int> counts;
    std::vector<std::vector<VPlusInterval>> intervals;
};

ComponentReport monotonicity_report(const ReciprocalTransform& F, const std::vector<double>& p_list,
                                    std::optional<Interval> window = std::nullopt);
ComponentReport monotonicity_report(const Measure& mu, const std::vector<double>& p_list,
                                    std::optional<Interval> window = std::nullopt);

struct BpqParams;

struct InequalityCheck {
    std::string name;
    std::size_t pairs = 0;
    double worst_slack = 0.0;  // min over pairs of (bound - lhs); >= 0 means pass
};

struct InfdivReport {
    std::vector<InequalityCheck> checks;
    bool passed = true;
};

InfdivReport infdiv_diagnostics(const Measure& mu, const BpqParams& params, std::size_t sample_n,
                                std::uint64_t seed = 20240601);

}  // namespace freeconv
