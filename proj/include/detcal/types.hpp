#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Core domain types for detector-efficiency estimation: probe states,
// detector models, outcome distributions and Fisher-information results.
// Everything here is an immutable value; all free functions are pure.

namespace detcal {

// ---- error taxonomy ----------------------------------------------------

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ZeroInformation : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnergyMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoThreshold : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Probabilities below this are clamped to exact zero before entering any
// (dp)^2/p ratio, so near-underflow outcomes follow the singular-outcome
// rule instead of overflowing.
inline constexpr double kProbabilityFloor = 1e-300;

// ---- Fisher results -----------------------------------------------------

enum class FisherMethod { ClosedForm, Quadrature, FiniteDifference };

std::string method_name(FisherMethod m);

/// Fisher information about the efficiency, in units of 1/eta^2.
/// A divergent result is a representable sentinel (value = +inf), not an
/// exception: comparisons and root finders need to handle it inline.
struct FisherResult {
    double value = 0.0;
    FisherMethod method = FisherMethod::ClosedForm;
    double error_estimate = 0.0;
    bool divergent = false;

    static FisherResult finite(double value, FisherMethod method,
                               double error_estimate = 0.0);
    static FisherResult diverged(FisherMethod method = FisherMethod::ClosedForm);
};

// ---- validated scalars --------------------------------------------------

/// Detector efficiency eta, validated to [0, 1] at construction.
class Efficiency {
public:
    explicit Efficiency(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Dark-count exponent delta >= 0: the no-click probability on vacuum input
/// is reduced by e^{-delta}. delta = 0 is a noiseless detector.
class DarkCount {
public:
    DarkCount() = default;
    explicit DarkCount(double delta);
    double value() const noexcept { return delta_; }

private:
    double delta_ = 0.0;
};

// ---- probe states ---------------------------------------------------------

struct Fock {
    int n = 1;  // photon number, >= 0
};

struct Coherent {
    double mean_photons = 1.0;  // |alpha|^2, with alpha real and in phase with the LO
};

struct HeraldedSinglePhoton {
    double xi = 1.0;  // heralding efficiency in [0, 1]
};

/// Statistical mixture of Fock states: list of (photon number, weight).
/// Weights must be non-negative and sum to 1 within 1e-12.
struct FockMixture {
    std::vector<std::pair<int, double>> weights;
};

using ProbeState = std::variant<Fock, Coherent, HeraldedSinglePhoton, FockMixture>;

/// Throws DomainError if the probe parameters violate their invariants.
void validate(const ProbeState& probe);

double mean_photon_number(const ProbeState& probe);

// ---- detector models ------------------------------------------------------

struct OnOff {
    DarkCount delta{};
};

/// Detector resolving photon numbers 0..outcomes-2 exactly, with one
/// overflow outcome for anything higher. outcomes = 2 is the on/off
/// detector without dark counts.
struct KOutcome {
    int outcomes = 2;
};

/// Integration controls for the homodyne Fisher integrals. q_max <= 0 means
/// "derive from the probe": sqrt(2n+1) + 10 for photon number n.
struct QuadratureGrid {
    double q_max = 0.0;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
};

struct Homodyne {
    QuadratureGrid grid{};
};

using DetectorModel = std::variant<OnOff, KOutcome, Homodyne>;

// ---- discrete outcome distributions ----------------------------------------

/// A pmf over detector outcomes together with its analytic eta-derivative.
/// Construction validates: sizes match, p_k >= 0, sum p = 1 within 1e-12,
/// sum dp = 0 within 1e-10. Probabilities below kProbabilityFloor are
/// clamped to exact zero.
class OutcomeDistribution {
public:
    OutcomeDistribution(std::vector<double> probabilities,
                        std::vector<double> derivatives);

    const std::vector<double>& probabilities() const noexcept { return p_; }
    const std::vector<double>& derivatives() const noexcept { return dp_; }
    std::size_t size() const noexcept { return p_.size(); }

private:
    std::vector<double> p_;
    std::vector<double> dp_;
};

/// F = sum_k (dp_k)^2 / p_k. Terms with p_k = 0 and dp_k = 0 carry no
/// information and are skipped; p_k = 0 with dp_k != 0 makes the Fisher
/// information divergent and yields the divergence sentinel.
FisherResult discrete_fisher(const OutcomeDistribution& dist);

/// Cramer-Rao lower bound on the variance of any unbiased estimator of eta
/// after `repetitions` independent uses: 1 / (M * F). Throws ZeroInformation
/// for F = 0; a divergent F gives a bound of 0.
double crb_variance(const FisherResult& fisher, std::int64_t repetitions);

}  // namespace detcal
