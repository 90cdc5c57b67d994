#pragma once

#include <cstdint>
#include <vector>

#include "detcal/types.hpp"

// Shot-level simulation of calibration experiments, maximum-likelihood
// estimation of eta, and empirical validation of the Cramer-Rao bound.

namespace detcal {

/// Counter-based pseudorandom generator: output i is a 64-bit mix of
/// (stream key + i * gamma), so streams indexed by (seed, stream) are
/// independent and reproducible regardless of evaluation order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    /// uniform on [0, 1) with 53-bit resolution
    double next_unit();
    /// uniform on (0, 1]
    double next_unit_positive();
    /// standard normal via Box-Muller (pairs cached)
    double next_gaussian();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_gaussian_ = 0.0;
    bool has_cached_ = false;
};

/// Draws from psi_m(q)^2 by rejection from a Gaussian envelope of variance
/// (m+1)/2; the envelope constant is maximized numerically once per order.
class HermiteSampler {
public:
    explicit HermiteSampler(int order);

    double sample(CounterRng& rng) const;
    /// expected acceptance probability, 1 / envelope constant
    double acceptance() const { return 1.0 / envelope_constant_; }
    int order() const { return order_; }

private:
    int order_;
    double sigma_;
    double envelope_constant_;
};

struct EstimationRun {
    ProbeState probe;
    DetectorModel detector;
    double eta_true = 0.5;
    std::int64_t trials = 1;       // M outcomes per replicate
    std::uint64_t seed = 0;
    int replicates = 1;            // R independent repetitions of the campaign
};

/// Outcomes of one replicate: counts per detector outcome for discrete
/// detectors, or quadrature samples for homodyne.
struct OutcomeData {
    std::vector<std::int64_t> counts;
    std::vector<double> samples;
};

OutcomeData simulate_outcomes(const EstimationRun& run, int replicate_index = 0);

/// Maximum-likelihood estimate of eta. On/off data invert the no-click
/// fraction in closed form (Fock, coherent, heralded) or by monotone
/// bisection (mixtures); K-outcome and homodyne data maximize the
/// log-likelihood by golden-section search on (0, 1) to 1e-8. Estimates
/// pushed onto the boundary of [0, 1] are flagged instead of clamped.
struct MleResult {
    double value = 0.0;
    bool boundary = false;
};

MleResult mle_estimate(const OutcomeData& data, const ProbeState& probe,
                       const DetectorModel& detector);

struct EstimationResult {
    std::vector<double> estimates;  // per replicate, boundary replicates excluded
    int boundary_count = 0;
    double empirical_variance = 0.0;
    double crb = 0.0;               // 1 / (M F(eta_true))
    double variance_ratio = 0.0;    // empirical_variance / crb
    double bias = 0.0;              // mean estimate - eta_true
    bool bound_respected = false;   // variance_ratio >= 1 - 3/sqrt(R)
};

/// Runs R replicates of M trials each (replicates in parallel, one RNG
/// stream per replicate) and compares the estimator variance against the
/// Cramer-Rao bound at eta_true.
EstimationResult validate_crb(const EstimationRun& run, unsigned threads = 0);

}  // namespace detcal
