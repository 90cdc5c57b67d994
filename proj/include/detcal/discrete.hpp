#pragma once

#include "detcal/types.hpp"

// Fisher information of on/off (Geiger-mode) and K-outcome photon counters.
// The on/off closed forms:
//   Fock |n>:      F = n^2 (1-eta)^(n-2) / (e^delta - (1-eta)^n)
//   coherent:      F = nbar^2 / (e^(delta + eta*nbar) - 1)
// and the K-outcome detector sums (dp_k)^2/p_k over the resolved binomial
// outcomes plus one overflow outcome.

namespace detcal {

/// Probability that the probe projects onto vacuum after transmission eta,
/// with its analytic eta-derivative. This is the no-click probability of a
/// noiseless on/off detector.
struct VacuumProjection {
    double value;
    double derivative;
};

VacuumProjection vacuum_projection(const ProbeState& probe, Efficiency eta);

/// No-click probability p_off = e^{-delta} * vacuum projection.
struct OnOffOutcome {
    double p_off;
    double dp_off;
};

OnOffOutcome onoff_no_click(const ProbeState& probe, Efficiency eta, DarkCount delta);

/// Two-outcome distribution {off, on} with analytic derivatives.
OutcomeDistribution onoff_distribution(const ProbeState& probe, Efficiency eta,
                                       DarkCount delta);

FisherResult fisher_onoff_fock(int n, Efficiency eta, DarkCount delta = {});
FisherResult fisher_onoff_coherent(double mean_photons, Efficiency eta,
                                   DarkCount delta = {});
FisherResult fisher_onoff_heralded(double xi, Efficiency eta, DarkCount delta = {});
FisherResult fisher_onoff_mixture(const FockMixture& mixture, Efficiency eta,
                                  DarkCount delta = {});

/// Truncated low-eta expansion:
///   Fock:     n / (eta + (e^delta - 1)/n)
///   coherent: nbar / (e^delta * eta + (e^delta - 1)/nbar)
/// An approximation intended for eta << 1, not the exact Fisher information.
/// Only Fock and Coherent probes are supported.
FisherResult fisher_onoff_small_eta(const ProbeState& probe, Efficiency eta,
                                    DarkCount delta = {});

/// Outcome distribution of a K-outcome detector fed the Fock state |n>:
/// p_k = C(n,k) eta^k (1-eta)^(n-k) for k <= K-2, plus the overflow
/// complement. `outcomes` is K >= 2.
OutcomeDistribution koutcome_distribution(int n, int outcomes, Efficiency eta);

/// Closed-form K-outcome Fisher information,
///   sum_{k=0}^{K-2} C(n,k) (1-eta)^(n-k-2) eta^(k-2) (k - n eta)^2
///   + (dp_ov)^2 / p_ov,
/// algebraically identical to discrete_fisher(koutcome_distribution(...)).
/// For n <= K-2 the detector fully resolves and the value is n/(eta(1-eta)).
FisherResult fisher_koutcome_fock(int n, int outcomes, Efficiency eta);

/// The simplified reference value (K-1)/(eta(1-eta)). It disagrees with the
/// general multinomial Fisher information (fisher_koutcome_fock(3,3,0.5) is
/// 10.5, this form gives 8.0) and is provided for the documented discrepancy
/// comparison only; never used by the analysis pipelines.
double koutcome_claimed_closed_form(int outcomes, Efficiency eta);

/// log C(n, k), usable for n beyond the exact-double binomial range.
double log_binomial(int n, int k);

/// Binomial pmf C(n,k) eta^k (1-eta)^(n-k), evaluated in log space for
/// n > 60 to avoid overflow.
double binomial_pmf(int n, int k, double eta);

/// d/deta of binomial_pmf, analytic.
double binomial_pmf_deta(int n, int k, double eta);

}  // namespace detcal
