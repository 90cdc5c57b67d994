#pragma once

#include <span>

#include "detcal/quadrature.hpp"
#include "detcal/types.hpp"

// Quadrature-amplitude distributions of lossy probes and their Fisher
// information, in the vacuum-variance-1/2 convention: the Fock-state
// wavefunctions are the L2-normalized Hermite functions psi_m.

namespace detcal {

/// Orders above this are rejected; the recurrence itself stays O(1) per
/// order but the quadrature ranges and loss mixtures are untested beyond it.
inline constexpr int kHermiteOrderCap = 200;

/// Numeric homodyne Fisher integrals are evaluated only for
/// eta <= 1 - 1e-6: at eta = 1 the integrand is non-integrable at the nodes
/// of psi_n and the divergence sentinel is returned instead.
inline constexpr double kHomodyneEtaCap = 1.0 - 1e-6;

/// psi_m(q), the m-th L2-normalized Hermite function, evaluated by the
/// stable three-term recurrence
///   psi_0 = pi^(-1/4) exp(-q^2/2),  psi_1 = sqrt(2) q psi_0,
///   psi_m = sqrt(2/m) q psi_{m-1} - sqrt((m-1)/m) psi_{m-2}.
double hermite_psi(int m, double q);

/// Fills out[0..m] with psi_0(q) .. psi_m(q) in one recurrence pass.
void hermite_psi_all(int m, double q, std::span<double> out);

/// Binomial loss weights w_m = C(n,m) eta^m (1-eta)^(n-m) and their
/// analytic eta-derivatives; spans must hold n+1 entries.
void loss_weights(int n, double eta, std::span<double> w, std::span<double> dw);

double default_q_max(int n);  // sqrt(2n+1) + 10

/// Quadrature density of the Fock state |n> after loss eta:
/// sum_m w_m(eta) psi_m(q)^2.
double pdf_fock_lossy(int n, Efficiency eta, double q);
double pdf_fock_lossy_deta(int n, Efficiency eta, double q);

/// Gaussian density exp(-(q - sqrt(2 eta) alpha)^2) / sqrt(pi).
double pdf_coherent_lossy(double alpha, Efficiency eta, double q);
double pdf_coherent_lossy_deta(double alpha, Efficiency eta, double q);

/// Density of xi |1><1| + (1-xi) |0><0| after loss:
/// xi eta psi_1^2 + (1 - xi eta) psi_0^2.
double pdf_heralded_lossy(double xi, Efficiency eta, double q);
double pdf_heralded_lossy_deta(double xi, Efficiency eta, double q);

/// Fisher integral int (d_eta p)^2 / p dq by adaptive quadrature; the
/// derivative in the numerator is analytic, never finite-differenced.
FisherResult fisher_homodyne_fock(int n, Efficiency eta, QuadratureGrid grid = {});

/// Closed form alpha^2 / eta.
FisherResult fisher_homodyne_coherent(double alpha, Efficiency eta);

/// Same quantity through the quadrature pipeline, kept as an independent
/// cross-check of the closed form.
FisherResult fisher_homodyne_coherent_quadrature(double alpha, Efficiency eta,
                                                 QuadratureGrid grid = {});

FisherResult fisher_homodyne_heralded(double xi, Efficiency eta,
                                      QuadratureGrid grid = {});

}  // namespace detcal
