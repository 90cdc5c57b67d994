#include "detcal/homodyne.hpp"

#include <cmath>
#include <vector>

#include "detcal/discrete.hpp"

namespace detcal {

namespace {

constexpr double kPiQuarterRootInv = 0.7511255444649425;  // pi^(-1/4)

void check_order(int m) {
    if (m < 0)
        throw DomainError("hermite_psi: order must be >= 0");
    if (m > kHermiteOrderCap)
        throw DomainError("hermite_psi: order above cap " +
                          std::to_string(kHermiteOrderCap));
}

// shared integration drive: p(q) and dp(q) from weights over psi_m^2
struct LossMixtureDensity {
    int n;
    std::vector<double> w, dw;
    mutable std::vector<double> psi;

    LossMixtureDensity(int n_, double eta) : n(n_), w(n_ + 1), dw(n_ + 1), psi(n_ + 1) {
        loss_weights(n, eta, w, dw);
    }

    void eval(double q, double& p, double& dp) const {
        hermite_psi_all(n, q, psi);
        p = 0.0;
        dp = 0.0;
        for (int m = 0; m <= n; ++m) {
            const double sq = psi[m] * psi[m];
            p += w[m] * sq;
            dp += dw[m] * sq;
        }
    }
};

FisherResult fisher_from_even_integrand(const std::function<void(double, double&, double&)>& eval,
                                        double q_max, const QuadratureGrid& grid) {
    const auto integrand = [&](double q) {
        double p, dp;
        eval(q, p, dp);
        if (p < kProbabilityFloor) return 0.0;
        return dp * dp / p;
    };
    // even in q: integrate the half line and double
    const auto half = integrate_adaptive(integrand, 0.0, q_max, 0.5 * grid.abs_tol,
                                         grid.rel_tol, grid.max_subdivisions);
    return FisherResult::finite(2.0 * half.value, FisherMethod::Quadrature,
                                2.0 * half.error);
}

}  // namespace

double default_q_max(int n) {
    return std::sqrt(2.0 * n + 1.0) + 10.0;
}

void hermite_psi_all(int m, double q, std::span<double> out) {
    check_order(m);
    if (out.size() < static_cast<std::size_t>(m) + 1)
        throw DomainError("hermite_psi_all: output span too small");
    out[0] = kPiQuarterRootInv * std::exp(-0.5 * q * q);
    if (m == 0) return;
    out[1] = std::sqrt(2.0) * q * out[0];
    for (int k = 2; k <= m; ++k)
        out[k] = std::sqrt(2.0 / k) * q * out[k - 1] -
                 std::sqrt((k - 1.0) / k) * out[k - 2];
}

double hermite_psi(int m, double q) {
    check_order(m);
    std::vector<double> buf(m + 1);
    hermite_psi_all(m, q, buf);
    return buf[m];
}

void loss_weights(int n, double eta, std::span<double> w, std::span<double> dw) {
    if (n < 0)
        throw DomainError("loss_weights: photon number must be >= 0");
    if (w.size() < static_cast<std::size_t>(n) + 1 ||
        dw.size() < static_cast<std::size_t>(n) + 1)
        throw DomainError("loss_weights: spans too small");
    for (int m = 0; m <= n; ++m) {
        w[m] = binomial_pmf(n, m, eta);
        dw[m] = binomial_pmf_deta(n, m, eta);
    }
}

double pdf_fock_lossy(int n, Efficiency eta, double q) {
    check_order(n);
    LossMixtureDensity d(n, eta.value());
    double p, dp;
    d.eval(q, p, dp);
    return p;
}

double pdf_fock_lossy_deta(int n, Efficiency eta, double q) {
    check_order(n);
    LossMixtureDensity d(n, eta.value());
    double p, dp;
    d.eval(q, p, dp);
    return dp;
}

double pdf_coherent_lossy(double alpha, Efficiency eta, double q) {
    if (!(alpha >= 0.0))
        throw DomainError("pdf_coherent_lossy: amplitude must be >= 0");
    const double mean = std::sqrt(2.0 * eta.value()) * alpha;
    const double u = q - mean;
    return std::exp(-u * u) / std::sqrt(M_PI);
}

double pdf_coherent_lossy_deta(double alpha, Efficiency eta, double q) {
    const double e = eta.value();
    if (e == 0.0)
        throw DomainError("pdf_coherent_lossy_deta: derivative is singular at eta = 0");
    const double mean = std::sqrt(2.0 * e) * alpha;
    const double u = q - mean;
    // d(mean)/d(eta) = alpha / sqrt(2 eta)
    return pdf_coherent_lossy(alpha, eta, q) * 2.0 * u * alpha / std::sqrt(2.0 * e);
}

double pdf_heralded_lossy(double xi, Efficiency eta, double q) {
    if (!(xi >= 0.0 && xi <= 1.0))
        throw DomainError("pdf_heralded_lossy: heralding efficiency must lie in [0, 1]");
    const double p1 = xi * eta.value();
    const double psi0 = kPiQuarterRootInv * std::exp(-0.5 * q * q);
    const double psi1 = std::sqrt(2.0) * q * psi0;
    return p1 * psi1 * psi1 + (1.0 - p1) * psi0 * psi0;
}

double pdf_heralded_lossy_deta(double xi, Efficiency eta, double q) {
    if (!(xi >= 0.0 && xi <= 1.0))
        throw DomainError("pdf_heralded_lossy_deta: heralding efficiency must lie in [0, 1]");
    (void)eta;
    const double psi0 = kPiQuarterRootInv * std::exp(-0.5 * q * q);
    const double psi1 = std::sqrt(2.0) * q * psi0;
    return xi * (psi1 * psi1 - psi0 * psi0);
}

FisherResult fisher_homodyne_fock(int n, Efficiency eta, QuadratureGrid grid) {
    check_order(n);
    if (n == 0)
        return FisherResult::finite(0.0, FisherMethod::Quadrature);
    const double e = eta.value();
    if (e > kHomodyneEtaCap)
        return FisherResult::diverged(FisherMethod::Quadrature);
    const double q_max = grid.q_max > 0.0 ? grid.q_max : default_q_max(n);
    LossMixtureDensity d(n, e);
    return fisher_from_even_integrand(
        [&](double q, double& p, double& dp) { d.eval(q, p, dp); }, q_max, grid);
}

FisherResult fisher_homodyne_coherent(double alpha, Efficiency eta) {
    if (!(alpha > 0.0))
        throw DomainError("fisher_homodyne_coherent: amplitude must be > 0");
    const double e = eta.value();
    if (e == 0.0)
        return FisherResult::diverged(FisherMethod::ClosedForm);
    return FisherResult::finite(alpha * alpha / e, FisherMethod::ClosedForm);
}

FisherResult fisher_homodyne_coherent_quadrature(double alpha, Efficiency eta,
                                                 QuadratureGrid grid) {
    if (!(alpha > 0.0))
        throw DomainError("fisher_homodyne_coherent_quadrature: amplitude must be > 0");
    const double e = eta.value();
    if (e == 0.0)
        return FisherResult::diverged(FisherMethod::Quadrature);
    const double mean = std::sqrt(2.0 * e) * alpha;
    const double reach = grid.q_max > 0.0 ? grid.q_max : default_q_max(0);
    const auto integrand = [&](double q) {
        const double p = pdf_coherent_lossy(alpha, eta, q);
        if (p < kProbabilityFloor) return 0.0;
        const double dp = pdf_coherent_lossy_deta(alpha, eta, q);
        return dp * dp / p;
    };
    const auto r = integrate_adaptive(integrand, mean - reach, mean + reach,
                                      grid.abs_tol, grid.rel_tol,
                                      grid.max_subdivisions);
    return FisherResult::finite(r.value, FisherMethod::Quadrature, r.error);
}

FisherResult fisher_homodyne_heralded(double xi, Efficiency eta, QuadratureGrid grid) {
    if (!(xi >= 0.0 && xi <= 1.0))
        throw DomainError("fisher_homodyne_heralded: heralding efficiency must lie in [0, 1]");
    if (xi == 0.0)
        return FisherResult::finite(0.0, FisherMethod::Quadrature);
    const double e = eta.value();
    if (xi * e > kHomodyneEtaCap)
        return FisherResult::diverged(FisherMethod::Quadrature);
    const double q_max = grid.q_max > 0.0 ? grid.q_max : default_q_max(1);
    return fisher_from_even_integrand(
        [&](double q, double& p, double& dp) {
            p = pdf_heralded_lossy(xi, eta, q);
            dp = pdf_heralded_lossy_deta(xi, eta, q);
        },
        q_max, grid);
}

}  // namespace detcal
