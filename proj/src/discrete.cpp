#include "detcal/discrete.hpp"

#include <cmath>

namespace detcal {

namespace {

// exact up to n = 60; C(60,30) ~ 1.18e17 still holds 1 ulp accuracy in the
// multiplicative form, larger n switches to lgamma
double binomial_coefficient(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (n > 60) return std::exp(log_binomial(n, k));
    double c = 1.0;
    k = std::min(k, n - k);
    for (int i = 1; i <= k; ++i)
        c = c * (n - k + i) / i;
    return c;
}

}  // namespace

double log_binomial(int n, int k) {
    if (k < 0 || k > n)
        throw DomainError("log_binomial: k outside [0, n]");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial_pmf(int n, int k, double eta) {
    if (k < 0 || k > n) return 0.0;
    if (n > 60) {
        if (eta == 0.0) return k == 0 ? 1.0 : 0.0;
        if (eta == 1.0) return k == n ? 1.0 : 0.0;
        return std::exp(log_binomial(n, k) + k * std::log(eta) +
                        (n - k) * std::log1p(-eta));
    }
    return binomial_coefficient(n, k) * std::pow(eta, k) * std::pow(1.0 - eta, n - k);
}

double binomial_pmf_deta(int n, int k, double eta) {
    if (k < 0 || k > n) return 0.0;
    if (n == 0) return 0.0;
    if (k == 0) return -n * std::pow(1.0 - eta, n - 1);
    if (k == n) return n * std::pow(eta, n - 1);
    return binomial_coefficient(n, k) * std::pow(eta, k - 1) *
           std::pow(1.0 - eta, n - k - 1) * (k - n * eta);
}

VacuumProjection vacuum_projection(const ProbeState& probe, Efficiency eta) {
    validate(probe);
    const double e = eta.value();
    struct Visitor {
        double e;
        VacuumProjection operator()(const Fock& f) const {
            if (f.n == 0) return {1.0, 0.0};
            return {std::pow(1.0 - e, f.n), -f.n * std::pow(1.0 - e, f.n - 1)};
        }
        VacuumProjection operator()(const Coherent& c) const {
            const double q = std::exp(-e * c.mean_photons);
            return {q, -c.mean_photons * q};
        }
        VacuumProjection operator()(const HeraldedSinglePhoton& h) const {
            return {1.0 - h.xi * e, -h.xi};
        }
        VacuumProjection operator()(const FockMixture& m) const {
            double q = 0.0, dq = 0.0;
            for (const auto& [j, w] : m.weights) {
                q += w * std::pow(1.0 - e, j);
                if (j > 0) dq -= w * j * std::pow(1.0 - e, j - 1);
            }
            return {q, dq};
        }
    };
    return std::visit(Visitor{e}, probe);
}

OnOffOutcome onoff_no_click(const ProbeState& probe, Efficiency eta, DarkCount delta) {
    const auto vac = vacuum_projection(probe, eta);
    const double damp = std::exp(-delta.value());
    return {damp * vac.value, damp * vac.derivative};
}

OutcomeDistribution onoff_distribution(const ProbeState& probe, Efficiency eta,
                                       DarkCount delta) {
    const auto off = onoff_no_click(probe, eta, delta);
    return OutcomeDistribution({off.p_off, 1.0 - off.p_off},
                               {off.dp_off, -off.dp_off});
}

FisherResult fisher_onoff_fock(int n, Efficiency eta, DarkCount delta) {
    if (n < 1)
        throw DomainError("fisher_onoff_fock: photon number must be >= 1");
    const double e = eta.value();
    const double d = delta.value();
    if (n == 1 && e == 1.0)
        return FisherResult::diverged(FisherMethod::ClosedForm);
    if (e == 0.0 && d == 0.0)
        return FisherResult::diverged(FisherMethod::ClosedForm);
    const double q = 1.0 - e;
    const double value = double(n) * double(n) * std::pow(q, n - 2) /
                         (std::exp(d) - std::pow(q, n));
    return FisherResult::finite(value, FisherMethod::ClosedForm);
}

FisherResult fisher_onoff_coherent(double mean_photons, Efficiency eta,
                                   DarkCount delta) {
    if (!(mean_photons > 0.0))
        throw DomainError("fisher_onoff_coherent: mean photon number must be > 0");
    const double x = delta.value() + eta.value() * mean_photons;
    if (x == 0.0)
        return FisherResult::diverged(FisherMethod::ClosedForm);
    return FisherResult::finite(mean_photons * mean_photons / std::expm1(x),
                                FisherMethod::ClosedForm);
}

FisherResult fisher_onoff_heralded(double xi, Efficiency eta, DarkCount delta) {
    if (!(xi >= 0.0 && xi <= 1.0))
        throw DomainError("fisher_onoff_heralded: heralding efficiency must lie in [0, 1]");
    return discrete_fisher(onoff_distribution(HeraldedSinglePhoton{xi}, eta, delta));
}

FisherResult fisher_onoff_mixture(const FockMixture& mixture, Efficiency eta,
                                  DarkCount delta) {
    return discrete_fisher(onoff_distribution(mixture, eta, delta));
}

FisherResult fisher_onoff_small_eta(const ProbeState& probe, Efficiency eta,
                                    DarkCount delta) {
    const double e = eta.value();
    const double d = delta.value();
    if (const auto* f = std::get_if<Fock>(&probe)) {
        if (f->n < 1)
            throw DomainError("fisher_onoff_small_eta: photon number must be >= 1");
        const double denom = e + std::expm1(d) / f->n;
        if (denom == 0.0) return FisherResult::diverged(FisherMethod::ClosedForm);
        return FisherResult::finite(f->n / denom, FisherMethod::ClosedForm);
    }
    if (const auto* c = std::get_if<Coherent>(&probe)) {
        if (!(c->mean_photons > 0.0))
            throw DomainError("fisher_onoff_small_eta: mean photon number must be > 0");
        const double denom = std::exp(d) * e + std::expm1(d) / c->mean_photons;
        if (denom == 0.0) return FisherResult::diverged(FisherMethod::ClosedForm);
        return FisherResult::finite(c->mean_photons / denom, FisherMethod::ClosedForm);
    }
    throw DomainError("fisher_onoff_small_eta: only Fock and coherent probes supported");
}

OutcomeDistribution koutcome_distribution(int n, int outcomes, Efficiency eta) {
    if (outcomes < 2)
        throw DomainError("koutcome_distribution: need at least 2 outcomes");
    if (n < 0)
        throw DomainError("koutcome_distribution: photon number must be >= 0");
    const double e = eta.value();
    std::vector<double> p(outcomes, 0.0);
    std::vector<double> dp(outcomes, 0.0);
    double psum = 0.0, dsum = 0.0;
    for (int k = 0; k <= outcomes - 2; ++k) {
        p[k] = binomial_pmf(n, k, e);
        dp[k] = binomial_pmf_deta(n, k, e);
        psum += p[k];
        dsum += dp[k];
    }
    if (n <= outcomes - 2) {
        // full resolution: the overflow outcome never fires; absorb rounding
        // residue into the most probable outcome so the pmf sums to 1 exactly
        p[outcomes - 1] = 0.0;
        dp[outcomes - 1] = 0.0;
        int kbig = 0;
        for (int k = 1; k <= n; ++k)
            if (p[k] > p[kbig]) kbig = k;
        p[kbig] += 1.0 - psum;
        dp[kbig] -= dsum;
    } else {
        // sum the tail directly rather than via 1 - head, which cancels
        // catastrophically when the overflow mass is tiny
        double pov = 0.0, dov = 0.0;
        for (int k = outcomes - 1; k <= n; ++k) {
            pov += binomial_pmf(n, k, e);
            dov += binomial_pmf_deta(n, k, e);
        }
        p[outcomes - 1] = pov;
        dp[outcomes - 1] = dov;
        // keep the pmf summing to 1 exactly without disturbing a tiny tail
        int kbig = 0;
        for (int k = 1; k <= outcomes - 1; ++k)
            if (p[k] > p[kbig]) kbig = k;
        p[kbig] += 1.0 - psum - pov;
        dp[kbig] -= dsum + dov;
    }
    return OutcomeDistribution(std::move(p), std::move(dp));
}

FisherResult fisher_koutcome_fock(int n, int outcomes, Efficiency eta) {
    if (outcomes < 2)
        throw DomainError("fisher_koutcome_fock: need at least 2 outcomes");
    if (n < 0)
        throw DomainError("fisher_koutcome_fock: photon number must be >= 0");
    const double e = eta.value();
    if (e == 0.0 || e == 1.0)
        return discrete_fisher(koutcome_distribution(n, outcomes, eta));

    double total = 0.0;
    const int kmax = std::min(outcomes - 2, n);
    for (int k = 0; k <= kmax; ++k) {
        const double diff = k - n * e;
        total += binomial_coefficient(n, k) * std::pow(1.0 - e, n - k - 2) *
                 std::pow(e, k - 2) * diff * diff;
    }
    if (n > outcomes - 2) {
        double pov = 0.0, dov = 0.0;
        for (int k = outcomes - 1; k <= n; ++k) {
            pov += binomial_pmf(n, k, e);
            dov += binomial_pmf_deta(n, k, e);
        }
        if (pov > kProbabilityFloor) {
            total += dov * dov / pov;
        } else if (dov != 0.0) {
            return FisherResult::diverged(FisherMethod::ClosedForm);
        }
    }
    return FisherResult::finite(total, FisherMethod::ClosedForm);
}

double koutcome_claimed_closed_form(int outcomes, Efficiency eta) {
    if (outcomes < 2)
        throw DomainError("koutcome_claimed_closed_form: need at least 2 outcomes");
    const double e = eta.value();
    if (e == 0.0 || e == 1.0)
        throw DomainError("koutcome_claimed_closed_form: eta must lie strictly inside (0, 1)");
    return (outcomes - 1) / (e * (1.0 - e));
}

}  // namespace detcal
