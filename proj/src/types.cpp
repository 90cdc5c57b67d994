#include "detcal/types.hpp"

#include <cmath>
#include <limits>

namespace detcal {

std::string method_name(FisherMethod m) {
    switch (m) {
        case FisherMethod::ClosedForm: return "closed_form";
        case FisherMethod::Quadrature: return "quadrature";
        case FisherMethod::FiniteDifference: return "finite_difference";
    }
    throw DomainError("method_name: unknown method");
}

FisherResult FisherResult::finite(double value, FisherMethod method,
                                  double error_estimate) {
    if (!std::isfinite(value))
        return diverged(method);
    return FisherResult{value, method, error_estimate, false};
}

FisherResult FisherResult::diverged(FisherMethod method) {
    return FisherResult{std::numeric_limits<double>::infinity(), method, 0.0, true};
}

Efficiency::Efficiency(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw DomainError("efficiency must lie in [0, 1], got " + std::to_string(value));
}

DarkCount::DarkCount(double delta) : delta_(delta) {
    if (!(delta >= 0.0))
        throw DomainError("dark-count exponent must be >= 0, got " + std::to_string(delta));
}

void validate(const ProbeState& probe) {
    struct Visitor {
        void operator()(const Fock& f) const {
            if (f.n < 0) throw DomainError("fock photon number must be >= 0");
        }
        void operator()(const Coherent& c) const {
            if (!(c.mean_photons >= 0.0) || !std::isfinite(c.mean_photons))
                throw DomainError("coherent mean photon number must be >= 0 and finite");
        }
        void operator()(const HeraldedSinglePhoton& h) const {
            if (!(h.xi >= 0.0 && h.xi <= 1.0))
                throw DomainError("heralding efficiency must lie in [0, 1]");
        }
        void operator()(const FockMixture& m) const {
            if (m.weights.empty())
                throw DomainError("fock mixture must have at least one component");
            double total = 0.0;
            for (const auto& [j, w] : m.weights) {
                if (j < 0) throw DomainError("fock mixture photon numbers must be >= 0");
                if (!(w >= 0.0)) throw DomainError("fock mixture weights must be >= 0");
                total += w;
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw DomainError("fock mixture weights must sum to 1 within 1e-12, got " +
                                  std::to_string(total));
        }
    };
    std::visit(Visitor{}, probe);
}

double mean_photon_number(const ProbeState& probe) {
    struct Visitor {
        double operator()(const Fock& f) const { return static_cast<double>(f.n); }
        double operator()(const Coherent& c) const { return c.mean_photons; }
        double operator()(const HeraldedSinglePhoton& h) const { return h.xi; }
        double operator()(const FockMixture& m) const {
            double nbar = 0.0;
            for (const auto& [j, w] : m.weights) nbar += w * j;
            return nbar;
        }
    };
    return std::visit(Visitor{}, probe);
}

OutcomeDistribution::OutcomeDistribution(std::vector<double> probabilities,
                                         std::vector<double> derivatives)
    : p_(std::move(probabilities)), dp_(std::move(derivatives)) {
    if (p_.empty() || p_.size() != dp_.size())
        throw DomainError("outcome distribution needs matching, non-empty p and dp");
    double psum = 0.0;
    double dsum = 0.0;
    for (std::size_t k = 0; k < p_.size(); ++k) {
        if (!(p_[k] >= 0.0))
            throw DomainError("outcome probabilities must be >= 0");
        if (p_[k] < kProbabilityFloor) p_[k] = 0.0;
        psum += p_[k];
        dsum += dp_[k];
    }
    if (std::abs(psum - 1.0) > 1e-12)
        throw DomainError("outcome probabilities must sum to 1 within 1e-12, got " +
                          std::to_string(psum));
    if (std::abs(dsum) > 1e-10)
        throw DomainError("outcome probability derivatives must sum to 0 within 1e-10");
}

FisherResult discrete_fisher(const OutcomeDistribution& dist) {
    double total = 0.0;
    const auto& p = dist.probabilities();
    const auto& dp = dist.derivatives();
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) {
            if (dp[k] == 0.0) continue;  // outcome never occurs, carries nothing
            return FisherResult::diverged(FisherMethod::ClosedForm);
        }
        total += dp[k] * dp[k] / p[k];
    }
    return FisherResult::finite(total, FisherMethod::ClosedForm);
}

double crb_variance(const FisherResult& fisher, std::int64_t repetitions) {
    if (repetitions < 1)
        throw DomainError("crb_variance: repetitions must be >= 1");
    if (fisher.divergent)
        return 0.0;
    if (fisher.value == 0.0)
        throw ZeroInformation("crb_variance: Fisher information is zero, no bound");
    if (!(fisher.value > 0.0))
        throw DomainError("crb_variance: Fisher information must be >= 0");
    return 1.0 / (static_cast<double>(repetitions) * fisher.value);
}

}  // namespace detcal
