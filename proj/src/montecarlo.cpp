#include "detcal/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "detcal/analysis.hpp"
#include "detcal/discrete.hpp"
#include "detcal/homodyne.hpp"
#include "detcal/parallel.hpp"

namespace detcal {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGamma) ^ mix64(stream * 0xda942042e4dd58b5ULL + 1))) {}

std::uint64_t CounterRng::next_u64() {
    return mix64(key_ + (++counter_) * kGamma);
}

double CounterRng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_unit_positive() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_gaussian_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_unit_positive()));
    const double theta = 2.0 * M_PI * next_unit();
    cached_gaussian_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

HermiteSampler::HermiteSampler(int order) : order_(order) {
    if (order < 0 || order > kHermiteOrderCap)
        throw DomainError("HermiteSampler: order outside [0, cap]");
    sigma_ = std::sqrt((order + 1) / 2.0);
    if (order == 0) {
        envelope_constant_ = 1.0;  // the envelope is the target itself
        return;
    }
    // ratio psi^2 / envelope is smooth with a few maxima; locate the best on
    // a fine grid, refine by golden section, and pad the bound
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * sigma_ * sigma_);
    const auto ratio = [&](double q) {
        const double psi = hermite_psi(order_, q);
        return psi * psi / (norm * std::exp(-0.5 * q * q / (sigma_ * sigma_)));
    };
    const double reach = std::sqrt(2.0 * order + 1.0) + 4.0;
    const int steps = 8000;
    double best_q = 0.0, best = ratio(0.0);
    for (int i = 1; i <= steps; ++i) {
        const double q = reach * i / steps;
        const double r = ratio(q);
        if (r > best) {
            best = r;
            best_q = q;
        }
    }
    const double window = reach / steps;
    const double refined = ratio(golden_section_max(
        ratio, std::max(0.0, best_q - window), best_q + window, 1e-12));
    envelope_constant_ = std::max(best, refined) * 1.01;
}

double HermiteSampler::sample(CounterRng& rng) const {
    if (order_ == 0) return sigma_ * rng.next_gaussian();
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * sigma_ * sigma_);
    for (;;) {
        const double q = sigma_ * rng.next_gaussian();
        const double envelope = envelope_constant_ * norm *
                                std::exp(-0.5 * q * q / (sigma_ * sigma_));
        const double psi = hermite_psi(order_, q);
        if (rng.next_unit() * envelope <= psi * psi) return q;
    }
}

OutcomeData simulate_outcomes(const EstimationRun& run, int replicate_index) {
    validate(run.probe);
    if (run.trials < 1)
        throw DomainError("simulate_outcomes: trials must be >= 1");
    if (replicate_index < 0)
        throw DomainError("simulate_outcomes: replicate index must be >= 0");
    const Efficiency eta(run.eta_true);
    CounterRng rng(run.seed, static_cast<std::uint64_t>(replicate_index));

    if (const auto* onoff = std::get_if<OnOff>(&run.detector)) {
        const auto off = onoff_no_click(run.probe, eta, onoff->delta);
        std::int64_t n_off = 0;
        for (std::int64_t i = 0; i < run.trials; ++i)
            if (rng.next_unit() < off.p_off) ++n_off;
        return {{n_off, run.trials - n_off}, {}};
    }

    if (const auto* kout = std::get_if<KOutcome>(&run.detector)) {
        const auto* fock = std::get_if<Fock>(&run.probe);
        if (!fock)
            throw DomainError("simulate_outcomes: K-outcome detectors take Fock probes");
        const auto dist = koutcome_distribution(fock->n, kout->outcomes, eta);
        const auto& p = dist.probabilities();
        std::vector<std::int64_t> counts(p.size(), 0);
        for (std::int64_t i = 0; i < run.trials; ++i) {
            double u = rng.next_unit();
            std::size_t k = 0;
            for (; k + 1 < p.size(); ++k) {
                if (u < p[k]) break;
                u -= p[k];
            }
            ++counts[k];
        }
        return {std::move(counts), {}};
    }

    // homodyne: pick the surviving component per shot, then draw its quadrature
    std::vector<double> samples;
    samples.reserve(run.trials);
    if (const auto* fock = std::get_if<Fock>(&run.probe)) {
        std::vector<HermiteSampler> component;
        component.reserve(fock->n + 1);
        for (int m = 0; m <= fock->n; ++m) component.emplace_back(m);
        for (std::int64_t i = 0; i < run.trials; ++i) {
            int survivors = 0;
            for (int j = 0; j < fock->n; ++j)
                if (rng.next_unit() < run.eta_true) ++survivors;
            samples.push_back(component[survivors].sample(rng));
        }
    } else if (const auto* c = std::get_if<Coherent>(&run.probe)) {
        const double mean = std::sqrt(2.0 * run.eta_true * c->mean_photons);
        for (std::int64_t i = 0; i < run.trials; ++i)
            samples.push_back(mean + std::sqrt(0.5) * rng.next_gaussian());
    } else if (const auto* h = std::get_if<HeraldedSinglePhoton>(&run.probe)) {
        const HermiteSampler vac(0), one(1);
        const double p1 = h->xi * run.eta_true;
        for (std::int64_t i = 0; i < run.trials; ++i)
            samples.push_back(rng.next_unit() < p1 ? one.sample(rng) : vac.sample(rng));
    } else {
        throw DomainError("simulate_outcomes: homodyne mixture probes not supported");
    }
    return {{}, std::move(samples)};
}

namespace {

MleResult from_candidate(double eta_hat) {
    if (!(eta_hat > 0.0) || !(eta_hat < 1.0) || !std::isfinite(eta_hat))
        return {std::clamp(eta_hat, 0.0, 1.0), true};
    return {eta_hat, false};
}

MleResult mle_onoff(const OutcomeData& data, const ProbeState& probe, DarkCount delta) {
    if (data.counts.size() != 2)
        throw DomainError("mle_estimate: on/off data needs {off, on} counts");
    const std::int64_t total = data.counts[0] + data.counts[1];
    if (total < 1)
        throw DomainError("mle_estimate: empty data");
    const double f_off = static_cast<double>(data.counts[0]) / total;
    const double target = f_off * std::exp(delta.value());  // vacuum projection at eta-hat

    if (const auto* f = std::get_if<Fock>(&probe)) {
        if (f->n < 1) throw DomainError("mle_estimate: Fock probe needs n >= 1");
        return from_candidate(1.0 - std::pow(target, 1.0 / f->n));
    }
    if (const auto* c = std::get_if<Coherent>(&probe)) {
        if (!(c->mean_photons > 0.0))
            throw DomainError("mle_estimate: coherent probe needs mean photons > 0");
        if (target <= 0.0) return {1.0, true};
        return from_candidate(-std::log(target) / c->mean_photons);
    }
    if (const auto* h = std::get_if<HeraldedSinglePhoton>(&probe)) {
        if (!(h->xi > 0.0)) throw DomainError("mle_estimate: heralded probe needs xi > 0");
        return from_candidate((1.0 - target) / h->xi);
    }
    // mixture: vacuum projection is monotone decreasing in eta, bisect
    const auto& mix = std::get<FockMixture>(probe);
    const auto qvac = [&](double eta) {
        return vacuum_projection(mix, Efficiency(eta)).value;
    };
    if (target >= qvac(0.0)) return {0.0, true};
    if (target <= qvac(1.0)) return {1.0, true};
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (qvac(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), false};
}

}  // namespace

MleResult mle_estimate(const OutcomeData& data, const ProbeState& probe,
                       const DetectorModel& detector) {
    if (const auto* onoff = std::get_if<OnOff>(&detector))
        return mle_onoff(data, probe, onoff->delta);

    constexpr double kEdge = 1e-9;
    constexpr double kTol = 1e-8;

    if (const auto* kout = std::get_if<KOutcome>(&detector)) {
        const auto* fock = std::get_if<Fock>(&probe);
        if (!fock)
            throw DomainError("mle_estimate: K-outcome detectors take Fock probes");
        if (data.counts.size() != static_cast<std::size_t>(kout->outcomes))
            throw DomainError("mle_estimate: count vector does not match outcome count");
        std::int64_t total = 0;
        for (auto c : data.counts) total += c;
        if (total < 1) throw DomainError("mle_estimate: empty data");
        const auto loglik = [&](double eta) {
            const auto dist = koutcome_distribution(fock->n, kout->outcomes, Efficiency(eta));
            double ll = 0.0;
            for (std::size_t k = 0; k < data.counts.size(); ++k) {
                if (data.counts[k] == 0) continue;
                const double p = dist.probabilities()[k];
                if (p <= 0.0) return -std::numeric_limits<double>::infinity();
                ll += data.counts[k] * std::log(p);
            }
            return ll;
        };
        const double eta_hat = golden_section_max(loglik, kEdge, 1.0 - kEdge, kTol);
        return {eta_hat, eta_hat < 2 * kTol || eta_hat > 1.0 - 2 * kTol};
    }

    // homodyne
    if (data.samples.empty())
        throw DomainError("mle_estimate: empty data");
    const auto density = [&](double eta, double q) -> double {
        if (const auto* fock = std::get_if<Fock>(&probe))
            return pdf_fock_lossy(fock->n, Efficiency(eta), q);
        if (const auto* c = std::get_if<Coherent>(&probe))
            return pdf_coherent_lossy(std::sqrt(c->mean_photons), Efficiency(eta), q);
        if (const auto* h = std::get_if<HeraldedSinglePhoton>(&probe))
            return pdf_heralded_lossy(h->xi, Efficiency(eta), q);
        throw DomainError("mle_estimate: homodyne mixture probes not supported");
    };
    const auto loglik = [&](double eta) {
        double ll = 0.0;
        for (double q : data.samples) {
            const double p = density(eta, q);
            if (p <= 0.0) return -std::numeric_limits<double>::infinity();
            ll += std::log(p);
        }
        return ll;
    };
    const double eta_hat = golden_section_max(loglik, kEdge, 1.0 - kEdge, kTol);
    return {eta_hat, eta_hat < 2 * kTol || eta_hat > 1.0 - 2 * kTol};
}

EstimationResult validate_crb(const EstimationRun& run, unsigned threads) {
    if (run.replicates < 2)
        throw DomainError("validate_crb: need at least 2 replicates");
    const Efficiency eta(run.eta_true);
    const FisherResult fisher = fisher_information(run.probe, run.detector, eta);
    const double crb = crb_variance(fisher, run.trials);

    std::vector<MleResult> raw(run.replicates);
    parallel_for(
        static_cast<std::size_t>(run.replicates),
        [&](std::size_t r) {
            const auto data = simulate_outcomes(run, static_cast<int>(r));
            raw[r] = mle_estimate(data, run.probe, run.detector);
        },
        threads);

    EstimationResult result;
    result.crb = crb;
    for (const auto& m : raw) {
        if (m.boundary)
            ++result.boundary_count;
        else
            result.estimates.push_back(m.value);
    }
    if (result.estimates.size() < 2)
        throw ConvergenceFailure("validate_crb: fewer than 2 interior estimates");

    // order-independent aggregation: sort, then compensated accumulation
    std::vector<double> sorted = result.estimates;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0, comp = 0.0;
    for (double v : sorted) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    const double n = static_cast<double>(sorted.size());
    const double mean = (sum + comp) / n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    result.empirical_variance = ss / (n - 1.0);
    result.variance_ratio = result.empirical_variance / crb;
    result.bias = mean - run.eta_true;
    result.bound_respected =
        result.variance_ratio >= 1.0 - 3.0 / std::sqrt(static_cast<double>(run.replicates));
    return result;
}

}  // namespace detcal
