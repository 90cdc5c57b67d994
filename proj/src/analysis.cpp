#include "detcal/analysis.hpp"

#include <cmath>
#include <limits>

#include "detcal/discrete.hpp"
#include "detcal/homodyne.hpp"
#include "detcal/parallel.hpp"

namespace detcal {

namespace {

double as_double(const FisherResult& f) {
    return f.divergent ? std::numeric_limits<double>::infinity() : f.value;
}

struct OnOffDispatch {
    Efficiency eta;
    DarkCount delta;
    FisherResult operator()(const Fock& f) const {
        return fisher_onoff_fock(f.n, eta, delta);
    }
    FisherResult operator()(const Coherent& c) const {
        return fisher_onoff_coherent(c.mean_photons, eta, delta);
    }
    FisherResult operator()(const HeraldedSinglePhoton& h) const {
        return fisher_onoff_heralded(h.xi, eta, delta);
    }
    FisherResult operator()(const FockMixture& m) const {
        return fisher_onoff_mixture(m, eta, delta);
    }
};

struct HomodyneDispatch {
    Efficiency eta;
    QuadratureGrid grid;
    FisherResult operator()(const Fock& f) const {
        return fisher_homodyne_fock(f.n, eta, grid);
    }
    FisherResult operator()(const Coherent& c) const {
        return fisher_homodyne_coherent(std::sqrt(c.mean_photons), eta);
    }
    FisherResult operator()(const HeraldedSinglePhoton& h) const {
        return fisher_homodyne_heralded(h.xi, eta, grid);
    }
    FisherResult operator()(const FockMixture&) const {
        throw DomainError("homodyne Fisher information: mixture probes not supported");
    }
};

}  // namespace

FisherResult fisher_information(const ProbeState& probe,
                                const DetectorModel& detector, Efficiency eta) {
    validate(probe);
    if (const auto* onoff = std::get_if<OnOff>(&detector))
        return std::visit(OnOffDispatch{eta, onoff->delta}, probe);
    if (const auto* kout = std::get_if<KOutcome>(&detector)) {
        const auto* fock = std::get_if<Fock>(&probe);
        if (!fock)
            throw DomainError("K-outcome Fisher information: only Fock probes supported");
        return fisher_koutcome_fock(fock->n, kout->outcomes, eta);
    }
    const auto& hom = std::get<Homodyne>(detector);
    return std::visit(HomodyneDispatch{eta, hom.grid}, probe);
}

FisherResult scale_repetitions(const FisherResult& fisher, double repetitions) {
    if (!(repetitions > 0.0))
        throw DomainError("scale_repetitions: repetitions must be > 0");
    if (fisher.divergent) return fisher;
    return FisherResult::finite(repetitions * fisher.value, fisher.method,
                                repetitions * fisher.error_estimate);
}

std::vector<double> eta_grid(double start, double stop, int count, bool log_scale) {
    if (count < 1)
        throw DomainError("eta_grid: count must be >= 1");
    if (!(start >= 0.0 && stop <= 1.0 && start <= stop))
        throw DomainError("eta_grid: need 0 <= start <= stop <= 1");
    if (log_scale && !(start > 0.0))
        throw DomainError("eta_grid: log spacing needs start > 0");
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = start;
        return grid;
    }
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        grid[i] = log_scale ? start * std::pow(stop / start, t)
                            : start + (stop - start) * t;
    }
    grid.back() = stop;  // pin the endpoint against rounding
    return grid;
}

std::vector<ComparisonCurve> sweep_curves(const std::vector<CurveSpec>& specs,
                                          const std::vector<double>& eta_grid,
                                          unsigned threads) {
    std::vector<ComparisonCurve> curves;
    curves.reserve(specs.size());
    for (const auto& spec : specs) {
        ComparisonCurve curve{spec.label, spec.probe, spec.detector,
                              spec.repetitions, eta_grid, {}};
        curve.values.resize(eta_grid.size());
        parallel_for(
            eta_grid.size(),
            [&](std::size_t i) {
                const auto f = fisher_information(spec.probe, spec.detector,
                                                  Efficiency(eta_grid[i]));
                curve.values[i] = scale_repetitions(f, spec.repetitions);
            },
            threads);
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<ComparisonCurve> fixed_energy_sweep(const std::vector<CurveSpec>& specs,
                                                const std::vector<double>& eta_grid,
                                                unsigned threads) {
    if (specs.empty())
        throw DomainError("fixed_energy_sweep: no curves given");
    const double energy0 = specs.front().repetitions *
                           mean_photon_number(specs.front().probe);
    for (const auto& spec : specs) {
        const double energy = spec.repetitions * mean_photon_number(spec.probe);
        if (std::abs(energy - energy0) > 1e-12)
            throw EnergyMismatch("fixed_energy_sweep: curve '" + spec.label +
                                 "' carries energy " + std::to_string(energy) +
                                 " != " + std::to_string(energy0));
    }
    return sweep_curves(specs, eta_grid, threads);
}

CrossoverResult find_crossover(const std::function<FisherResult(double)>& curve_a,
                               const std::function<FisherResult(double)>& curve_b,
                               double bracket_lo, double bracket_hi) {
    if (!(bracket_hi > bracket_lo))
        throw BracketError("find_crossover: need bracket_hi > bracket_lo");
    const auto gap = [&](double eta) {
        return as_double(curve_a(eta)) - as_double(curve_b(eta));
    };
    double g_lo, g_hi;
    try {
        g_lo = gap(bracket_lo);
        g_hi = gap(bracket_hi);
    } catch (const std::exception& e) {
        throw BracketError(std::string("find_crossover: endpoint evaluation failed: ") +
                           e.what());
    }
    (void)g_hi;

    // scan at ~1e-3 resolution for the first sign change, then bisect
    const int steps = std::max(2, static_cast<int>(std::ceil((bracket_hi - bracket_lo) / 1e-3)));
    double lo = bracket_lo, g_prev = g_lo;
    double smallest_gap = std::abs(g_lo);
    std::optional<std::pair<double, double>> change;
    for (int i = 1; i <= steps; ++i) {
        const double x = bracket_lo + (bracket_hi - bracket_lo) * i / steps;
        const double g = gap(x);
        smallest_gap = std::min(smallest_gap, std::abs(g));
        if (g == 0.0) {
            return {x, bracket_lo, bracket_hi, 0.0, "exact equality at grid point"};
        }
        if ((g_prev < 0.0) != (g < 0.0)) {
            change = {lo, x};
            break;
        }
        lo = x;
        g_prev = g;
    }
    if (!change)
        return {std::nullopt, bracket_lo, bracket_hi, smallest_gap,
                "no sign change inside bracket"};

    auto [a, b] = *change;
    double g_a = gap(a);
    while (b - a > 1e-8) {
        const double mid = 0.5 * (a + b);
        const double g_mid = gap(mid);
        if (g_mid == 0.0) {
            a = b = mid;
            break;
        }
        if ((g_a < 0.0) == (g_mid < 0.0)) {
            a = mid;
            g_a = g_mid;
        } else {
            b = mid;
        }
    }
    const double root = 0.5 * (a + b);
    return {root, bracket_lo, bracket_hi, std::abs(gap(root)), ""};
}

CrossoverResult find_crossover(const CurveSpec& a, const CurveSpec& b,
                               double bracket_lo, double bracket_hi) {
    const auto make = [](const CurveSpec& spec) {
        return [spec](double eta) {
            return scale_repetitions(
                fisher_information(spec.probe, spec.detector, Efficiency(eta)),
                spec.repetitions);
        };
    };
    return find_crossover(make(a), make(b), bracket_lo, bracket_hi);
}

double heralding_threshold(const DetectorModel& detector, const ProbeState& reference,
                           std::optional<double> eta_eval) {
    if (std::holds_alternative<KOutcome>(detector))
        throw DomainError("heralding_threshold: K-outcome detectors not supported");
    const double eta = eta_eval.value_or(
        std::holds_alternative<OnOff>(detector) ? 1.0 : 1.0 - 1e-4);
    const Efficiency eff(eta);

    const double target = as_double(fisher_information(reference, detector, eff));
    if (!std::isfinite(target) || !(target > 0.0))
        throw DomainError("heralding_threshold: reference Fisher information must be finite and positive");

    const auto heralded = [&](double xi) {
        return as_double(fisher_information(HeraldedSinglePhoton{xi}, detector, eff));
    };
    const double at_one = heralded(1.0);
    if (at_one < target)
        throw NoThreshold("heralding_threshold: xi = 1 reaches only " +
                          std::to_string(at_one) + " < reference " +
                          std::to_string(target));
    if (at_one == target) return 1.0;

    // F_heralded is monotone increasing in xi, so the root is unique
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (heralded(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

ThresholdSensitivity homodyne_threshold_sensitivity(const ProbeState& reference) {
    const DetectorModel hom = Homodyne{};
    ThresholdSensitivity s{};
    s.eta_primary = 1.0 - 1e-4;
    s.xi_primary = heralding_threshold(hom, reference, s.eta_primary);
    s.eta_alternate = 1.0 - 1e-3;
    s.xi_alternate = heralding_threshold(hom, reference, s.eta_alternate);
    s.shift = std::abs(s.xi_primary - s.xi_alternate);
    return s;
}

std::vector<AsymptoticErrorRow> asymptotic_error_report(
    const ProbeState& probe, DarkCount delta, const std::vector<double>& eta_grid) {
    std::vector<AsymptoticErrorRow> rows;
    rows.reserve(eta_grid.size());
    for (double eta : eta_grid) {
        if (!(eta > 0.0 && eta <= 0.1))
            throw DomainError("asymptotic_error_report: grid must lie inside (0, 0.1]");
        const Efficiency eff(eta);
        FisherResult exact;
        if (const auto* f = std::get_if<Fock>(&probe))
            exact = fisher_onoff_fock(f->n, eff, delta);
        else if (const auto* c = std::get_if<Coherent>(&probe))
            exact = fisher_onoff_coherent(c->mean_photons, eff, delta);
        else
            throw DomainError("asymptotic_error_report: only Fock and coherent probes supported");
        const FisherResult approx = fisher_onoff_small_eta(probe, eff, delta);
        rows.push_back({eta, exact.value, approx.value,
                        std::abs(approx.value - exact.value) / exact.value});
    }
    return rows;
}

}  // namespace detcal
