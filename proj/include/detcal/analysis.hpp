#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "detcal/types.hpp"

// Comparative analyses on top of the Fisher engines: fixed-energy sweeps,
// crossover root-finding and heralding-efficiency thresholds.

namespace detcal {

/// Fisher information of one probe/detector pair at one efficiency,
/// dispatching to the closed forms where they exist and to quadrature for
/// the numeric homodyne cases. Unsupported pairs (e.g. mixtures on
/// K-outcome or homodyne detectors) throw DomainError.
FisherResult fisher_information(const ProbeState& probe,
                                const DetectorModel& detector, Efficiency eta);

/// M independent uses multiply the Fisher information by M.
FisherResult scale_repetitions(const FisherResult& fisher, double repetitions);

/// Evenly spaced (or, with log_scale, geometrically spaced) efficiency grid
/// of `count` points from start to stop inclusive, all inside [0, 1].
std::vector<double> eta_grid(double start, double stop, int count,
                             bool log_scale = false);

struct CurveSpec {
    std::string label;
    ProbeState probe;
    DetectorModel detector;
    double repetitions = 1.0;
};

struct ComparisonCurve {
    std::string label;
    ProbeState probe;
    DetectorModel detector;
    double repetitions = 1.0;
    std::vector<double> eta_grid;
    std::vector<FisherResult> values;  // repetition-scaled
};

/// Evaluates every curve over the grid, in parallel over grid points.
/// No energy constraint; see fixed_energy_sweep for the constrained variant.
std::vector<ComparisonCurve> sweep_curves(const std::vector<CurveSpec>& specs,
                                          const std::vector<double>& eta_grid,
                                          unsigned threads = 0);

/// Same, but requires every curve to carry the same total mean energy
/// (repetitions * mean photon number), within 1e-12; otherwise throws
/// EnergyMismatch.
std::vector<ComparisonCurve> fixed_energy_sweep(const std::vector<CurveSpec>& specs,
                                                const std::vector<double>& eta_grid,
                                                unsigned threads = 0);

struct CrossoverResult {
    std::optional<double> eta_star;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double residual = 0.0;  // |F_a - F_b| at eta_star, or the smallest gap seen
    std::string note;
};

/// Locates F_a(eta) = F_b(eta) inside the bracket: a sign-change scan at
/// 1e-3 resolution followed by bisection to |d eta| <= 1e-8. Returns an
/// empty eta_star with diagnostics when the difference does not change sign.
/// Endpoint evaluation failures throw BracketError. Divergent Fisher values
/// enter the difference as +infinity.
CrossoverResult find_crossover(const std::function<FisherResult(double)>& curve_a,
                               const std::function<FisherResult(double)>& curve_b,
                               double bracket_lo, double bracket_hi);

CrossoverResult find_crossover(const CurveSpec& a, const CurveSpec& b,
                               double bracket_lo, double bracket_hi);

/// Smallest heralding efficiency whose heralded single photon matches the
/// reference probe's Fisher information on this detector, solved by
/// bisection to 1e-8 in xi. The evaluation point defaults to eta = 1 for
/// on/off detectors and eta = 1 - 1e-4 for homodyne. Throws NoThreshold when
/// even xi = 1 stays below the reference.
double heralding_threshold(const DetectorModel& detector, const ProbeState& reference,
                           std::optional<double> eta_eval = std::nullopt);

struct ThresholdSensitivity {
    double eta_primary;
    double xi_primary;
    double eta_alternate;
    double xi_alternate;
    double shift;  // |xi_primary - xi_alternate|
};

/// The homodyne evaluation point 1 - 1e-4 stands in for the eta -> 1 limit;
/// this reports how much the threshold moves when evaluated at 1 - 1e-3
/// instead.
ThresholdSensitivity homodyne_threshold_sensitivity(const ProbeState& reference);

struct AsymptoticErrorRow {
    double eta;
    double exact;
    double approx;
    double rel_error;
};

/// Relative error of the truncated low-eta expansion against the exact
/// closed form, for a Fock or coherent probe on a noisy on/off detector.
/// The grid must lie inside (0, 0.1].
std::vector<AsymptoticErrorRow> asymptotic_error_report(
    const ProbeState& probe, DarkCount delta, const std::vector<double>& eta_grid);

}  // namespace detcal
