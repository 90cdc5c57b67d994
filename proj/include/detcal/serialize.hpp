#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "detcal/analysis.hpp"
#include "detcal/montecarlo.hpp"
#include "detcal/types.hpp"

// Deterministic CSV/JSON output: fixed column and key order, 17 significant
// decimal digits (round-trips IEEE doubles exactly), line-feed newlines.
// Divergent Fisher values serialize as value = null / empty with
// divergent = true.

namespace detcal {

using json = nlohmann::ordered_json;

/// "%.17g" rendering; parses back to the identical double.
std::string format_double(double value);

std::string probe_spec(const ProbeState& probe);      // e.g. "fock:3"
std::string detector_spec(const DetectorModel& det);  // e.g. "koutcome:4"

json to_json(const FisherResult& fisher);
json to_json(const CrossoverResult& crossover);
json to_json(const EstimationResult& result, const EstimationRun& run);
json curves_to_json(const std::vector<ComparisonCurve>& curves);

inline constexpr const char* kCurveCsvHeader =
    "eta,curve_label,fisher_value,method,error_estimate,divergent";

void write_curves_csv(std::ostream& out, const std::vector<ComparisonCurve>& curves);

}  // namespace detcal
