#include "detcal/serialize.hpp"

#include <cstdio>
#include <ostream>

namespace detcal {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string probe_spec(const ProbeState& probe) {
    struct Visitor {
        std::string operator()(const Fock& f) const {
            return "fock:" + std::to_string(f.n);
        }
        std::string operator()(const Coherent& c) const {
            return "coherent:" + format_double(c.mean_photons);
        }
        std::string operator()(const HeraldedSinglePhoton& h) const {
            return "heralded:" + format_double(h.xi);
        }
        std::string operator()(const FockMixture& m) const {
            std::string s = "mixture:";
            for (std::size_t i = 0; i < m.weights.size(); ++i) {
                if (i) s += ',';
                s += std::to_string(m.weights[i].first) + '=' +
                     format_double(m.weights[i].second);
            }
            return s;
        }
    };
    return std::visit(Visitor{}, probe);
}

std::string detector_spec(const DetectorModel& det) {
    struct Visitor {
        std::string operator()(const OnOff& o) const {
            return o.delta.value() == 0.0
                       ? std::string("onoff")
                       : "onoff,delta=" + format_double(o.delta.value());
        }
        std::string operator()(const KOutcome& k) const {
            return "koutcome:" + std::to_string(k.outcomes);
        }
        std::string operator()(const Homodyne&) const { return "homodyne"; }
    };
    return std::visit(Visitor{}, det);
}

json to_json(const FisherResult& fisher) {
    json j;
    j["value"] = fisher.divergent ? json(nullptr) : json(fisher.value);
    j["method"] = method_name(fisher.method);
    j["error_estimate"] = fisher.error_estimate;
    j["divergent"] = fisher.divergent;
    return j;
}

json to_json(const CrossoverResult& crossover) {
    json j;
    j["eta_star"] = crossover.eta_star ? json(*crossover.eta_star) : json(nullptr);
    j["bracket"] = {crossover.bracket_lo, crossover.bracket_hi};
    j["residual"] = crossover.residual;
    if (!crossover.note.empty()) j["note"] = crossover.note;
    return j;
}

json to_json(const EstimationResult& result, const EstimationRun& run) {
    json j;
    j["probe"] = probe_spec(run.probe);
    j["detector"] = detector_spec(run.detector);
    j["eta_true"] = run.eta_true;
    j["trials"] = run.trials;
    j["replicates"] = run.replicates;
    j["seed"] = run.seed;
    j["crb"] = result.crb;
    j["empirical_variance"] = result.empirical_variance;
    j["variance_ratio"] = result.variance_ratio;
    j["bias"] = result.bias;
    j["boundary_count"] = result.boundary_count;
    j["bound_respected"] = result.bound_respected;
    j["estimates"] = result.estimates;
    return j;
}

json curves_to_json(const std::vector<ComparisonCurve>& curves) {
    json arr = json::array();
    for (const auto& curve : curves) {
        json c;
        c["label"] = curve.label;
        c["probe"] = probe_spec(curve.probe);
        c["detector"] = detector_spec(curve.detector);
        c["repetitions"] = curve.repetitions;
        json points = json::array();
        for (std::size_t i = 0; i < curve.eta_grid.size(); ++i) {
            json p;
            p["eta"] = curve.eta_grid[i];
            const auto& f = curve.values[i];
            p["fisher"] = to_json(f);
            points.push_back(std::move(p));
        }
        c["points"] = std::move(points);
        arr.push_back(std::move(c));
    }
    return arr;
}

void write_curves_csv(std::ostream& out, const std::vector<ComparisonCurve>& curves) {
    out << kCurveCsvHeader << '\n';
    for (const auto& curve : curves) {
        for (std::size_t i = 0; i < curve.eta_grid.size(); ++i) {
            const auto& f = curve.values[i];
            out << format_double(curve.eta_grid[i]) << ',' << curve.label << ','
                << (f.divergent ? "" : format_double(f.value)) << ','
                << method_name(f.method) << ',' << format_double(f.error_estimate)
                << ',' << (f.divergent ? "true" : "false") << '\n';
        }
    }
}

}  // namespace detcal
