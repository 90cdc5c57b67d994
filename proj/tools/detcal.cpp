// detcal: Fisher-information toolkit for optical detector efficiency
// calibration. Subcommands: fisher, figure, sweep, crossover, threshold,
// simulate. Exit codes: 0 success, 2 invalid input, 3 I/O failure,
// 4 convergence failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "detcal/analysis.hpp"
#include "detcal/discrete.hpp"
#include "detcal/homodyne.hpp"
#include "detcal/montecarlo.hpp"
#include "detcal/serialize.hpp"
#include "detcal/types.hpp"

namespace {

using detcal::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

detcal::ProbeState parse_probe(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw detcal::DomainError("probe spec needs the form kind:value, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    try {
        if (kind == "fock") return detcal::Fock{std::stoi(arg)};
        if (kind == "coherent") return detcal::Coherent{std::stod(arg)};
        if (kind == "heralded") return detcal::HeraldedSinglePhoton{std::stod(arg)};
    } catch (const std::logic_error&) {
        throw detcal::DomainError("probe spec has a malformed number: '" + spec + "'");
    }
    if (kind == "mixture") {
        std::ifstream f(arg);
        if (!f) throw IoError("cannot open mixture file '" + arg + "'");
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw detcal::DomainError("mixture file '" + arg + "': " + e.what());
        }
        if (!j.contains("weights") || !j["weights"].is_array())
            throw detcal::DomainError("mixture file '" + arg + "' needs a weights array");
        detcal::FockMixture mix;
        for (const auto& entry : j["weights"])
            mix.weights.emplace_back(entry.at(0).get<int>(), entry.at(1).get<double>());
        return mix;
    }
    throw detcal::DomainError("unknown probe kind '" + kind +
                              "' (expected fock|coherent|heralded|mixture)");
}

detcal::DetectorModel parse_detector(const std::string& spec, double delta) {
    if (spec == "onoff") return detcal::OnOff{detcal::DarkCount{delta}};
    if (spec == "homodyne") {
        if (delta != 0.0)
            throw detcal::DomainError("homodyne detectors have no dark-count model");
        return detcal::Homodyne{};
    }
    if (spec.rfind("koutcome:", 0) == 0) {
        if (delta != 0.0)
            throw detcal::DomainError("K-outcome detectors have no dark-count model");
        int k = 0;
        try {
            k = std::stoi(spec.substr(9));
        } catch (const std::logic_error&) {
            throw detcal::DomainError("malformed K-outcome spec '" + spec + "'");
        }
        return detcal::KOutcome{k};
    }
    throw detcal::DomainError("unknown detector '" + spec +
                              "' (expected onoff|koutcome:K|homodyne)");
}

std::pair<double, double> parse_bracket(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw detcal::DomainError("bracket needs the form LO:HI, got '" + spec + "'");
    try {
        return {std::stod(spec.substr(0, colon)), std::stod(spec.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw detcal::DomainError("bracket has a malformed number: '" + spec + "'");
    }
}

std::vector<double> parse_eta_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3 && parts.size() != 4)
        throw detcal::DomainError("eta grid needs START:STOP:COUNT[:log], got '" + spec + "'");
    double start = 0, stop = 0;
    int count = 0;
    try {
        start = std::stod(parts[0]);
        stop = std::stod(parts[1]);
        count = std::stoi(parts[2]);
    } catch (const std::logic_error&) {
        throw detcal::DomainError("eta grid has a malformed number: '" + spec + "'");
    }
    const bool log_scale = parts.size() == 4 && parts[3] == "log";
    if (parts.size() == 4 && !log_scale && parts[3] != "linear")
        throw detcal::DomainError("eta grid scale must be linear or log");
    return detcal::eta_grid(start, stop, count, log_scale);
}

int write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return 0;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open '" << path << "' for writing\n";
        return 3;
    }
    f << content;
    f.flush();
    if (!f.good()) {
        std::cerr << "error: write to '" << path << "' failed\n";
        return 3;
    }
    return 0;
}

std::string curves_payload(const std::vector<detcal::ComparisonCurve>& curves,
                           const std::string& format) {
    if (format == "json") return detcal::curves_to_json(curves).dump(2) + "\n";
    std::ostringstream out;
    detcal::write_curves_csv(out, curves);
    return out.str();
}

std::string rep_label(double reps, const std::string& probe) {
    if (reps == 1.0) return probe;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", reps);
    return std::string(buf) + " x " + probe;
}

detcal::CurveSpec curve(double reps, const detcal::ProbeState& probe,
                        const detcal::DetectorModel& det) {
    return {rep_label(reps, detcal::probe_spec(probe)), probe, det, reps};
}

std::vector<detcal::ComparisonCurve> figure_curves(int id, int points) {
    const auto grid = detcal::eta_grid(0.01, 0.99, points, false);
    using detcal::Coherent;
    using detcal::Fock;
    using detcal::HeraldedSinglePhoton;
    const detcal::DetectorModel onoff = detcal::OnOff{};
    const detcal::DetectorModel noisy = detcal::OnOff{detcal::DarkCount{0.05}};
    const detcal::DetectorModel homodyne = detcal::Homodyne{};
    switch (id) {
        case 1:
            return detcal::fixed_energy_sweep({curve(3, Fock{1}, onoff),
                                               curve(1, Fock{3}, onoff),
                                               curve(3, Coherent{1.0}, onoff),
                                               curve(1, Coherent{3.0}, onoff)},
                                              grid);
        case 2:
            return detcal::fixed_energy_sweep({curve(5, Fock{1}, noisy),
                                               curve(1, Fock{5}, noisy),
                                               curve(1, Coherent{5.0}, noisy)},
                                              grid);
        case 3:
            return detcal::fixed_energy_sweep({curve(4, Fock{1}, homodyne),
                                               curve(2, Fock{2}, homodyne),
                                               curve(1, Fock{4}, homodyne),
                                               curve(1, Coherent{4.0}, homodyne)},
                                              grid);
        case 4:
            // heralded vs coherent is deliberately not energy matched
            return detcal::sweep_curves({curve(1, HeraldedSinglePhoton{0.80}, onoff),
                                         curve(1, HeraldedSinglePhoton{1.0 / M_E}, onoff),
                                         curve(1, Coherent{1.0}, onoff)},
                                        grid);
        default:
            throw detcal::DomainError("figure id must be 1, 2, 3 or 4");
    }
}

std::vector<detcal::ComparisonCurve> run_sweep_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open sweep spec '" + path + "'");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw detcal::DomainError("sweep spec '" + path + "': " + e.what());
    }
    if (j.value("schema", "") != std::string("detcal-sweep/1"))
        throw detcal::DomainError("sweep spec must declare \"schema\": \"detcal-sweep/1\"");
    const double delta = j.value("delta", 0.0);
    const auto detector = parse_detector(j.at("detector").get<std::string>(), delta);
    const auto& g = j.at("eta_grid");
    const auto grid =
        detcal::eta_grid(g.at("start").get<double>(), g.at("stop").get<double>(),
                         g.at("count").get<int>(), g.value("scale", "linear") == "log");
    if (grid.front() < 1e-4 || grid.back() > 1.0 - 1e-6)
        throw detcal::DomainError("sweep eta grid must stay inside [1e-4, 1 - 1e-6]");
    std::vector<detcal::CurveSpec> specs;
    for (const auto& c : j.at("curves")) {
        const auto probe = parse_probe(c.at("probe").get<std::string>());
        const double reps = c.value("repetitions", 1.0);
        std::string label = c.value("label", "");
        if (label.empty()) label = rep_label(reps, detcal::probe_spec(probe));
        specs.push_back({label, probe, detector, reps});
    }
    if (j.value("check_energy", false))
        return detcal::fixed_energy_sweep(specs, grid);
    return detcal::sweep_curves(specs, grid);
}

}  // namespace

namespace {

int run_tool(int argc, char** argv) {
    CLI::App app{"Fisher-information toolkit for optical detector efficiency calibration"};
    app.require_subcommand(1);

    std::string probe_spec, detector_spec = "onoff", out_path, format = "json";
    std::string eta_grid_spec, bracket_spec, reference_spec, sweep_spec_path;
    double delta = 0.0, eta = 0.5;
    std::optional<double> eta_eval;
    std::int64_t trials = 100000;
    int replicates = 200, figure_id = 1, points = 99;
    std::uint64_t seed = 0;
    std::string probe_a, probe_b;
    double reps_a = 1.0, reps_b = 1.0;

    auto* fisher = app.add_subcommand("fisher", "Fisher information at one efficiency");
    fisher->add_option("--probe", probe_spec, "fock:N|coherent:NBAR|heralded:XI|mixture:FILE")
        ->required();
    fisher->add_option("--detector", detector_spec, "onoff|koutcome:K|homodyne");
    fisher->add_option("--delta", delta, "dark-count exponent (on/off only)");
    auto* eta_opt = fisher->add_option("--eta", eta, "efficiency");
    fisher->add_option("--eta-grid", eta_grid_spec, "START:STOP:COUNT[:log]")
        ->excludes(eta_opt);
    fisher->add_option("--format", format, "csv|json (grid mode)")->default_val("json");
    fisher->add_option("--out", out_path, "output path (default stdout)");

    auto* figure = app.add_subcommand("figure", "reproduce a comparison-curve dataset");
    figure->add_option("id", figure_id, "figure id (1-4)")->required();
    figure->add_option("--out", out_path, "output path (default stdout)");
    figure->add_option("--format", format, "csv|json")->default_val("csv");
    figure->add_option("--points", points, "grid points on [0.01, 0.99]");

    auto* sweep = app.add_subcommand("sweep", "evaluate curves from a spec file");
    sweep->add_option("--spec", sweep_spec_path, "sweep spec JSON path")->required();
    sweep->add_option("--out", out_path, "output path (default stdout)");
    sweep->add_option("--format", format, "csv|json")->default_val("csv");

    auto* crossover = app.add_subcommand("crossover", "locate F_a(eta) = F_b(eta)");
    crossover->add_option("--detector", detector_spec, "onoff|koutcome:K|homodyne");
    crossover->add_option("--delta", delta, "dark-count exponent (on/off only)");
    crossover->add_option("--probe-a", probe_a, "first probe")->required();
    crossover->add_option("--reps-a", reps_a, "repetitions of probe a");
    crossover->add_option("--probe-b", probe_b, "second probe")->required();
    crossover->add_option("--reps-b", reps_b, "repetitions of probe b");
    crossover->add_option("--bracket", bracket_spec, "LO:HI search bracket")->required();
    crossover->add_option("--out", out_path, "output path (default stdout)");

    auto* threshold = app.add_subcommand(
        "threshold", "minimal heralding efficiency matching a reference probe");
    threshold->add_option("--detector", detector_spec, "onoff|homodyne");
    threshold->add_option("--delta", delta, "dark-count exponent (on/off only)");
    threshold->add_option("--reference", reference_spec, "reference probe")->required();
    threshold->add_option("--eta-eval", eta_eval, "evaluation efficiency");
    threshold->add_option("--format", format, "plain|json")->default_val("plain");
    threshold->add_option("--out", out_path, "output path (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo Cramer-Rao validation");
    simulate->add_option("--probe", probe_spec, "probe spec")->required();
    simulate->add_option("--detector", detector_spec, "onoff|koutcome:K|homodyne");
    simulate->add_option("--delta", delta, "dark-count exponent (on/off only)");
    simulate->add_option("--eta", eta, "true efficiency")->required();
    simulate->add_option("--trials", trials, "outcomes per replicate");
    simulate->add_option("--replicates", replicates, "replicates");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--out", out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fisher->parsed()) {
            const auto probe = parse_probe(probe_spec);
            const auto detector = parse_detector(detector_spec, delta);
            if (!eta_grid_spec.empty()) {
                const auto grid = parse_eta_grid(eta_grid_spec);
                const auto curves = detcal::sweep_curves(
                    {curve(1.0, probe, detector)}, grid);
                return write_output(out_path, curves_payload(curves, format));
            }
            if (eta_opt->count() == 0)
                throw detcal::DomainError("fisher needs --eta or --eta-grid");
            const auto result =
                detcal::fisher_information(probe, detector, detcal::Efficiency(eta));
            return write_output(out_path, detcal::to_json(result).dump(2) + "\n");
        }
        if (figure->parsed()) {
            return write_output(out_path, curves_payload(figure_curves(figure_id, points), format));
        }
        if (sweep->parsed()) {
            return write_output(out_path, curves_payload(run_sweep_spec(sweep_spec_path), format));
        }
        if (crossover->parsed()) {
            const auto detector = parse_detector(detector_spec, delta);
            const auto [lo, hi] = parse_bracket(bracket_spec);
            const auto a = curve(reps_a, parse_probe(probe_a), detector);
            const auto b = curve(reps_b, parse_probe(probe_b), detector);
            const auto result = detcal::find_crossover(a, b, lo, hi);
            return write_output(out_path, detcal::to_json(result).dump(2) + "\n");
        }
        if (threshold->parsed()) {
            const auto detector = parse_detector(detector_spec, delta);
            const auto reference = parse_probe(reference_spec);
            const double xi = detcal::heralding_threshold(detector, reference, eta_eval);
            if (format == "json") {
                json j;
                j["xi_star"] = xi;
                j["detector"] = detcal::detector_spec(detector);
                j["reference"] = detcal::probe_spec(reference);
                j["eta_eval"] = eta_eval
                                    ? *eta_eval
                                    : (std::holds_alternative<detcal::OnOff>(detector)
                                           ? 1.0
                                           : 1.0 - 1e-4);
                return write_output(out_path, j.dump(2) + "\n");
            }
            return write_output(out_path, detcal::format_double(xi) + "\n");
        }
        if (simulate->parsed()) {
            detcal::EstimationRun run{parse_probe(probe_spec),
                                      parse_detector(detector_spec, delta),
                                      eta,
                                      trials,
                                      seed,
                                      replicates};
            const auto result = detcal::validate_crb(run);
            return write_output(out_path, detcal::to_json(result, run).dump(2) + "\n");
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const detcal::ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const detcal::NoThreshold& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const detcal::EnergyMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const detcal::BracketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_tool(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
