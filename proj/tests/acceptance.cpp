// Acceptance suite: one line per criterion, PASS/FAIL plus timing, exit code
// equal to the number of failed criteria. Criteria 1 and 2 drive the real
// CLI binary; the rest exercise the library directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "detcal/analysis.hpp"
#include "detcal/discrete.hpp"
#include "detcal/homodyne.hpp"
#include "detcal/montecarlo.hpp"
#include "detcal/serialize.hpp"

using namespace detcal;

namespace {

int g_failures = 0;

struct Criterion {
    int id;
    std::string detail;
    bool ok = true;
    double limit_seconds;

    void expect(bool condition, const std::string& why) {
        if (!condition) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
};

void run_criterion(int id, double limit_seconds, const std::string& title,
                   const std::function<void(Criterion&)>& body) {
    Criterion c{id, "", true, limit_seconds};
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > limit_seconds) {
        c.ok = false;
        c.detail += (c.detail.empty() ? "" : "; ") + std::string("runtime ") +
                    std::to_string(seconds) + " s over limit " +
                    std::to_string(limit_seconds) + " s";
    }
    std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL", id,
                title.c_str(), seconds, c.detail.empty() ? "" : " -- ",
                c.detail.c_str());
    if (!c.ok) ++g_failures;
}

std::pair<int, std::string> run_cli(const std::string& args) {
    const std::string cmd = std::string(DETCAL_CLI_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double fd_fisher(const std::function<std::vector<double>(double)>& pmf, double eta) {
    const double h = 1e-6;
    const auto plus = pmf(eta + h), minus = pmf(eta - h), center = pmf(eta);
    double total = 0.0;
    for (std::size_t k = 0; k < center.size(); ++k) {
        if (center[k] == 0.0) continue;
        const double dp = (plus[k] - minus[k]) / (2.0 * h);
        total += dp * dp / center[k];
    }
    return total;
}

}  // namespace

int main() {
    run_criterion(1, 1.0, "on/off heralding threshold equals 1/e to 1e-6",
                  [](Criterion& c) {
        const auto [code, out] =
            run_cli("threshold --detector onoff --reference coherent:1");
        c.expect(code == 0, "CLI exited " + std::to_string(code));
        if (code != 0) return;
        const double xi = std::stod(out);
        c.expect(std::abs(xi - 1.0 / M_E) <= 1e-6,
                 "xi = " + fmt(xi) + " vs 1/e = " + fmt(1.0 / M_E));
    });

    run_criterion(2, 30.0, "homodyne heralding threshold equals 0.765 +- 0.015",
                  [](Criterion& c) {
        const auto [code, out] =
            run_cli("threshold --detector homodyne --reference coherent:1");
        c.expect(code == 0, "CLI exited " + std::to_string(code));
        if (code != 0) return;
        const double xi = std::stod(out);
        const bool hit = std::abs(xi - 0.765) <= 0.015;
        if (!hit) {
            const auto s = homodyne_threshold_sensitivity(Coherent{1.0});
            c.expect(false, "xi = " + fmt(xi) +
                                "; evaluation-point sensitivity: xi(1-1e-4) = " +
                                fmt(s.xi_primary) + ", xi(1-1e-3) = " +
                                fmt(s.xi_alternate) + ", shift = " + fmt(s.shift));
        }
    });

    run_criterion(3, 1.0, "on/off comparison properties on the 99-point grid",
                  [](Criterion& c) {
        const auto grid = eta_grid(0.01, 0.99, 99);
        for (double eta : grid) {
            const Efficiency e(eta);
            const double f1 = fisher_onoff_fock(1, e).value;
            const double f3 = fisher_onoff_fock(3, e).value;
            const double fc = fisher_onoff_coherent(1.0, e).value;
            if (f1 < fc)
                c.expect(false, "F_1 < F_coherent at eta = " + fmt(eta));
            if (f3 > 3.0 * f1 * (1.0 + 1e-12))
                c.expect(false, "F_3 > 3 F_1 at eta = " + fmt(eta));
            if (eta <= 0.01 && std::abs(f3 - 3.0 * f1) / (3.0 * f1) > 0.02)
                c.expect(false, "low-eta gap over 2% at eta = " + fmt(eta));
        }
    });

    run_criterion(4, 1.0, "dark-count comparison properties at delta = 0.05",
                  [](Criterion& c) {
        const DarkCount delta(0.05);
        bool advantage = false;
        for (int i = 1; i <= 50; ++i) {
            const Efficiency e(0.002 * i);
            if (fisher_onoff_fock(5, e, delta).value >
                5.0 * fisher_onoff_fock(1, e, delta).value)
                advantage = true;
        }
        c.expect(advantage, "no eta <= 0.1 with F_5 > 5 F_1");
        const Efficiency e(0.01);
        const double f5 = fisher_onoff_fock(5, e, delta).value;
        const double fc = fisher_onoff_coherent(5.0, e, delta).value;
        c.expect(std::abs(fc - f5) / f5 <= 0.10,
                 "coherent gap " + fmt(std::abs(fc - f5) / f5) + " > 10%");
        const double ratio_coh = fc / f5;
        const double ratio_single = 5.0 * fisher_onoff_fock(1, e, delta).value / f5;
        c.expect(ratio_coh > ratio_single,
                 "coherent/F5 ratio not above 5F_1/F5 ratio");
    });

    run_criterion(5, 60.0, "homodyne comparison properties",
                  [](Criterion& c) {
        // first clause, exactly as stated: 4 F1(eta) > 4/eta on [0.65, 0.90]
        std::string failures;
        for (int i = 0; i <= 25; ++i) {
            const double eta = 0.65 + 0.01 * i;
            const double lhs = 4.0 * fisher_homodyne_fock(1, Efficiency(eta)).value;
            const double rhs = 4.0 / eta;
            if (!(lhs > rhs)) {
                if (!failures.empty()) failures += ",";
                failures += fmt(eta);
            }
        }
        if (!failures.empty()) {
            const auto cross = find_crossover(
                {"4 x fock:1", Fock{1}, Homodyne{}, 4.0},
                {"coherent:4", Coherent{4.0}, Homodyne{}, 1.0}, 0.3, 0.99);
            c.expect(false,
                     "4F_1 <= 4/eta at eta in {" + failures +
                         "}; computed crossover eta* = " +
                         (cross.eta_star ? fmt(*cross.eta_star) : "none") +
                         " (the inequality holds only above it)");
        }
        const double coh = 4.0 / 0.1;
        const Efficiency low(0.1);
        const double f1 = 4.0 * fisher_homodyne_fock(1, low).value;
        const double f2 = 2.0 * fisher_homodyne_fock(2, low).value;
        const double f4 = fisher_homodyne_fock(4, low).value;
        c.expect(coh > f1 && coh > f2 && coh > f4,
                 "coherent value 40 does not dominate at eta = 0.1 (got " + fmt(f1) +
                     ", " + fmt(f2) + ", " + fmt(f4) + ")");
    });

    run_criterion(6, 1.0, "low-eta expansion within 1% at eta = 0.001, delta = 0.05",
                  [](Criterion& c) {
        const Efficiency e(0.001);
        const DarkCount d(0.05);
        for (int n : {1, 5}) {
            const double exact = fisher_onoff_fock(n, e, d).value;
            const double approx = fisher_onoff_small_eta(Fock{n}, e, d).value;
            c.expect(std::abs(approx - exact) / exact < 0.01,
                     "Fock n=" + std::to_string(n) + " error " +
                         fmt(std::abs(approx - exact) / exact));
        }
        for (double nbar : {1.0, 5.0}) {
            const double exact = fisher_onoff_coherent(nbar, e, d).value;
            const double approx =
                fisher_onoff_small_eta(Coherent{nbar}, e, d).value;
            c.expect(std::abs(approx - exact) / exact < 0.01,
                     "coherent nbar=" + fmt(nbar) + " error " +
                         fmt(std::abs(approx - exact) / exact));
        }
    });

    run_criterion(7, 10.0, "homodyne quadrature reproduces alpha^2/eta to 1e-6",
                  [](Criterion& c) {
        for (double alpha : {0.5, 1.0, 2.0}) {
            for (double eta : {0.1, 0.5, 0.9}) {
                const double closed = alpha * alpha / eta;
                const double quad =
                    fisher_homodyne_coherent_quadrature(alpha, Efficiency(eta)).value;
                c.expect(std::abs(quad - closed) <= 1e-6 * closed,
                         "alpha=" + fmt(alpha) + " eta=" + fmt(eta) + " rel err " +
                             fmt(std::abs(quad - closed) / closed));
            }
        }
    });

    run_criterion(8, 1.0, "K-outcome identity and recorded discrepancy",
                  [](Criterion& c) {
        for (int n = 1; n <= 10; ++n) {
            for (int k = 2; k <= n + 1; ++k) {
                for (int i = 1; i <= 9; ++i) {
                    const Efficiency eta(0.1 * i);
                    const double closed = fisher_koutcome_fock(n, k, eta).value;
                    const double generic =
                        discrete_fisher(koutcome_distribution(n, k, eta)).value;
                    if (std::abs(closed - generic) > 1e-10 * std::abs(generic))
                        c.expect(false, "mismatch at n=" + std::to_string(n) +
                                            " K=" + std::to_string(k) +
                                            " eta=" + fmt(0.1 * i));
                }
            }
        }
        const double general = fisher_koutcome_fock(3, 3, Efficiency(0.5)).value;
        const double claimed = koutcome_claimed_closed_form(3, Efficiency(0.5));
        c.expect(std::abs(general - 10.5) < 1e-9,
                 "general F(3;3,0.5) = " + fmt(general) + " != 10.5");
        c.expect(std::abs(claimed - 8.0) < 1e-12,
                 "claimed form = " + fmt(claimed) + " != 8.0");
    });

    run_criterion(9, 1.0, "random Fock mixtures respect the nbar F_1 bound",
                  [](Criterion& c) {
        CounterRng rng(20240601, 0);
        int violations = 0;
        for (int trial = 0; trial < 100; ++trial) {
            FockMixture mix;
            double total = 0.0;
            for (int j = 0; j <= 10; ++j) {
                const double w = rng.next_unit();
                mix.weights.emplace_back(j, w);
                total += w;
            }
            for (auto& [j, w] : mix.weights) w /= total;
            double residue = 1.0;
            for (auto& [j, w] : mix.weights) residue -= w;
            mix.weights.front().second += residue;

            const double nbar = mean_photon_number(mix);
            for (int i = 1; i <= 19; ++i) {
                const Efficiency eta(0.05 * i);
                const double f = fisher_onoff_mixture(mix, eta).value;
                const double bound = nbar * fisher_onoff_fock(1, eta).value;
                if (f > bound * (1.0 + 1e-12) + 1e-12) ++violations;
            }
        }
        c.expect(violations == 0,
                 std::to_string(violations) + " bound violations beyond 1e-12");
    });

    run_criterion(10, 60.0, "Cramer-Rao saturation at M = 1e5, R = 500",
                  [](Criterion& c) {
        const std::vector<EstimationRun> runs = {
            {Fock{1}, OnOff{}, 0.9, 100000, 42, 500},
            {Coherent{1.0}, OnOff{}, 0.5, 100000, 42, 500},
        };
        for (const auto& run : runs) {
            const auto result = validate_crb(run);
            const std::string tag = probe_spec(run.probe) + " eta=" + fmt(run.eta_true);
            c.expect(result.variance_ratio >= 0.9 && result.variance_ratio <= 1.1,
                     tag + ": variance/CRB = " + fmt(result.variance_ratio));
            c.expect(result.bound_respected,
                     tag + ": ratio below 1 - 3/sqrt(R)");
            if (run.probe.index() == 0)
                c.expect(std::abs(result.crb - 9e-7) < 1e-12,
                         tag + ": CRB = " + fmt(result.crb) + " != 9e-7");
        }
    });

    run_criterion(11, 10.0, "closed forms match the finite-difference oracle; densities normalize",
                  [](Criterion& c) {
        for (int i = 1; i <= 19; ++i) {
            const double eta = 0.05 * i;
            const Efficiency e(eta);
            for (double delta : {0.0, 0.05}) {
                const DarkCount d(delta);
                for (int n : {1, 2, 5, 10}) {
                    const double cf = fisher_onoff_fock(n, e, d).value;
                    const double fd = fd_fisher(
                        [&](double x) {
                            return onoff_distribution(Fock{n}, Efficiency(x), d)
                                .probabilities();
                        },
                        eta);
                    if (std::abs(cf - fd) > 1e-6 * fd)
                        c.expect(false, "fock n=" + std::to_string(n) +
                                            " eta=" + fmt(eta) + " delta=" + fmt(delta));
                }
                for (double nbar : {1.0, 3.0, 5.0}) {
                    const double cf = fisher_onoff_coherent(nbar, e, d).value;
                    const double fd = fd_fisher(
                        [&](double x) {
                            return onoff_distribution(Coherent{nbar}, Efficiency(x), d)
                                .probabilities();
                        },
                        eta);
                    if (std::abs(cf - fd) > 1e-6 * fd)
                        c.expect(false, "coherent nbar=" + fmt(nbar) + " eta=" + fmt(eta));
                }
            }
            for (double xi : {0.3, 0.8, 1.0}) {
                const double cf = fisher_onoff_heralded(xi, e).value;
                const double fd = fd_fisher(
                    [&](double x) {
                        return onoff_distribution(HeraldedSinglePhoton{xi},
                                                  Efficiency(x), DarkCount{})
                            .probabilities();
                    },
                    eta);
                if (std::abs(cf - fd) > 1e-6 * fd)
                    c.expect(false, "heralded xi=" + fmt(xi) + " eta=" + fmt(eta));
            }
            const FockMixture mix{{{0, 0.2}, {1, 0.3}, {4, 0.5}}};
            const double cf = fisher_onoff_mixture(mix, e).value;
            const double fd = fd_fisher(
                [&](double x) {
                    return onoff_distribution(mix, Efficiency(x), DarkCount{})
                        .probabilities();
                },
                eta);
            if (std::abs(cf - fd) > 1e-6 * fd)
                c.expect(false, "mixture eta=" + fmt(eta));

            for (auto [n, k] : {std::pair{5, 4}, std::pair{3, 3}}) {
                const double ck = fisher_koutcome_fock(n, k, e).value;
                const double fk = fd_fisher(
                    [&, n = n, k = k](double x) {
                        return koutcome_distribution(n, k, Efficiency(x))
                            .probabilities();
                    },
                    eta);
                if (std::abs(ck - fk) > 1e-6 * fk)
                    c.expect(false, "koutcome n=" + std::to_string(n) +
                                        " K=" + std::to_string(k) + " eta=" + fmt(eta));
            }
        }

        for (int n = 0; n <= 10; ++n) {
            const double reach = default_q_max(n);
            for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const auto mass = integrate_adaptive(
                    [&](double q) { return pdf_fock_lossy(n, Efficiency(eta), q); },
                    -reach, reach, 1e-13, 1e-12, 4000);
                if (std::abs(mass.value - 1.0) > 1e-10)
                    c.expect(false, "fock pdf n=" + std::to_string(n) +
                                        " eta=" + fmt(eta) + " mass " + fmt(mass.value));
            }
        }
        for (double alpha : {0.5, 2.0}) {
            for (double eta : {0.3, 1.0}) {
                const double mean = std::sqrt(2.0 * eta) * alpha;
                const auto mass = integrate_adaptive(
                    [&](double q) {
                        return pdf_coherent_lossy(alpha, Efficiency(eta), q);
                    },
                    mean - 12.0, mean + 12.0, 1e-13, 1e-12, 4000);
                if (std::abs(mass.value - 1.0) > 1e-10)
                    c.expect(false, "coherent pdf alpha=" + fmt(alpha) +
                                        " eta=" + fmt(eta));
            }
        }
    });

    if (g_failures == 0)
        std::printf("acceptance: all 11 criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures;
}
