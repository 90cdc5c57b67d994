#include <cmath>
#include <vector>

#include "doctest.h"

#include "detcal/homodyne.hpp"
#include "detcal/quadrature.hpp"
#include "oracles.hpp"

using namespace detcal;

namespace {

// Simpson-rule Fisher integral built on the long-double reference Hermite
// functions; fully independent of the library path it checks.
double reference_fisher_fock(int n, double eta, int points = 40000) {
    std::vector<double> w(n + 1), dw(n + 1);
    loss_weights(n, eta, w, dw);
    const auto integrand = [&](double q) {
        double p = 0.0, dp = 0.0;
        for (int m = 0; m <= n; ++m) {
            const long double psi = oracles::hermite_psi_reference(m, q);
            const double sq = static_cast<double>(psi * psi);
            p += w[m] * sq;
            dp += dw[m] * sq;
        }
        if (p <= 0.0) return 0.0;
        return dp * dp / p;
    };
    const double reach = std::sqrt(2.0 * n + 1.0) + 10.0;
    return 2.0 * oracles::simpson_integral(integrand, 0.0, reach, points);
}

}  // namespace

TEST_CASE("hermite function values") {
    CHECK(hermite_psi(0, 0.0) == doctest::Approx(0.7511255444649425).epsilon(1e-15));
    CHECK(hermite_psi(1, 0.0) == 0.0);
    // frozen from a 40-digit evaluation of the explicit polynomial form
    CHECK(hermite_psi(10, 2.5) ==
          doctest::Approx(0.050963812362210440).epsilon(1e-12));
    CHECK(static_cast<double>(oracles::hermite_psi_reference(10, 2.5L)) ==
          doctest::Approx(0.050963812362210440).epsilon(1e-14));

    CHECK_THROWS_AS(hermite_psi(-1, 0.0), DomainError);
    CHECK_THROWS_AS(hermite_psi(kHermiteOrderCap + 1, 0.0), DomainError);
}

TEST_CASE("hermite functions agree with the polynomial reference") {
    for (int m : {2, 5, 9, 16, 25}) {
        for (double q : {-4.2, -1.0, 0.3, 2.6, 5.5}) {
            const double ref =
                static_cast<double>(oracles::hermite_psi_reference(m, q));
            CHECK(hermite_psi(m, q) == doctest::Approx(ref).epsilon(1e-12));
        }
    }
    // up to the order cap, where the raw polynomial and 2^m m! would overflow
    // a double but still fit in the long-double reference
    for (int m : {40, 100, kHermiteOrderCap}) {
        for (double q : {0.4, 3.7, 11.0}) {
            const double ref =
                static_cast<double>(oracles::hermite_psi_reference(m, q));
            CHECK(hermite_psi(m, q) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("hermite parity psi_m(-q) = (-1)^m psi_m(q)") {
    for (int m = 0; m <= 12; ++m) {
        for (double q : {0.17, 1.3, 3.9}) {
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            CHECK(hermite_psi(m, -q) ==
                  doctest::Approx(sign * hermite_psi(m, q)).epsilon(1e-13));
        }
    }
}

TEST_CASE("hermite orthonormality") {
    const double reach = default_q_max(20);
    for (int i = 0; i <= 20; ++i) {
        for (int j = i; j <= 20; ++j) {
            const auto r = integrate_adaptive(
                [&](double q) {
                    std::vector<double> buf(21);
                    hermite_psi_all(20, q, buf);
                    return buf[i] * buf[j];
                },
                -reach, reach, 1e-12, 1e-12, 4000);
            CHECK(r.value == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("lossy Fock densities normalize and their derivatives sum away") {
    for (int n = 0; n <= 10; ++n) {
        const double reach = default_q_max(n);
        for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const auto mass = integrate_adaptive(
                [&](double q) { return pdf_fock_lossy(n, Efficiency(eta), q); },
                -reach, reach, 1e-13, 1e-12, 4000);
            CHECK(std::abs(mass.value - 1.0) <= 1e-10);
            const auto flow = integrate_adaptive(
                [&](double q) { return pdf_fock_lossy_deta(n, Efficiency(eta), q); },
                -reach, reach, 1e-13, 1e-12, 4000);
            CHECK(std::abs(flow.value) <= 1e-9);
        }
    }
}

TEST_CASE("lossy Fock density endpoints") {
    for (int n : {1, 3, 6}) {
        for (double q : {0.0, 0.7, 2.1}) {
            const double psi0 = hermite_psi(0, q);
            const double psin = hermite_psi(n, q);
            CHECK(pdf_fock_lossy(n, Efficiency(0.0), q) ==
                  doctest::Approx(psi0 * psi0).epsilon(1e-14));
            CHECK(pdf_fock_lossy(n, Efficiency(1.0), q) ==
                  doctest::Approx(psin * psin).epsilon(1e-14));
        }
    }
    CHECK(pdf_fock_lossy(1, Efficiency(1.0), 0.0) == 0.0);

    // golden: sum of binomial(2, m; 0.5) psi_m(1)^2, 40-digit reference
    CHECK(pdf_fock_lossy(2, Efficiency(0.5), 1.0) ==
          doctest::Approx(0.28538640447665886).epsilon(1e-13));
    long double ref = 0.0L;
    const double w2[3] = {0.25, 0.5, 0.25};
    for (int m = 0; m <= 2; ++m) {
        const long double psi = oracles::hermite_psi_reference(m, 1.0L);
        ref += w2[m] * psi * psi;
    }
    CHECK(static_cast<double>(ref) ==
          doctest::Approx(0.28538640447665886).epsilon(1e-15));
}

TEST_CASE("lossy coherent density") {
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    CHECK(pdf_coherent_lossy(0.0, Efficiency(0.3), 0.0) ==
          doctest::Approx(inv_sqrt_pi).epsilon(1e-15));
    CHECK(pdf_coherent_lossy(1.0, Efficiency(0.5), 1.0) ==
          doctest::Approx(inv_sqrt_pi).epsilon(1e-15));
    CHECK(pdf_coherent_lossy(2.0, Efficiency(1.0), 0.0) ==
          doctest::Approx(1.8926452033215408e-4).epsilon(1e-13));

    const auto mass = integrate_adaptive(
        [&](double q) { return pdf_coherent_lossy(1.5, Efficiency(0.6), q); },
        std::sqrt(2.0 * 0.6) * 1.5 - 12.0, std::sqrt(2.0 * 0.6) * 1.5 + 12.0,
        1e-13, 1e-12, 4000);
    CHECK(std::abs(mass.value - 1.0) <= 1e-10);
}

TEST_CASE("homodyne Fock Fisher information by quadrature") {
    CHECK(fisher_homodyne_fock(0, Efficiency(0.5)).value == 0.0);

    const auto f1 = fisher_homodyne_fock(1, Efficiency(0.5));
    CHECK(f1.method == FisherMethod::Quadrature);
    CHECK(f1.value == doctest::Approx(1.2454363393503878).epsilon(1e-10));
    CHECK(f1.error_estimate <= 1e-9);
    CHECK(reference_fisher_fock(1, 0.5) ==
          doctest::Approx(1.2454363393503878).epsilon(1e-8));

    const auto f4 = fisher_homodyne_fock(4, Efficiency(0.9));
    CHECK(f4.value == doctest::Approx(9.4977203910719842).epsilon(1e-10));
    CHECK(reference_fisher_fock(4, 0.9) ==
          doctest::Approx(9.4977203910719842).epsilon(1e-8));

    CHECK(fisher_homodyne_fock(1, Efficiency(1.0)).divergent);
    CHECK(fisher_homodyne_fock(3, Efficiency(1.0 - 1e-8)).divergent);
    CHECK_THROWS_AS(fisher_homodyne_fock(-1, Efficiency(0.5)), DomainError);
}

TEST_CASE("homodyne Fock Fisher agrees with finite differencing of the density") {
    for (auto [n, eta] : {std::pair{1, 0.5}, std::pair{4, 0.9}}) {
        const double h = 1e-6;
        const auto integrand = [&, n = n, eta = eta](double q) {
            const double p = pdf_fock_lossy(n, Efficiency(eta), q);
            if (p <= 0.0) return 0.0;
            const double dp = (pdf_fock_lossy(n, Efficiency(eta + h), q) -
                               pdf_fock_lossy(n, Efficiency(eta - h), q)) /
                              (2.0 * h);
            return dp * dp / p;
        };
        const double reach = default_q_max(n);
        const double fd = 2.0 * oracles::simpson_integral(integrand, 0.0, reach, 20000);
        const double quad = fisher_homodyne_fock(n, Efficiency(eta)).value;
        CHECK(quad == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("homodyne Fock Fisher information grows without bound toward eta = 1") {
    double prev = 0.0;
    for (double eta : {0.9, 0.95, 0.99, 0.999, 0.9999, 1.0 - 1e-6}) {
        const double f = fisher_homodyne_fock(1, Efficiency(eta)).value;
        CHECK(f > prev);
        prev = f;
    }
    CHECK(prev > 1000.0);
}

TEST_CASE("homodyne coherent closed form and quadrature cross-check") {
    CHECK(fisher_homodyne_coherent(2.0, Efficiency(0.5)).value ==
          doctest::Approx(8.0).epsilon(1e-15));
    CHECK(fisher_homodyne_coherent(1.0, Efficiency(1.0)).value ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fisher_homodyne_coherent(1.0, Efficiency(0.0)).divergent);
    CHECK_THROWS_AS(fisher_homodyne_coherent(0.0, Efficiency(0.5)), DomainError);

    CHECK(fisher_homodyne_coherent(1.5, Efficiency(0.3)).value ==
          doctest::Approx(7.5).epsilon(1e-15));
    CHECK(fisher_homodyne_coherent_quadrature(1.5, Efficiency(0.3)).value ==
          doctest::Approx(7.5).epsilon(1e-7));

    for (double alpha : {0.5, 1.0, 2.0}) {
        for (double eta : {0.1, 0.5, 0.9}) {
            const double closed = alpha * alpha / eta;
            const double quad =
                fisher_homodyne_coherent_quadrature(alpha, Efficiency(eta)).value;
            CHECK(std::abs(quad - closed) <= 1e-6 * closed);
        }
    }
}

TEST_CASE("homodyne heralded probe") {
    CHECK(fisher_homodyne_heralded(0.0, Efficiency(0.5)).value == 0.0);
    // xi = 1 is the n = 1 Fock probe; identical density, identical quadrature
    CHECK(fisher_homodyne_heralded(1.0, Efficiency(0.5)).value ==
          fisher_homodyne_fock(1, Efficiency(0.5)).value);

    // mixture identity F(xi, eta) = xi^2 F_1(xi eta); one side frozen
    CHECK(fisher_homodyne_heralded(0.5, Efficiency(0.8)).value ==
          doctest::Approx(0.25 * 1.2196658049883095).epsilon(1e-9));
    for (auto [xi, eta] : {std::pair{0.3, 0.6}, std::pair{0.9, 0.95}}) {
        const double lhs = fisher_homodyne_heralded(xi, Efficiency(eta)).value;
        const double rhs =
            xi * xi * fisher_homodyne_fock(1, Efficiency(xi * eta)).value;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }

    // near eta = 1 the xi = 0.765 probe sits within 2% of coherent alpha = 1
    const double eta = 1.0 - 1e-4;
    const double her = fisher_homodyne_heralded(0.765, Efficiency(eta)).value;
    const double coh = fisher_homodyne_coherent(1.0, Efficiency(eta)).value;
    CHECK(std::abs(her - coh) / coh <= 0.02);

    CHECK(fisher_homodyne_heralded(1.0, Efficiency(1.0)).divergent);
    CHECK_THROWS_AS(fisher_homodyne_heralded(-0.1, Efficiency(0.5)), DomainError);
}

TEST_CASE("quadrature engine basics") {
    const auto gauss = integrate_adaptive(
        [](double x) { return std::exp(-x * x); }, -10.0, 10.0, 1e-14, 1e-12, 2000);
    CHECK(gauss.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(gauss.error <= 1e-10);

    CHECK_THROWS_AS(integrate_adaptive([](double) { return 1.0; }, 1.0, 0.0),
                    DomainError);
    // an integrand the rule cannot settle within one panel budget
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return std::sin(1e4 * x); },
                                       0.0, 20.0, 1e-14, 1e-14, 8),
                    ConvergenceFailure);
}
