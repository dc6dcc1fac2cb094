#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "speclab/kernels.hpp"
#include "speclab/quad.hpp"
#include "speclab/stability.hpp"

using namespace speclab;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("cubic stage map envelope: closed-form landmarks") {
    CHECK(cubic_map(0.5, 1.0) == 1.0);
    CHECK(cubic_map(3.0, 2.0) == doctest::Approx(8.0 - 24.0).epsilon(1e-15));

    // max over |x| <= 1 at tau = 1/2 is exactly 1 (peak and endpoint coincide).
    auto e1 = cubic_envelope(0.5, 1.0);
    CHECK(e1.envelope == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e1.x_c == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e1.g_xc == doctest::Approx(1.0).epsilon(1e-15));

    // tau = 2: the interior peak equals -g at the alpha = sqrt(2) endpoint.
    auto e2 = cubic_envelope(2.0, std::sqrt(2.0));
    CHECK(e2.envelope == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(e2.g_xc == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // tau = 1, alpha = 2: endpoint |g(2)| = 4 dominates the interior peak.
    auto e3 = cubic_envelope(1.0, 2.0);
    CHECK(e3.envelope == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(e3.g_xc == doctest::Approx(1.08866).epsilon(1e-5));

    // The two spellings of the outer fixed point agree, and the landmarks are
    // ordered x_c < x_zero < x_neg.
    for (double tau : {0.3, 0.8, 1.7, 3.0}) {
        auto e = cubic_envelope(tau, 1.0);
        CHECK(e.x_fix == doctest::Approx(e.x_neg).epsilon(1e-15));
        CHECK(e.x_c < e.x_zero);
        CHECK(e.x_zero < e.x_neg);
        CHECK(std::abs(cubic_map(tau, e.x_zero)) < 1e-12);
        CHECK(cubic_map(tau, e.x_neg) == doctest::Approx(-e.x_neg).epsilon(1e-12));
    }

    CHECK_THROWS_AS((void)cubic_envelope(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)cubic_envelope(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("cubic envelope: sampling cross-check and contraction ranges") {
    // Dense sampling can only undershoot the closed form, and by very little.
    for (double tau : {0.1, 0.5, 1.3, 2.0, 4.0}) {
        for (double alpha : {0.4, 1.0, 1.7, 2.5}) {
            auto e = cubic_envelope(tau, alpha);
            CHECK(e.sampled <= e.envelope + 1e-13);
            CHECK(e.envelope <= e.sampled + 1e-6);
        }
    }

    // Non-decreasing in alpha.
    for (double tau : {0.3, 1.0, 2.5}) {
        double prev = 0.0;
        for (int i = 1; i <= 60; ++i) {
            double v = cubic_envelope(tau, 0.05 * i).envelope;
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }

    // For tau <= 1/2 the map contracts every level 1 <= alpha <= sqrt(1+2/tau),
    // strictly inside the open range.
    for (int it = 1; it <= 10; ++it) {
        double tau = 0.05 * it;
        double hi = std::sqrt(1.0 + 2.0 / tau);
        for (int ia = 0; ia <= 20; ++ia) {
            double alpha = 1.0 + (hi - 1.0) * ia / 20.0;
            double env = cubic_envelope(tau, alpha).envelope;
            CHECK(env <= alpha + 1e-12);
            if (ia > 0 && ia < 20) CHECK(env < alpha);
        }
    }

    // For 1/2 <= tau <= 2 the same holds between the peak value and the outer
    // fixed point.
    for (int it = 0; it <= 10; ++it) {
        double tau = 0.5 + 0.15 * it;
        double lo = (2.0 / 3.0) * std::pow(1.0 + tau, 1.5) / std::sqrt(3.0 * tau);
        double hi = std::sqrt((2.0 + tau) / tau);
        for (int ia = 0; ia <= 20; ++ia) {
            double alpha = lo + (hi - lo) * ia / 20.0;
            double env = cubic_envelope(tau, alpha).envelope;
            CHECK(env <= alpha + 1e-12);
            if (ia > 0 && ia < 20 && tau < 2.0) CHECK(env < alpha);
        }
    }
}

TEST_CASE("prototype max iteration: geometric decay sandwich and blow-up") {
    // Contractive regime from alpha0 = 2 without error term: decays onto 1.
    auto it1 = prototype_iteration(0.25, 0.0, 2.0, 60);
    CHECK(!it1.diverged);
    CHECK(it1.exceeds_1e3_at == -1);
    CHECK(it1.sandwich_ok);
    CHECK(it1.final_value == doctest::Approx(1.0).epsilon(1e-9));
    double theta_n = 1.0;
    for (size_t n = 1; n < it1.alphas.size(); ++n) {
        theta_n *= 0.5;
        CHECK(it1.alphas[n] >= 1.0 - 1e-12);
        CHECK(it1.alphas[n] <= 1.0 + theta_n + 1e-12);
        if (n >= 2) CHECK(it1.alphas[n] <= it1.alphas[n - 1] + 1e-15);
    }

    // With a persistent error term eta the plateau sits at 1 + eta/(1-theta).
    auto it2 = prototype_iteration(0.25, 1e-3, 2.0, 60);
    CHECK(it2.sandwich_ok);
    CHECK(it2.final_value == doctest::Approx(1.00199403179).epsilon(1e-9));
    theta_n = 1.0;
    for (size_t n = 1; n < it2.alphas.size(); ++n) {
        theta_n *= 0.5;
        CHECK(it2.alphas[n] >= 1.0 + 1e-3 - 1e-12);
        CHECK(it2.alphas[n] <= 1.0 + theta_n + 2e-3 * (1.0 - theta_n) + 1e-12);
    }

    // tau = 3 started at the critical point: escapes past 1e3 almost at once.
    auto it3 = prototype_iteration(3.0, 0.0, 2.0 / 3.0, 200);
    CHECK(it3.diverged);
    CHECK(it3.alphas[1] == doctest::Approx(16.0 / 9.0).epsilon(1e-14));
    CHECK(it3.exceeds_1e3_at >= 1);
    CHECK(it3.exceeds_1e3_at <= 50);

    // Mid-range tau started at the landmark midpoint stays trapped.
    double tau = 0.75;
    double mid = 0.5 * ((2.0 / 3.0) * std::pow(1.75, 1.5) / std::sqrt(2.25) +
                        std::sqrt(2.75 / 0.75));
    auto it4 = prototype_iteration(tau, 1e-5, mid, 60);
    CHECK(it4.sandwich_ok);
    CHECK(!it4.diverged);

    CHECK_THROWS_AS((void)prototype_iteration(-1.0, 0.0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS((void)prototype_iteration(1.0, -0.1, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS((void)prototype_iteration(1.0, 0.0, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS((void)prototype_iteration(1.0, 0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("energy-stability step-size root") {
    auto r = tau1_root();
    CHECK(r.root == doctest::Approx(0.860017714576).epsilon(1e-9));
    CHECK(std::abs(r.root - 0.860018) < 1e-6);
    CHECK(std::abs(r.root - r.closed_form) < 1e-12);
    CHECK(r.residual < 1e-12);
    // The same root as a cubic polynomial residual.
    double x = r.root;
    CHECK(std::abs(4.0 * x * x * x + 12.0 * x * x + 3.0 * x - 14.0) < 1e-12);
    // Independent recomputation of the radical closed form.
    double cf = 0.5 * (-2.0 + std::cbrt(9.0 - 3.0 * std::sqrt(6.0)) +
                       std::cbrt(9.0 + 3.0 * std::sqrt(6.0)));
    CHECK(r.closed_form == cf);
    // The perturbed inequality holds on the whole dense step-size grid.
    CHECK(r.grid_inequality_ok);
}

TEST_CASE("tau = 2 one-step overshoot witness") {
    auto w = counterexample_tau2(0.05, 8);
    CHECK(w.u0_linf <= std::sqrt(2.0) + 1e-12);
    CHECK(w.u1_linf > std::sqrt(2.0));
    CHECK(w.overshoot > 0.0);
    CHECK(w.delta <= 0.05);
    CHECK(w.identity_value > 0.0);

    // Frozen values for the canonical parameters.
    CHECK(w.identity_value == doctest::Approx(1.235591e-4).epsilon(1e-4));
    CHECK(w.overshoot == doctest::Approx(5.549101e-5).epsilon(1e-3));
    CHECK(w.kernel_min == doctest::Approx(-0.049721).epsilon(1e-3));

    // The overshoot tracks its linear prediction 9 delta (T eta)(0).
    double predicted = 9.0 * w.delta * w.identity_value;
    CHECK(std::abs(w.overshoot - predicted) <= 0.5 * predicted);

    // The kernel minimum agrees with the kernel analyzer at beta = 2 nu^2.
    auto p = kernel_profile(1, 8, 2.0 * 0.05 * 0.05, 2.0);
    CHECK(w.kernel_min == doctest::Approx(p.min_value).epsilon(1e-5));

    // Far above the positivity threshold the kernel has no negative part.
    CHECK_THROWS_AS((void)counterexample_tau2(0.05, 2048), std::runtime_error);

    CHECK_THROWS_AS((void)counterexample_tau2(0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS((void)counterexample_tau2(0.05, 0), std::invalid_argument);
}

TEST_CASE("one-step heat amplification table") {
    // Similarity parameter k0 = 1: the limit coefficients and their partial
    // sum exceed 1 by a fixed margin.
    auto a = heat_amplification(512, 0.25 / (512.0 * 512.0), 1.0);
    CHECK(a.k_param == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.b == doctest::Approx(pi * pi / 4.0).epsilon(1e-14));
    CHECK(std::abs(a.beta_j[0] - 0.54934) < 1e-5);
    CHECK(std::abs(a.beta_j[1] - 0.219568) < 1e-5);
    CHECK(std::abs(a.beta_j[2] - 0.0031275) < 1e-5);
    CHECK(std::abs(a.beta_j[3] - 0.00413676) < 1e-5);
    double sum3 = a.beta_j[0] + 2.0 * (a.beta_j[1] + a.beta_j[2] + a.beta_j[3]);
    CHECK(sum3 >= 1.002);
    CHECK(sum3 == doctest::Approx(1.00300368).epsilon(1e-7));
    CHECK(a.total > 1.001);
    CHECK(a.total == doctest::Approx(1.02638099).epsilon(1e-6));
    CHECK(!a.closed_form_valid);
    // The finite-N kernel row reproduces the limit coefficients.
    for (int j = 0; j <= 3; ++j)
        CHECK(std::abs(a.kernel_row[static_cast<size_t>(j)] - a.beta_j[static_cast<size_t>(j)]) < 1e-5);

    // One-step l1 mass is never below 1 (the row sums to the k = 0 multiplier).
    for (double t : {1e-6, 1e-3, 0.1})
        CHECK(heat_amplification(64, t, 0.7).total >= 1.0 - 1e-13);

    // Long steps: the mass collapses to 1.
    {
        int N = 256;
        double t = 100.0 * std::log(static_cast<double>(N)) / (static_cast<double>(N) * N);
        CHECK(heat_amplification(N, t, 1.0).total <= 1.0 + 1.0 / N);
    }

    CHECK_THROWS_AS((void)heat_amplification(65, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)heat_amplification(64, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)heat_amplification(64, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("heat closed form vs direct coefficient sum") {
    for (double b : {0.05, 0.2, 0.5}) {
        double k0 = 2.0 * std::sqrt(b) / pi;
        int N = 1024;
        auto a = heat_amplification(N, k0 * k0 / (4.0 * N * N), 1.0, 12);
        REQUIRE(a.closed_form_valid);
        // Exact form 2 int_0^1 e^{-b s^2} ds - e^{-b} against the term-by-term
        // absolute coefficient sum.
        CHECK(std::abs(a.closed_form - heat_coefficient_l1_sum(b)) < 1e-6);
        // ... and against the finite-N kernel mass.
        CHECK(std::abs(a.closed_form - a.total) < 1e-5);
        // Small-b alternation: positive coefficients at odd index, negative at
        // even index >= 2.
        for (int j = 1; j <= 8; ++j) {
            double bj = a.beta_j[static_cast<size_t>(j)];
            if (j % 2 == 1) CHECK(bj >= 0.0);
            else CHECK(bj <= 0.0);
        }
    }
    // Vanishing damping: the mass tends to 1.
    CHECK(heat_amplification(64, 1e-8 / (4.0 * 64.0 * 64.0), 1.0).closed_form ==
          doctest::Approx(1.0).epsilon(1e-7));

    CHECK_THROWS_AS((void)heat_coefficient_l1_sum(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)heat_coefficient_l1_sum(0.2, 3), std::invalid_argument);
}

TEST_CASE("n-fold resolvent amplification table") {
    auto a = resolvent_amplification(512, 0.25 / (512.0 * 512.0), 1, 1.0, 10);
    CHECK(a.k_param == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(a.beta_j[0] - 0.639093) < 1e-5);
    CHECK(std::abs(a.beta_j[1] - 0.165881) < 1e-5);
    CHECK(std::abs(a.beta_j[2] - 0.00883796) < 1e-5);
    CHECK(std::abs(a.beta_j[3] - 0.00691018) < 1e-5);
    CHECK(std::abs(a.beta_j[4] - (-0.00220351)) < 1e-5);
    double sum3 = a.beta_j[0] + 2.0 * (std::abs(a.beta_j[1]) + std::abs(a.beta_j[2]) +
                                       std::abs(a.beta_j[3]));
    CHECK(sum3 > 1.0023);
    CHECK(sum3 == doctest::Approx(1.00235150).epsilon(1e-7));
    CHECK(a.total > 1.001);
    // beta_0 has the arctangent closed form.
    CHECK(a.beta_j[0] == doctest::Approx(std::atan(pi * 0.5) / (pi * 0.5)).epsilon(1e-12));
    for (int j = 0; j <= 4; ++j)
        CHECK(std::abs(a.kernel_row[static_cast<size_t>(j)] - a.beta_j[static_cast<size_t>(j)]) < 1e-5);

    // Large steps tau >= 1/2: positive kernel, unit mass, any power.
    for (int n : {1, 10, 100}) {
        auto big = resolvent_amplification(256, 0.5, n, 1.0);
        CHECK(big.total >= 1.0 - 1e-13);
        CHECK(big.total <= 1.0 + 1.0 / 256.0);
        if (n > 1) CHECK(big.beta_j.empty());
    }

    // Resolvent powers as Laplace-weighted exponentials:
    // a^{-n} = (1/(n-1)!) int_0^inf e^{-s a} s^{n-1} ds.
    {
        double av = 1.25;
        double rhs = integrate_halfline(
            [av](double s) { return s > 800.0 ? 0.0 : std::exp(-s * av) * s * s * s * s; }, 0.0) / 24.0;
        CHECK(std::abs(std::pow(av, -5.0) - rhs) < 1e-10);
    }

    CHECK_THROWS_AS((void)resolvent_amplification(64, 0.1, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)resolvent_amplification(63, 0.1, 1, 1.0), std::invalid_argument);
}

TEST_CASE("worst-case bounded node data for one linear step") {
    for (int N : {128, 256, 512, 1024}) {
        for (const char* mode : {"heat", "resolvent"}) {
            auto r = adversarial_data(N, mode);
            CHECK(r.witness_value >= 1.001);
            CHECK(r.overshoot == doctest::Approx(r.witness_value - 1.0).epsilon(1e-15));
            CHECK(r.pattern == std::vector<int>{1, 1, 1, 1});
            CHECK(r.step_time == doctest::Approx(0.25 / (static_cast<double>(N) * N)).epsilon(1e-15));
            CHECK(r.witness_node == N / 4);
            double maxv = 0.0;
            for (double v : r.data) maxv = std::max(maxv, std::abs(v));
            CHECK(maxv <= 1.0);
            // Zeros in the buffer ring and far field.
            int buf = static_cast<int>(std::cbrt(static_cast<double>(N)));
            for (int j = 4; j <= buf; ++j) {
                CHECK(r.data[static_cast<size_t>((r.witness_node + j) % N)] == 0.0);
                CHECK(r.data[static_cast<size_t>((r.witness_node - j + N) % N)] == 0.0);
            }
            CHECK(r.data[static_cast<size_t>((r.witness_node + N / 2) % N)] == 0.0);
        }
    }

    // Frozen witness levels at N = 512.
    CHECK(adversarial_data(512, "heat").witness_value == doctest::Approx(1.00300421).epsilon(1e-6));
    CHECK(adversarial_data(512, "resolvent").witness_value == doctest::Approx(1.00235202).epsilon(1e-6));

    // The witness value is exactly the pattern-weighted kernel row sum.
    {
        int N = 256;
        auto r = adversarial_data(N, "heat");
        auto a = heat_amplification(N, r.step_time, 1.0);
        double expect = a.kernel_row[0] + 2.0 * (a.kernel_row[1] + a.kernel_row[2] + a.kernel_row[3]);
        CHECK(r.witness_value == doctest::Approx(expect).epsilon(1e-12));
    }

    CHECK_THROWS_AS((void)adversarial_data(32, "heat"), std::invalid_argument);
    CHECK_THROWS_AS((void)adversarial_data(129, "heat"), std::invalid_argument);
    CHECK_THROWS_AS((void)adversarial_data(128, "cooling"), std::invalid_argument);
    CHECK_THROWS_AS((void)adversarial_data(128, "heat", 0.0), std::invalid_argument);
}

TEST_CASE("smooth node data never overshoots the same step") {
    for (int N : {128, 512}) {
        std::vector<double> sine(static_cast<size_t>(N)), hat(static_cast<size_t>(N));
        for (int j = 0; j < N; ++j) {
            double x = static_cast<double>(j) / N;
            sine[static_cast<size_t>(j)] = std::sin(2.0 * pi * x);
            hat[static_cast<size_t>(j)] = 1.0 - 2.0 * std::abs(2.0 * x - 1.0);
        }
        for (const char* mode : {"heat", "resolvent"}) {
            CHECK(smooth_data_overshoot(N, mode, 1.0, sine) <= 0.0);
            double hv = smooth_data_overshoot(N, mode, 1.0, hat);
            CHECK(hv <= 0.0);
            // Lipschitz data: bounded by the modulus of continuity at N^{-2/3}.
            CHECK(std::abs(hv) <= 4.0 * std::pow(static_cast<double>(N), -2.0 / 3.0));
        }
    }
    std::vector<double> three(3, 0.0);
    CHECK_THROWS_AS((void)smooth_data_overshoot(4, "heat", 1.0, three), std::invalid_argument);
}

TEST_CASE("linear collocation step: exact actions on pure modes") {
    int N = 64;
    std::vector<double> c(static_cast<size_t>(N), 0.7), s(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) s[static_cast<size_t>(j)] = std::sin(2.0 * pi * j / N);

    auto hc = linear_collocation_step(c, "heat", 0.37, 1, 1.0);
    for (double v : hc) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
    auto rc = linear_collocation_step(c, "resolvent", 0.37, 3, 1.0);
    for (double v : rc) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));

    // A single harmonic is damped by exactly its multiplier.
    double damp = std::exp(-4.0 * pi * pi * 0.25 * 0.01);
    auto hs = linear_collocation_step(s, "heat", 0.01, 1, 0.5);
    for (int j = 0; j < N; ++j)
        CHECK(std::abs(hs[static_cast<size_t>(j)] - damp * s[static_cast<size_t>(j)]) < 1e-13);

    CHECK_THROWS_AS((void)linear_collocation_step(c, "advection", 0.1, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)linear_collocation_step(c, "heat", -0.1, 1, 1.0), std::invalid_argument);
    std::vector<double> odd(7, 0.0);
    CHECK_THROWS_AS((void)linear_collocation_step(odd, "heat", 0.1, 1, 1.0), std::invalid_argument);
}
