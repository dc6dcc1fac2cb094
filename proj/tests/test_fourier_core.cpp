#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "speclab/expr.hpp"
#include "speclab/field.hpp"
#include "speclab/grid.hpp"
#include "speclab/rng.hpp"

using namespace speclab;

namespace {

constexpr double pi = std::numbers::pi;

// Random real field band-limited to |k|_inf <= band.
Field random_band_limited(const GridSpec& g, int band, std::uint64_t seed) {
    CounterRng rng(seed);
    Field u(g);
    std::uint64_t ctr = 0;
    if (g.d == 1) {
        u.set_coeff({0, 0, 0}, cplx{rng.symmetric(ctr++), 0.0});
        for (int k = 1; k <= band; ++k) {
            double re = rng.symmetric(ctr++);
            double im = rng.symmetric(ctr++);
            cplx c{re, im};
            u.set_coeff({k, 0, 0}, c);
            u.set_coeff({-k, 0, 0}, std::conj(c));
        }
    } else {
        for (int k0 = -band; k0 <= band; ++k0)
            for (int k1 = -band; k1 <= band; ++k1) {
                double re = rng.symmetric(ctr++);
                double im = rng.symmetric(ctr++);
                cplx c{re, im};
                u.set_coeff({k0, k1, 0}, u.coeff({k0, k1, 0}) + 0.5 * c);
                u.set_coeff({-k0, -k1, 0}, u.coeff({-k0, -k1, 0}) + 0.5 * std::conj(c));
            }
    }
    u.sync_from_coeffs();
    u.sync_from_values();
    return u;
}

// Cardinal interpolation kernel sin(N pi y) / (N tan(pi y)), continuous at
// integers where it equals 1.
double cardinal_kernel(int N, double y) {
    double frac = y - std::floor(y);
    if (frac < 1e-13 || frac > 1.0 - 1e-13) return 1.0;
    return std::sin(N * pi * y) / (N * std::tan(pi * y));
}

}  // namespace

TEST_CASE("fast sizes are 5-smooth and minimal") {
    CHECK(next_fast_size(1) == 1);
    CHECK(next_fast_size(7) == 8);
    CHECK(next_fast_size(15) == 15);
    CHECK(next_fast_size(17) == 18);
    CHECK(next_fast_size(31) == 32);
    CHECK(next_fast_size(121) == 125);
}

TEST_CASE("grid constructors enforce conventions") {
    GridSpec g = GridSpec::make_galerkin(1, 8);
    CHECK(g.M >= 3 * (2 * 8 + 1));
    CHECK_THROWS(GridSpec::make_galerkin(1, 8, 10));
    CHECK_THROWS(GridSpec::make_collocation(1, 7));
    CHECK_THROWS(GridSpec::make_collocation(4, 8));
    GridSpec c = GridSpec::make_collocation(1, 16);
    CHECK(c.M == 16);
    CHECK(c.wavenumber(8) == 8);
    CHECK(c.wavenumber(9) == -7);
    CHECK(c.slot(-7) == 9);
}

TEST_CASE("round trip and Parseval on random fields") {
    for (int d : {1, 2}) {
        GridSpec g = d == 1 ? GridSpec::make_galerkin(1, 10) : GridSpec::make_galerkin(2, 4);
        Field u = random_band_limited(g, g.N, 42 + d);
        std::vector<double> before = u.values;
        u.sync_from_values();
        u.sync_from_coeffs();
        double worst = 0;
        for (size_t i = 0; i < before.size(); ++i)
            worst = std::max(worst, std::abs(before[i] - u.values[i]));
        CHECK(worst < 1e-12 * std::max(1.0, u.linf()));
        CHECK(u.hermitian_defect() < 1e-12);
        CHECK(u.l2() == doctest::Approx(u.coeff_l2()).epsilon(1e-12));
    }
    GridSpec c = GridSpec::make_collocation(1, 64);
    CounterRng rng(7);
    Field U(c);
    for (int j = 0; j < 64; ++j) U.values[j] = rng.symmetric(j);
    U.sync_from_values();
    CHECK(U.hermitian_defect() < 1e-12);
    CHECK(U.l2() == doctest::Approx(U.coeff_l2()).epsilon(1e-12));
}

TEST_CASE("projection fixes band-limited input and kills outside modes") {
    GridSpec g = GridSpec::make_galerkin(1, 8);
    Field u(g);
    u.set_coeff({0, 0, 0}, cplx{2.5, 0.0});
    u.sync_from_coeffs();
    Field p = u;
    project_galerkin(p, 8);
    for (size_t i = 0; i < p.coeffs.size(); ++i)
        CHECK(std::abs(p.coeffs[i] - u.coeffs[i]) < 1e-14);

    Field v = field_from_function(g, [](double x, double, double) { return std::cos(2 * pi * 3 * x); });
    project_galerkin(v, 2);
    CHECK(v.linf() < 1e-13);

    CHECK_THROWS_WITH_AS(project_galerkin(v, g.M), "cutoff too large for grid",
                         std::invalid_argument);
}

TEST_CASE("projection is an idempotent L2 contraction") {
    GridSpec g = GridSpec::make_galerkin(1, 20);
    Field u = random_band_limited(g, 20, 99);
    double full = u.l2();
    Field p = u;
    project_galerkin(p, 7);
    CHECK(p.l2() <= full + 1e-14);
    Field pp = p;
    project_galerkin(pp, 7);
    double drift = 0;
    for (size_t i = 0; i < p.coeffs.size(); ++i)
        drift = std::max(drift, std::abs(pp.coeffs[i] - p.coeffs[i]));
    CHECK(drift < 1e-14);
}

TEST_CASE("interpolant reproduces constants and nodal values") {
    GridSpec c = GridSpec::make_collocation(1, 32);
    Field U(c);
    for (auto& v : U.values) v = 1.0;
    U.sync_from_values();
    for (int i = 0; i < 7; ++i) CHECK(collocation_eval(U, 0.137 * i) == doctest::Approx(1.0).epsilon(1e-13));

    CounterRng rng(11);
    Field W(c);
    for (int j = 0; j < 32; ++j) W.values[j] = rng.symmetric(j);
    W.sync_from_values();
    for (int j = 0; j < 32; ++j)
        CHECK(collocation_eval(W, j / 32.0) == doctest::Approx(W.values[j]).epsilon(1e-11));
}

TEST_CASE("interpolant is the identity on the symmetric band-limited class") {
    const int N = 64;
    GridSpec c = GridSpec::make_collocation(1, N);
    CounterRng rng(5);
    // Modes |k| < N/2 random Hermitian, plus a real shared Nyquist coefficient.
    std::vector<cplx> modes(N / 2 + 1);
    modes[0] = cplx{rng.symmetric(0), 0.0};
    for (int k = 1; k < N / 2; ++k) modes[k] = cplx{rng.symmetric(2 * k), rng.symmetric(2 * k + 1)};
    modes[N / 2] = cplx{0.35, 0.0};
    auto f = [&](double x) {
        double acc = modes[0].real();
        for (int k = 1; k < N / 2; ++k)
            acc += 2.0 * (modes[k].real() * std::cos(2 * pi * k * x) -
                          modes[k].imag() * std::sin(2 * pi * k * x));
        acc += modes[N / 2].real() * std::cos(pi * N * x);
        return acc;
    };
    Field U(c);
    for (int j = 0; j < N; ++j) U.values[j] = f(static_cast<double>(j) / N);
    U.sync_from_values();
    double worst = 0;
    CounterRng xs(17);
    for (int i = 0; i < 1024; ++i) {
        double x = xs.uniform(i);
        worst = std::max(worst, std::abs(collocation_eval(U, x) - f(x)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("interpolant equals the cardinal-kernel sum and grows like log N on comb data") {
    double prev = 0.0;
    for (int N : {64, 128, 256, 512, 1024}) {
        GridSpec c = GridSpec::make_collocation(1, N);
        Field U(c);
        // Ones on even nodes in [2, N/10]: concentrates the kernel's slowly
        // decaying alternating tail on one side of the evaluation point.
        for (int j = 2; j <= N / 10; j += 2) U.values[j] = 1.0;
        U.sync_from_values();
        double x = 0.5 / N;
        double direct = 0.0;
        for (int j = 0; j < N; ++j)
            if (U.values[j] != 0.0) direct += U.values[j] * cardinal_kernel(N, x - static_cast<double>(j) / N);
        double interp = collocation_eval(U, x);
        CHECK(interp == doctest::Approx(direct).epsilon(1e-9));
        double magnitude = std::abs(interp);
        // Leading term (1/2pi) log(N/20); finite-N corrections inflate the
        // ratio at the small end, hence the asymmetric band.
        double expected = std::log(N / 20.0) / (2 * pi);
        CHECK(magnitude > 0.9 * expected);
        CHECK(magnitude < 2.2 * expected);
        CHECK(magnitude > prev);
        prev = magnitude;

        // The fixed-ratio comb on [N/100, N/10] stays bounded: its kernel sum
        // telescopes to ~ (1/2pi) log(10), independent of N.
        Field V(c);
        int lo = (N + 99) / 100;
        if (lo % 2 != 0) ++lo;
        for (int j = lo; j <= N / 10; j += 2) V.values[j] = 1.0;
        V.sync_from_values();
        double direct_v = 0.0;
        for (int j = 0; j < N; ++j)
            if (V.values[j] != 0.0) direct_v += V.values[j] * cardinal_kernel(N, x - static_cast<double>(j) / N);
        CHECK(collocation_eval(V, x) == doctest::Approx(direct_v).epsilon(1e-9));
        CHECK(std::abs(direct_v) < 0.75);  // ~ log(10)/(2 pi) ~ 0.37, never log N
    }
}

TEST_CASE("helmholtz inverse multipliers and inverse pair") {
    GridSpec g = GridSpec::make_galerkin(1, 6);
    Field u(g);
    u.set_coeff({0, 0, 0}, cplx{3.0, 0.0});
    u.sync_from_coeffs();
    apply_helmholtz_inverse(u, 2.0);
    CHECK(u.coeff({0, 0, 0}).real() == doctest::Approx(3.0).epsilon(1e-14));

    Field w(g);
    w.set_coeff({1, 0, 0}, cplx{0.5, 0.0});
    w.set_coeff({-1, 0, 0}, cplx{0.5, 0.0});
    w.sync_from_coeffs();
    apply_helmholtz_inverse(w, 1.0);
    CHECK(w.coeff({1, 0, 0}).real() == doctest::Approx(0.5 / (1 + 4 * pi * pi)).epsilon(1e-13));

    Field r = random_band_limited(g, 6, 2024);
    Field inv = r;
    double beta = 0.37;
    apply_helmholtz_inverse(inv, beta);
    // Undo with (I - beta Lap): coeff multiplier (1 + 4 pi^2 beta k^2).
    Field lap = inv;
    apply_laplacian(lap);
    double worst = 0;
    for (size_t i = 0; i < r.coeffs.size(); ++i) {
        cplx back = inv.coeffs[i] - beta * lap.coeffs[i];
        worst = std::max(worst, std::abs(back - r.coeffs[i]));
    }
    CHECK(worst < 1e-12);

    CHECK_THROWS_AS(apply_helmholtz_inverse(r, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_helmholtz_inverse(r, -1.0), std::invalid_argument);
}

TEST_CASE("derivative multiplier and Nyquist handling") {
    GridSpec c = GridSpec::make_collocation(1, 16);
    Field u = field_from_function(c, [](double x, double, double) { return std::sin(2 * pi * 3 * x); });
    Field du = u;
    apply_derivative(du, 0);
    for (int j = 0; j < 16; ++j)
        CHECK(du.values[j] ==
              doctest::Approx(2 * pi * 3 * std::cos(2 * pi * 3 * j / 16.0)).epsilon(1e-11));

    // The sawtooth mode cos(pi N x) samples to (-1)^j; its symmetric
    // interpolant has zero slope at the nodes.
    Field ny(c);
    for (int j = 0; j < 16; ++j) ny.values[j] = (j % 2 == 0) ? 1.0 : -1.0;
    ny.sync_from_values();
    Field dny = ny;
    apply_derivative(dny, 0);
    CHECK(dny.linf() < 1e-12);
}

TEST_CASE("dealiased products match closed forms") {
    GridSpec g = GridSpec::make_galerkin(1, 4);
    Field u = field_from_function(g, [](double x, double, double) { return std::cos(2 * pi * x); });
    project_galerkin(u, 4);

    Field sq = dealiased_product(u, u, 4);
    CHECK(sq.coeff({0, 0, 0}).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(sq.coeff({2, 0, 0}).real() == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(std::abs(sq.coeff({1, 0, 0})) < 1e-13);
    CHECK(std::abs(sq.coeff({3, 0, 0})) < 1e-13);

    GridSpec g3 = GridSpec::make_galerkin(1, 3);
    Field v = field_from_function(g3, [](double x, double, double) { return std::cos(2 * pi * x); });
    Field cube = dealiased_cube(v, 3);
    CHECK(cube.coeff({1, 0, 0}).real() == doctest::Approx(0.375).epsilon(1e-13));  // (3/4)/2
    CHECK(cube.coeff({3, 0, 0}).real() == doctest::Approx(0.125).epsilon(1e-13));  // (1/4)/2
    CHECK(std::abs(cube.coeff({2, 0, 0})) < 1e-13);

    CHECK_THROWS_WITH_AS(dealiased_product(u, v, 3), "mismatched grids", std::invalid_argument);
}

TEST_CASE("dealiased product equals brute-force convolution") {
    for (int N : {5, 16}) {
        GridSpec g = GridSpec::make_galerkin(1, N);
        Field a = random_band_limited(g, N, 1000 + N);
        Field b = random_band_limited(g, N, 2000 + N);
        Field prod = dealiased_product(a, b, N);
        for (int q = -N; q <= N; ++q) {
            cplx direct{0.0, 0.0};
            for (int k = -N; k <= N; ++k) {
                int l = q - k;
                if (std::abs(l) > N) continue;
                direct += a.coeff({k, 0, 0}) * b.coeff({l, 0, 0});
            }
            CHECK(std::abs(prod.coeff({q, 0, 0}) - direct) < 1e-12);
        }
    }
    // 2-d spot check.
    GridSpec g2 = GridSpec::make_galerkin(2, 3);
    Field a = random_band_limited(g2, 3, 31);
    Field b = random_band_limited(g2, 3, 32);
    Field prod = dealiased_product(a, b, 3);
    for (int q0 = -3; q0 <= 3; ++q0)
        for (int q1 = -3; q1 <= 3; ++q1) {
            cplx direct{0.0, 0.0};
            for (int k0 = -3; k0 <= 3; ++k0)
                for (int k1 = -3; k1 <= 3; ++k1) {
                    int l0 = q0 - k0, l1 = q1 - k1;
                    if (std::abs(l0) > 3 || std::abs(l1) > 3) continue;
                    direct += a.coeff({k0, k1, 0}) * b.coeff({l0, l1, 0});
                }
            CHECK(std::abs(prod.coeff({q0, q1, 0}) - direct) < 1e-12);
        }
}

TEST_CASE("oversampled sup norm sees between-node peaks") {
    GridSpec c = GridSpec::make_collocation(1, 8);
    // cos(pi N x) has |values| = 1 at nodes and sup 1; adding a mid mode puts
    // the true sup strictly between nodes.
    Field u = field_from_function(c, [](double x, double, double) {
        return std::cos(2 * pi * x) + 0.3 * std::cos(2 * pi * 2 * x + 0.7);
    });
    double node_max = u.linf();
    double fine = oversampled_linf(u, 4);
    CHECK(fine >= node_max - 1e-13);
    // Dense reference.
    double ref = 0;
    for (int i = 0; i < 20000; ++i) {
        double x = i / 20000.0;
        ref = std::max(ref, std::abs(std::cos(2 * pi * x) + 0.3 * std::cos(2 * pi * 2 * x + 0.7)));
    }
    CHECK(fine == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("expression parser covers the initial-data language") {
    CHECK(eval_expression("1 + 2*3", 0) == doctest::Approx(7.0));
    CHECK(eval_expression("sin(2*pi*x)", 0.25) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eval_expression("2^3^2", 0) == doctest::Approx(512.0));  // right associative
    CHECK(eval_expression("-x^2", 2) == doctest::Approx(-4.0));
    CHECK(eval_expression("cos(2*pi*y)", 0.0, 0.5) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(eval_expression("tanh(0)", 0) == doctest::Approx(0.0));
    CHECK(eval_expression("sqrt(abs(-9))", 0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(eval_expression("sin(", 0), std::invalid_argument);
    CHECK_THROWS_AS(eval_expression("2 +", 0), std::invalid_argument);
    CHECK_THROWS_AS(eval_expression("foo(1)", 0), std::invalid_argument);
}
