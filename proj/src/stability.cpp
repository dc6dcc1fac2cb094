#include "speclab/stability.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/polygamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "speclab/field.hpp"
#include "speclab/grid.hpp"
#include "speclab/kernels.hpp"
#include "speclab/quad.hpp"

namespace speclab {

namespace {

constexpr double pi = std::numbers::pi;

// max_{|x| <= alpha} |g(x)| from the closed-form landmarks: g is odd,
// increasing up to x_c and decreasing beyond, so the only candidates are the
// interior peak and the endpoint.
double envelope_value(double tau, double alpha) {
    double x_c = std::sqrt((1.0 + tau) / (3.0 * tau));
    double end = std::abs(cubic_map(tau, alpha));
    if (alpha <= x_c) return end;
    double peak = (2.0 / 3.0) * std::pow(1.0 + tau, 1.5) / std::sqrt(3.0 * tau);
    return std::max(peak, end);
}

// beta_j = int_0^1 w(s) cos(pi j s) ds by composite Gauss (the integrand is
// entire; panels track the oscillation count).
template <class W>
double cosine_coefficient(W&& w, int j) {
    auto f = [&](double s) { return w(s) * std::cos(pi * j * s); };
    return integrate_panels(f, 0.0, 1.0, std::max(8, j + 4));
}

void validate_linear_step_args(std::int64_t n_data, const std::string& mode, double time,
                               int n, double nu) {
    if (n_data < 2 || n_data % 2 != 0)
        throw std::invalid_argument("collocation step: need an even number of nodes");
    if (mode != "heat" && mode != "resolvent")
        throw std::invalid_argument("collocation step: mode must be heat or resolvent");
    if (time <= 0.0) throw std::invalid_argument("collocation step: time must be positive");
    if (n < 1) throw std::invalid_argument("collocation step: power must be at least 1");
    if (nu <= 0.0) throw std::invalid_argument("collocation step: nu must be positive");
}

// h_j = (1/N) sum_{-N/2 < k <= N/2} m(k^2) e^{2 pi i j k / N}: the row of the
// one-step node-to-node matrix (symmetric, h_{N-j} = h_j).
std::vector<double> kernel_row(int N, const std::string& mode, double time, int n, double nu) {
    auto mult = [&](double k) {
        double a = 4.0 * pi * pi * nu * nu * time * k * k;
        return mode == "heat" ? std::exp(-a) : std::pow(1.0 + a, -n);
    };
    std::vector<double> row(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) {
        double acc = 1.0;
        for (int k = 1; k < N / 2; ++k)
            acc += 2.0 * mult(k) * std::cos(2.0 * pi * k * j / N);
        acc += (j % 2 == 0 ? 1.0 : -1.0) * mult(N / 2.0);
        row[static_cast<size_t>(j)] = acc / N;
    }
    return row;
}

}  // namespace

double cubic_map(double tau, double x) { return (1.0 + tau) * x - tau * x * x * x; }

EnvelopeReport cubic_envelope(double tau, double alpha) {
    if (tau <= 0.0) throw std::invalid_argument("envelope: tau must be positive");
    if (alpha <= 0.0) throw std::invalid_argument("envelope: alpha must be positive");
    EnvelopeReport r;
    r.tau = tau;
    r.alpha = alpha;
    r.x_c = std::sqrt((1.0 + tau) / (3.0 * tau));
    r.g_xc = (2.0 / 3.0) * std::pow(1.0 + tau, 1.5) / std::sqrt(3.0 * tau);
    r.x_zero = std::sqrt((1.0 + tau) / tau);
    r.x_neg = std::sqrt((2.0 + tau) / tau);
    r.x_fix = std::sqrt(1.0 + 2.0 / tau);
    r.envelope = envelope_value(tau, alpha);
    const int samples = 100000;
    double best = 0.0;
    for (int i = 0; i <= samples; ++i)
        best = std::max(best, std::abs(cubic_map(tau, alpha * i / samples)));
    r.sampled = best;
    return r;
}

IterationReport prototype_iteration(double tau, double eta, double alpha0, int n_max) {
    if (tau <= 0.0) throw std::invalid_argument("iteration: tau must be positive");
    if (eta < 0.0) throw std::invalid_argument("iteration: eta must be nonnegative");
    if (alpha0 <= 0.0) throw std::invalid_argument("iteration: alpha0 must be positive");
    if (n_max < 1) throw std::invalid_argument("iteration: need at least one step");

    IterationReport r;
    r.alphas.reserve(static_cast<size_t>(n_max) + 1);
    r.alphas.push_back(alpha0);
    for (int k = 0; k < n_max; ++k) {
        double next = envelope_value(tau, r.alphas.back()) + eta;
        if (!std::isfinite(next) || next > 1e50) {
            r.diverged = true;
            break;
        }
        r.alphas.push_back(next);
    }
    for (size_t i = 0; i < r.alphas.size(); ++i)
        if (r.alphas[i] > 1e3) {
            r.exceeds_1e3_at = static_cast<int>(i);
            break;
        }
    r.final_value = r.alphas.back();

    // Geometric-decay sandwich, in the two regimes where it is asserted:
    // contraction onto [1, ...] for tau <= 1/2 started from alpha0 <= 2, and
    // the peak/fixed-point trap for 1/2 < tau < 2 started inside the landmark
    // interval.
    const double slack = 1e-12;
    if (tau <= 0.5 && alpha0 >= 1.0 && alpha0 <= 2.0 && !r.diverged) {
        double theta = 1.0 - 2.0 * tau;
        bool ok = true;
        double theta_n = 1.0;
        for (size_t nidx = 1; nidx < r.alphas.size(); ++nidx) {
            theta_n *= theta;
            double upper = 1.0 + theta_n + (theta >= 1.0 ? static_cast<double>(nidx) : (1.0 - theta_n) / (1.0 - theta)) * eta;
            if (r.alphas[nidx] < 1.0 + eta - slack || r.alphas[nidx] > upper + slack) ok = false;
        }
        r.sandwich_ok = ok && r.alphas.size() > 1;
    } else if (tau > 0.5 && tau < 2.0 && !r.diverged) {
        double peak = (2.0 / 3.0) * std::pow(1.0 + tau, 1.5) / std::sqrt(3.0 * tau);
        double x1 = std::sqrt((2.0 + tau) / tau);
        if (alpha0 >= peak && alpha0 <= x1) {
            bool ok = true;
            for (size_t nidx = 1; nidx < r.alphas.size(); ++nidx)
                if (r.alphas[nidx] < peak + eta - slack || r.alphas[nidx] > std::max(alpha0, peak + eta) + slack)
                    ok = false;
            r.sandwich_ok = ok && r.alphas.size() > 1;
        }
    }
    return r;
}

Tau1Report tau1_root() {
    // 1/2 + 1/x = (3/2) ((2/3)(1+x)^{3/2} / sqrt(3x))^2 = (2/9)(1+x)^3 / x,
    // equivalently 4x^3 + 12x^2 + 3x - 14 = 0.
    auto f = [](double x) { return 0.5 + 1.0 / x - (2.0 / 9.0) * std::pow(1.0 + x, 3.0) / x; };
    Tau1Report r;
    auto bracket = bracket_root(f, 0.5, 1.0, 1e-14);
    r.root = 0.5 * (bracket.first + bracket.second);
    r.closed_form = 0.5 * (-2.0 + std::cbrt(9.0 - 3.0 * std::sqrt(6.0)) + std::cbrt(9.0 + 3.0 * std::sqrt(6.0)));
    r.residual = std::abs(f(r.root));

    const int grid = 10000;
    bool ok = true;
    const double eta0 = 1e-5;
    for (int i = 0; i <= grid; ++i) {
        double tau = 0.5 + (0.86 - 0.5) * i / grid;
        double peak = (2.0 / 3.0) * std::pow(1.0 + tau, 1.5) / std::sqrt(3.0 * tau);
        if (0.5 + 1.0 / tau < 1.5 * (peak + eta0) * (peak + eta0)) ok = false;
    }
    r.grid_inequality_ok = ok;
    return r;
}

Tau2Witness counterexample_tau2(double nu, int N) {
    if (nu <= 0.0) throw std::invalid_argument("tau2 witness: nu must be positive");
    if (N < 1) throw std::invalid_argument("tau2 witness: N must be at least 1");

    const double tau = 2.0;
    const double beta = tau * nu * nu;
    const double root2 = std::sqrt(2.0);

    // Everything lives on a fine grid so that minus the kernel's negative part
    // (a kinked, fully broadband function) is represented faithfully.
    int M = 8 * (2 * N + 1);
    GridSpec g = GridSpec::make_galerkin(1, N, std::max(M, 1024));

    Field kern(g);
    for (int k = -N; k <= N; ++k)
        kern.set_coeff({k, 0, 0}, bessel_multiplier(beta, 2.0, static_cast<double>(k) * k));
    kern.sync_from_coeffs();

    Tau2Witness w;
    w.nu = nu;
    w.N = N;
    w.kernel_min = *std::min_element(kern.values.begin(), kern.values.end());
    if (w.kernel_min >= 0.0) throw std::runtime_error("window mismatch");

    std::vector<double> eta(kern.values.size());
    for (size_t i = 0; i < eta.size(); ++i) eta[i] = std::min(kern.values[i], 0.0);
    double eta_linf = -w.kernel_min;

    // (T eta)(0) for T = (I - tau nu^2 Laplacian)^{-1} Pi_N: with eta = -K^-
    // this equals int (K^-)^2 > 0, the linear-order overshoot rate.
    {
        Field t(g);
        t.values = eta;
        t.sync_from_values();
        project_galerkin(t, N);
        apply_helmholtz_inverse(t, beta);
        w.identity_value = t.values[0];
    }

    // delta smaller than both the bound keeping |u0| <= sqrt(2) and the scale
    // where the cubic remainder competes with the linear term; then halve
    // until the measured overshoot tracks the linear prediction.
    double delta = std::min(0.05, root2 / eta_linf);
    for (int attempt = 0; attempt < 60; ++attempt) {
        Field u(g);
        for (size_t i = 0; i < u.values.size(); ++i) u.values[i] = root2 + delta * eta[i];
        w.u0_linf = 0.0;
        for (double v : u.values) w.u0_linf = std::max(w.u0_linf, std::abs(v));

        for (double& v : u.values) v = (1.0 + tau) * v - tau * v * v * v;
        u.sync_from_values();
        project_galerkin(u, N);
        apply_helmholtz_inverse(u, beta);

        w.u1_linf = 0.0;
        for (double v : u.values) w.u1_linf = std::max(w.u1_linf, std::abs(v));
        w.delta = delta;
        w.overshoot = w.u1_linf - root2;

        double predicted = 9.0 * delta * w.identity_value;
        if (w.overshoot > 0.0 && std::abs(w.overshoot - predicted) <= 0.5 * predicted) break;
        delta *= 0.5;
    }
    return w;
}

AmplificationTable heat_amplification(int N, double t, double nu, int n_beta) {
    validate_linear_step_args(N, "heat", t, 1, nu);
    AmplificationTable a;
    a.mode = "heat";
    a.N = N;
    a.time = t;
    a.nu = nu;
    a.k_param = 2.0 * N * nu * std::sqrt(t);
    a.b = pi * pi * a.k_param * a.k_param / 4.0;
    double b = a.b;
    for (int j = 0; j < n_beta; ++j)
        a.beta_j.push_back(cosine_coefficient([b](double s) { return std::exp(-b * s * s); }, j));
    a.kernel_row = kernel_row(N, "heat", t, 1, nu);
    for (double h : a.kernel_row) a.total += std::abs(h);
    if (b <= 0.5) {
        a.closed_form = std::sqrt(pi / b) * boost::math::erf(std::sqrt(b)) - std::exp(-b);
        a.closed_form_valid = true;
    }
    return a;
}

double heat_coefficient_l1_sum(double b, int terms) {
    if (b <= 0.0) throw std::invalid_argument("coefficient sum: b must be positive");
    if (terms < 8) throw std::invalid_argument("coefficient sum: need at least 8 terms");
    auto w = [b](double s) { return std::exp(-b * s * s); };
    double acc = cosine_coefficient(w, 0);
    for (int j = 1; j <= terms; ++j) acc += 2.0 * std::abs(cosine_coefficient(w, j));
    // |beta_j| = 2 b e^{-b} / (pi j)^2 + O(j^{-4}); sum the leading tail exactly.
    acc += 2.0 * (2.0 * b * std::exp(-b) / (pi * pi)) * boost::math::polygamma(1, terms + 1.0);
    return acc;
}

AmplificationTable resolvent_amplification(int N, double tau, int n, double nu, int n_beta) {
    validate_linear_step_args(N, "resolvent", tau, n, nu);
    AmplificationTable a;
    a.mode = "resolvent";
    a.N = N;
    a.time = tau;
    a.n = n;
    a.nu = nu;
    a.k_param = N * nu * std::sqrt(tau);
    if (n == 1) {
        double k1 = a.k_param;
        for (int j = 0; j < n_beta; ++j)
            a.beta_j.push_back(cosine_coefficient(
                [k1](double s) { return 1.0 / (1.0 + k1 * pi * s * (k1 * pi * s)); }, j));
    }
    a.kernel_row = kernel_row(N, "resolvent", tau, n, nu);
    for (double h : a.kernel_row) a.total += std::abs(h);
    return a;
}

std::vector<double> linear_collocation_step(const std::vector<double>& data,
                                            const std::string& mode, double time,
                                            int n, double nu) {
    validate_linear_step_args(static_cast<std::int64_t>(data.size()), mode, time, n, nu);
    int N = static_cast<int>(data.size());
    Field u(GridSpec::make_collocation(1, N));
    u.values = data;
    u.sync_from_values();
    for (size_t f = 0; f < u.coeffs.size(); ++f) {
        int k = static_cast<int>(f) <= N / 2 ? static_cast<int>(f) : static_cast<int>(f) - N;
        double a = 4.0 * pi * pi * nu * nu * time * k * k;
        u.coeffs[f] *= mode == "heat" ? std::exp(-a) : std::pow(1.0 + a, -n);
    }
    u.sync_from_coeffs();
    return u.values;
}

AdversarialReport adversarial_data(int N, const std::string& mode, double nu) {
    if (N < 64 || N % 2 != 0)
        throw std::invalid_argument("adversarial data: N must be even and at least 64");
    if (mode != "heat" && mode != "resolvent")
        throw std::invalid_argument("adversarial data: mode must be heat or resolvent");
    if (nu <= 0.0) throw std::invalid_argument("adversarial data: nu must be positive");

    AdversarialReport r;
    r.mode = mode;
    r.N = N;
    r.nu = nu;
    // k0 = 1 (heat) / k1 = 1/2 (resolvent): the similarity parameters at which
    // the one-step kernel row carries l1 mass > 1.001.
    r.step_time = 0.25 / (nu * nu * N * N);

    auto row = kernel_row(N, mode, r.step_time, 1, nu);
    r.witness_node = N / 4;
    r.data.assign(static_cast<size_t>(N), 0.0);
    for (int j = -3; j <= 3; ++j) {
        double sign = row[static_cast<size_t>(std::abs(j))] >= 0.0 ? 1.0 : -1.0;
        r.data[static_cast<size_t>((r.witness_node + j + N) % N)] = sign;
        if (j >= 0) r.pattern.push_back(sign > 0.0 ? 1 : -1);
    }
    auto stepped = linear_collocation_step(r.data, mode, r.step_time, 1, nu);
    r.witness_value = std::abs(stepped[static_cast<size_t>(r.witness_node)]);
    r.overshoot = r.witness_value - 1.0;
    return r;
}

double smooth_data_overshoot(int N, const std::string& mode, double nu,
                             const std::vector<double>& samples) {
    if (static_cast<int>(samples.size()) != N)
        throw std::invalid_argument("smooth overshoot: need exactly N samples");
    double step_time = 0.25 / (nu * nu * N * N);
    auto stepped = linear_collocation_step(samples, mode, step_time, 1, nu);
    double before = 0.0, after = 0.0;
    for (double v : samples) before = std::max(before, std::abs(v));
    for (double v : stepped) after = std::max(after, std::abs(v));
    return after - before;
}

}  // namespace speclab
