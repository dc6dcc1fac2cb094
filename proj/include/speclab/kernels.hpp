#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace speclab {

// Fourier multiplier of (I - beta*Laplacian)^{-s/2} at squared frequency |k|^2.
// s = 2 is the Helmholtz resolvent case.
inline double bessel_multiplier(double beta, double s, double k_sq) {
    const double pi = std::numbers::pi;
    double a = 1.0 + 4.0 * pi * pi * beta * k_sq;
    return s == 2.0 ? 1.0 / a : std::pow(a, -s / 2.0);
}

// Truncated kernel sum_{|k|_inf <= N} (1 + 4 pi^2 beta |k|^2)^{-s/2} e^{2 pi i k.x}
// analyzed on the torus [0,1)^d.
struct KernelProfile {
    int d = 1;
    int N = 0;
    double beta = 1.0;
    double s = 2.0;
    int samples_per_axis = 0;
    std::vector<double> samples;       // row-major values on the scan grid
    double min_value = 0.0;            // refined minimum
    std::array<double, 3> argmin{};    // location of the refined minimum
    double l1_norm = 0.0;
    double mass = 1.0;                 // integral over the torus (the k = 0 term)
    bool positive = false;             // certified verdict
    double certificate_gap = 0.0;      // refined min minus derivative-bound slack
};

struct ThresholdReport {
    double beta = 0.0;
    double formula_N0 = 0.0;           // e^{1/(2 sqrt(beta))} / (2 pi^2 sqrt(beta))
    double log_formula_N0 = 0.0;       // always finite; formula_N0 may overflow
    bool astronomically_large = false; // threshold beyond 2^53: not scanned
    int empirical_N0 = -1;             // smallest N certified positive
    int window_lo = -1;                // certified-negative N range (if any)
    int window_hi = -1;
};

KernelProfile kernel_profile(int d, int N, double beta, double s, int refinement = 1);

// Positivity threshold scan for the Helmholtz kernel (s = 2) at fixed beta.
ThresholdReport positivity_threshold(double beta, int scan_limit = 4096);

struct TailL1 {
    double value = 0.0;        // || K - K_N ||_L1
    double ratio = 0.0;        // value * (1 + beta N^2) / log(N+2)^d
    double reference_error = 0.0;  // bound on the truncation of the reference kernel
};

TailL1 tail_l1_norm(int d, int N, double beta);

// Integral of the full-kernel tail over the torus: exactly 0 (k = 0 excluded).
double tail_mean(int d, int N, double beta);

struct DirichletMasses {
    double pos_measure = 0.0;  // Lebesgue measure of {D_N > 0}, exactly (N+1)/(2N+1)
    double pos_mass = 0.0;     // integral of D_N over {D_N > 0}
    double neg_mass = 0.0;     // integral of -D_N over {D_N < 0}
};

DirichletMasses dirichlet_sign_masses(int N);

// f1(s) = int_0^{3pi/2} xi^{1-s} sin(xi) dxi; its root s* is the positivity
// transition exponent of the scaled Bessel kernels.
double critical_integrand_f1(double s);

struct CriticalExponent {
    double lo = 0.0;           // certified bracket
    double hi = 0.0;
    double f_lo = 0.0;         // f1 at the bracket ends (opposite signs)
    double f_hi = 0.0;
    double value = 0.0;        // midpoint
};

CriticalExponent critical_exponent(double tol);

struct ABetaResult {
    double value = 0.0;            // A_beta(s) = -first_integral - s 2 pi sqrt(beta) second_integral
    double first_integral = 0.0;   // int (|x|^{-s} - <x>^{-s}) dx by quadrature (positive)
    double first_closed_form = 0.0;  // -sqrt(pi) Gamma((s-1)/2) / Gamma(s/2)
    double second_integral = 0.0;  // int <x>^{-s-2} x {x/(2 pi sqrt(beta))} dx
};

ABetaResult a_beta(double beta, double s);

// h_s(y) = int_0^y t^{-s} cos t dt and its limit at infinity.
double h_s(double s, double y);
double h_s_infinity(double s);

struct ScaledKernelValue {
    double finite_N = 0.0;     // N^{-(1-s)} F_{N,s}(y/N)
    double limit = 0.0;        // 2 (2 pi sqrt(beta))^{-s} (2 pi y)^{-(1-s)} h_s(2 pi y)
};

ScaledKernelValue scaled_kernel_limit(int N, double beta, double s, double y);

// Collocation resolvent kernel at the N nodes: the inverse symbol
// 1/(1 + beta^2 (2 pi k)^2) summed over k in (-N/2, N/2] with the Nyquist term
// split between +N/2 and -N/2 (beta = nu sqrt(tau)).
KernelProfile discrete_helmholtz_kernel(int N, double nu, double tau);

// Positivity threshold 4 + e^{1/(2 nu sqrt(tau))} / (pi^2 nu sqrt(tau)).
double discrete_kernel_threshold(double nu, double tau);

// phi_N(1/2) = sum_{-N/2 < k <= N/2} (1 + sigma k^2)^{-1} (-1)^k: the node-1/2
// value of the resolvent collocation kernel with sigma = 4 pi^2 nu^2 tau.
double resolvent_kernel_at_half(int N, double sigma);

// F(z) = e^{-z} int_0^infty e^{-zt} (t + t^2/2)^{-1/2} dt, the radial profile
// behind the d = 1 kernel lower bound; diverges like -c2 log z as z -> 0.
double radial_profile_F(double z);

struct LogFitReport {
    double c1 = 0.0;
    double c2 = 0.0;
    double max_residual = 0.0;
};

// Least-squares fit F(z) ~ c1 - c2 log z over a log-spaced grid of (0, 1/4].
LogFitReport radial_profile_logfit(double z_min, double z_max, int points);

// Second difference c_k - 2 c_{k+1} + c_{k+2} of the Helmholtz multipliers.
double multiplier_second_difference(double beta, int k);

// || G_N - G_infty ||_L1 for the convex coefficient family c_k = k^{-alpha}
// (alpha in {1, 2}, where the limiting kernel has a closed form).
double convex_example_tail_l1(double alpha, int N);

}  // namespace speclab
