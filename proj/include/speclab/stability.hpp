#pragma once

#include <string>
#include <vector>

namespace speclab {

// The cubic stage map g(z) = (1+tau) z - tau z^3 that one implicit-diffusion /
// explicit-reaction step applies to the solution amplitude.
double cubic_map(double tau, double x);

struct EnvelopeReport {
    double tau = 0.0;
    double alpha = 0.0;
    double envelope = 0.0;       // max over |x| <= alpha of |g(x)|, closed form
    double sampled = 0.0;        // dense-sampling cross-check
    double x_c = 0.0;            // interior critical point sqrt((1+tau)/(3 tau))
    double g_xc = 0.0;           // (2/3) (1+tau)^{3/2} / sqrt(3 tau)
    double x_zero = 0.0;         // positive root sqrt((1+tau)/tau) of g
    double x_neg = 0.0;          // sqrt((2+tau)/tau): where g(x) = -x
    double x_fix = 0.0;          // sqrt(1 + 2/tau): where |g(x)| = x again
};

EnvelopeReport cubic_envelope(double tau, double alpha);

struct IterationReport {
    std::vector<double> alphas;  // alpha_0 ... alpha_n
    bool diverged = false;       // overflow or growth past 1e50
    int exceeds_1e3_at = -1;     // first index with alpha_n > 1e3
    bool sandwich_ok = false;    // alpha_n within the geometric-decay bounds
    double final_value = 0.0;
};

// alpha_{k+1} = max_{|x| <= alpha_k} |g(x)| + eta.
IterationReport prototype_iteration(double tau, double eta, double alpha0, int n_max);

struct Tau1Report {
    double root = 0.0;           // solution of 1/2 + 1/x = (3/2) g(x_c)^2 in (1/2, 1)
    double closed_form = 0.0;    // (-2 + cbrt(9-3 sqrt6) + cbrt(9+3 sqrt6)) / 2
    double residual = 0.0;       // defining equation at the root
    bool grid_inequality_ok = false;  // 1/2 + 1/tau >= (3/2)(g(x_c)+1e-5)^2 on [0.5, 0.86]
};

Tau1Report tau1_root();

struct Tau2Witness {
    double nu = 0.0;
    int N = 0;
    double delta = 0.0;          // perturbation size actually used
    double u0_linf = 0.0;        // stays <= sqrt(2)
    double u1_linf = 0.0;
    double overshoot = 0.0;      // u1_linf - sqrt(2), positive
    double kernel_min = 0.0;     // min of the Helmholtz kernel at beta = 2 nu^2
    double identity_value = 0.0; // (T eta)(0) = int (K^-)^2 > 0
};

// One tau = 2 Galerkin step from u0 = sqrt(2) + delta * eta with eta = -K_N^-
// (minus the negative part of the Helmholtz kernel at beta = 2 nu^2).
// Throws std::runtime_error("window mismatch") if that kernel has no negative
// part at this (nu, N).
Tau2Witness counterexample_tau2(double nu, int N);

struct AmplificationTable {
    std::string mode;            // "heat" or "resolvent"
    int N = 0;
    double time = 0.0;           // t (heat) or tau (resolvent)
    int n = 1;                   // resolvent power
    double nu = 1.0;
    double k_param = 0.0;        // k0 = 2 N nu sqrt(t) or k1 = N nu sqrt(tau)
    double b = 0.0;              // pi^2 k0^2 / 4 (heat only)
    std::vector<double> beta_j;  // limit coefficients, j = 0, 1, ...
    std::vector<double> kernel_row;  // h_j = (1/N) Q_j for j = 0..N-1
    double total = 0.0;          // sum_j |h_j| = A_{N,t} or B_{N,n}
    double closed_form = 0.0;    // heat, b <= 1/2 only
    bool closed_form_valid = false;
};

// A_{N,t}: l1 mass of one exact heat collocation step (multipliers
// e^{-4 pi^2 nu^2 t k^2}), with the limit profile beta_j = int_0^1 e^{-b s^2}
// cos(pi j s) ds at b = pi^2 k0^2 / 4.
AmplificationTable heat_amplification(int N, double t, double nu, int n_beta = 9);

// beta_0 + 2 sum_{j>=1} |beta_j| summed term by term, with the j^{-2}
// coefficient tail estimated in closed form. For b <= 1/2 this equals the
// heat closed form 2 int_0^1 e^{-b s^2} ds - e^{-b}.
double heat_coefficient_l1_sum(double b, int terms = 400);

// B_{N,n}: l1 mass of the n-fold resolvent collocation step (multipliers
// (1 + 4 pi^2 nu^2 tau k^2)^{-n}), with the n = 1 limit profile
// beta_j = int_0^1 (1 + (k1 pi s)^2)^{-1} cos(pi j s) ds.
AmplificationTable resolvent_amplification(int N, double tau, int n, double nu, int n_beta = 9);

struct AdversarialReport {
    std::string mode;
    int N = 0;
    double nu = 1.0;
    double step_time = 0.0;          // t_m or tau_m actually used
    std::vector<double> data;        // node values, |data| <= 1
    int witness_node = 0;
    double witness_value = 0.0;      // |one-step value| at the witness node
    double overshoot = 0.0;          // witness_value - 1
    std::vector<int> pattern;        // signs placed around the witness
};

// Worst-case bounded node data for one linear heat / resolvent collocation
// step: the sign pattern of the kernel row around node l = floor(N/4), zeros in
// a buffer of width floor(N^{1/3}), zeros elsewhere. The step time puts the
// similarity parameter at k0 = 1 (heat) / k1 = 1/2 (resolvent), where the
// kernel row's l1 mass exceeds 1.001.
AdversarialReport adversarial_data(int N, const std::string& mode, double nu = 1.0);

// Same one-step amplification applied to samples of a smooth function: returns
// max_j |step(f(nodes))_j| - max|f| for f(x) = sin(2 pi x)-type inputs.
double smooth_data_overshoot(int N, const std::string& mode, double nu,
                             const std::vector<double>& samples);

// One linear collocation step (heat at time t, or n-fold resolvent at step tau)
// applied to node data.
std::vector<double> linear_collocation_step(const std::vector<double>& data,
                                            const std::string& mode, double time,
                                            int n, double nu);

}  // namespace speclab
