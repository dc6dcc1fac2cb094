#pragma once

#include <array>
#include <vector>

#include "speclab/field.hpp"

namespace speclab {

// One semi-implicit step of the phase-field equation with cutoff-N projection
// of the cubic: (I - tau nu^2 Laplacian) u_next = Pi_N((1+tau) u - tau u^3),
// with the cubic evaluated dealiased (exact convolution).
Field ac_galerkin_imex_step(const Field& u, double nu, double tau, int N);

// Same step on the N-node collocation grid with the cubic taken pointwise.
Field ac_collocation_imex_step(const Field& U, double nu, double tau);

// Strang splitting: half heat step, exact reaction flow, half heat step.
// The reaction flow of z' = z - z^3 over time tau is
// z / sqrt(e^{-2 tau} + (1 - e^{-2 tau}) z^2).
Field ac_strang_step(const Field& U, double nu, double tau);

double reaction_flow(double z, double tau);

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // node values at sample times
    std::vector<double> linf;
    std::vector<double> l2;
    std::vector<double> energy;
    double sup_linf = 0.0;                    // over every accepted internal step
};

// d/dt U = nu^2 Lap_h U + U - U^3 on the collocation grid (adaptive RK).
Trajectory ac_collocation_ode_integrate(const Field& U0, double nu, double T,
                                        int snapshots = 32, double abs_tol = 1e-8,
                                        double rel_tol = 1e-6);

// d/dt u = nu^2 Lap u - Pi_N(u^3 - u) with exact dealiased projection.
Trajectory ac_galerkin_ode_integrate(const Field& u0, double nu, double T, int N,
                                     int snapshots = 32, double abs_tol = 1e-8,
                                     double rel_tol = 1e-6);

// (u_next - u)/tau + Pi_N(u u_x) = nu^2 u_xx(next), dealiased transport term.
Field burgers_galerkin_euler_step(const Field& u, double nu, double tau, int N);

// d/dt U + (1/2) D_h(U^2) = Lap_h U with the aliased pointwise square.
// Diagnostics include the (generally nonzero) pairing <D_h(U^2), U>.
struct BurgersTrajectory {
    Trajectory base;
    std::vector<double> alias_pairing;  // <D_h(U^2), U> at the sample times
};
BurgersTrajectory burgers_collocation_ode_integrate(const Field& U0, double T,
                                                    int snapshots = 32);

// Velocity from vorticity: u = (-d/dy, d/dx) of the stream function solving
// Laplacian psi = omega (so curl u = omega); mean-zero omega required, u has
// zero mean.
std::array<Field, 2> biot_savart(const Field& omega);

// (w_next - w)/tau + Pi_N(u . grad w) = Laplacian w_next, u from biot_savart,
// transport dealiased.
Field nse_vorticity_step(const Field& omega, double tau, int N);

// E(u) = int (1/2) nu^2 |grad u|^2 + (1/4)(u^2 - 1)^2. Galerkin fields use
// Parseval for the gradient and a dealiased quadrature for the quartic;
// collocation fields use the nodal inner product (1/N^d) sum.
double energy(const Field& u, double nu);

// max-principle margin ||u||_inf - bound for diagnostics.
struct StepDiagnostics {
    double linf = 0.0;
    double l2 = 0.0;
    double energy = 0.0;
    double margin = 0.0;
};

StepDiagnostics diagnose(const Field& u, double nu, double reference_bound);

}  // namespace speclab
