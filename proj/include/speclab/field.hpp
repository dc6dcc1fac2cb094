#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "speclab/grid.hpp"

namespace speclab {

using cplx = std::complex<double>;

// A real periodic field on [0,1)^d held in both representations:
//   values: row-major samples at x_j = j/M per axis,
//   coeffs: normalized DFT, coeffs[slot(k)] = (1/M^d) sum_j values_j e^{-2 pi i k.j/M}.
// The two views are kept in sync by sync_from_values / sync_from_coeffs.
struct Field {
    GridSpec grid;
    std::vector<cplx> coeffs;
    std::vector<double> values;

    explicit Field(const GridSpec& g);

    std::int64_t size() const { return grid.points(); }

    // Row-major flattening helpers (index per axis in [0, M)).
    std::int64_t flat(const std::array<int, 3>& idx) const;

    void sync_from_values();
    void sync_from_coeffs();

    // Coefficient of the signed wavenumber vector (components |k| <= M/2).
    cplx coeff(const std::array<int, 3>& k) const;
    void set_coeff(const std::array<int, 3>& k, cplx v);

    double linf() const;
    double l2() const;         // sqrt((1/M^d) sum |values|^2)
    double coeff_l2() const;   // sqrt(sum |coeffs|^2), equals l2() by Parseval
    double mean() const;

    // Max departure from conjugate symmetry c_{-k} = conj(c_k); 0 for real data.
    double hermitian_defect() const;

    // Forces exact conjugate symmetry (averages the paired entries).
    void enforce_hermitian();
};

Field field_from_function(const GridSpec& g,
                          const std::function<double(double, double, double)>& f);

// Zeroes every coefficient with |k|_inf > N. Throws if N exceeds what the grid
// resolves unambiguously.
void project_galerkin(Field& u, int N);

// Trigonometric interpolant of a collocation field evaluated off-grid.
// Wavenumbers (-N/2, N/2) contribute e^{2 pi i k.x}; the Nyquist coefficient
// contributes cos(pi N x) per axis so the result is real and matches the nodal
// values exactly. d = 1 only for off-grid evaluation.
double collocation_eval(const Field& u, double x);

// (I - beta * Laplacian)^{-1} restricted to the retained modes: multiplies
// coeff(k) by 1 / (1 + 4 pi^2 beta |k|^2). beta must be positive.
void apply_helmholtz_inverse(Field& u, double beta);

// Spectral derivative along axis `ax`: multiplier 2 pi i k. On collocation
// grids the Nyquist mode is zeroed (the derivative of cos(pi N x) vanishes at
// every node, and this keeps the result real).
void apply_derivative(Field& u, int ax);

// Spectral Laplacian: multiplier -4 pi^2 |k|^2 (Nyquist included).
void apply_laplacian(Field& u);

// Pointwise product of two band-limited fields, projected back to |k|_inf <= N
// with the aliasing terms removed exactly (inputs must live on a grid with
// M >= 3(2N+1); the product of two degree-N fields has degree 2N < M - N).
Field dealiased_product(const Field& a, const Field& b, int N);

// Pointwise cube with exact truncation to |k|_inf <= N; M >= 3(2N+1) makes the
// degree-3N product alias-free over the kept band.
Field dealiased_cube(const Field& u, int N);

// L-infinity norm of the underlying trigonometric polynomial, estimated by
// resampling the retained modes on a finer grid (>= 8x oversampling).
double oversampled_linf(const Field& u, int N);

}  // namespace speclab
