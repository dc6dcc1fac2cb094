#include "speclab/schemes.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace speclab {

namespace {

constexpr double pi = std::numbers::pi;

// Visits every coefficient slot with its flat index and signed wavenumbers.
template <class F>
void for_each_slot(const GridSpec& g, F&& fn) {
    std::array<int, 3> m{0, 0, 0};
    std::array<int, 3> k{0, 0, 0};
    const int M = g.M;
    std::int64_t flat = 0;
    int i1_max = g.d > 1 ? M : 1;
    int i2_max = g.d > 2 ? M : 1;
    for (m[0] = 0; m[0] < M; ++m[0]) {
        k[0] = g.wavenumber(m[0]);
        for (m[1] = 0; m[1] < i1_max; ++m[1]) {
            k[1] = g.d > 1 ? g.wavenumber(m[1]) : 0;
            for (m[2] = 0; m[2] < i2_max; ++m[2]) {
                k[2] = g.d > 2 ? g.wavenumber(m[2]) : 0;
                fn(flat++, k);
            }
        }
    }
}

int abs_max(const std::array<int, 3>& k, int d) {
    int v = 0;
    for (int i = 0; i < d; ++i) v = std::max(v, std::abs(k[i]));
    return v;
}

double k_squared(const std::array<int, 3>& k, int d) {
    double v = 0;
    for (int i = 0; i < d; ++i) v += static_cast<double>(k[i]) * k[i];
    return v;
}

void require_step(double tau, const char* who) {
    if (!(tau > 0.0))
        throw std::invalid_argument(std::string(who) + ": time step must be positive");
}

void require_nu(double nu, const char* who) {
    if (!(nu > 0.0)) throw std::invalid_argument(std::string(who) + ": nu must be positive");
}

void require_collocation(const Field& U, const char* who) {
    if (U.grid.convention != Convention::collocation)
        throw std::invalid_argument(std::string(who) + ": expects a collocation field");
}

// The projection schemes form products of up to three degree-N factors, so the
// carrier grid must resolve them alias-free.
void require_dealiased(const Field& u, int N, const char* who) {
    if (u.grid.convention != Convention::galerkin)
        throw std::invalid_argument(std::string(who) + ": expects a galerkin field");
    if (N < 0) throw std::invalid_argument(std::string(who) + ": cutoff must be nonnegative");
    if (u.grid.M < 3 * (2 * N + 1))
        throw std::invalid_argument(std::string(who) +
                                    ": grid too coarse for alias-free products");
}

void require_band_limited(const Field& u, int N, const char* who) {
    double worst = 0.0;
    for_each_slot(u.grid, [&](std::int64_t f, const std::array<int, 3>& k) {
        if (abs_max(k, u.grid.d) > N)
            worst = std::max(worst, std::abs(u.coeffs[static_cast<size_t>(f)]));
    });
    if (worst > 1e-12 * (1.0 + u.linf()))
        throw std::invalid_argument(std::string(who) +
                                    ": initial data carries modes above the cutoff");
}

double helmholtz_multiplier(double beta, double ksq) {
    return 1.0 / (1.0 + 4.0 * pi * pi * beta * ksq);
}

// Half-step heat semigroup e^{nu^2 (tau/2) Lap} on the retained modes.
void heat_half_step(Field& U, double nu, double tau) {
    for_each_slot(U.grid, [&](std::int64_t f, const std::array<int, 3>& k) {
        double a = 4.0 * pi * pi * nu * nu * 0.5 * tau * k_squared(k, U.grid.d);
        U.coeffs[static_cast<size_t>(f)] *= std::exp(-a);
    });
    U.sync_from_coeffs();
}

using State = std::vector<double>;

double nodal_linf(const State& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double nodal_l2(const State& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

// Dense-output dopri5 driver shared by the adaptive integrators. Snapshot
// times are interpolated from the dense output so the step controller never
// has to aim at them; sup_linf tracks every accepted step endpoint.
template <class Rhs>
Trajectory integrate_dense(const State& x0, Rhs&& rhs, double T, int snapshots,
                           double abs_tol, double rel_tol,
                           const std::function<double(const State&)>& energy_of,
                           const std::function<void(double, const State&)>& on_sample) {
    if (!(T > 0.0)) throw std::invalid_argument("integrate: horizon must be positive");
    if (snapshots < 1) throw std::invalid_argument("integrate: need at least one snapshot");
    if (!(abs_tol > 0.0 && rel_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");

    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_dense_output(abs_tol, rel_tol, ode::runge_kutta_dopri5<State>());

    Trajectory out;
    auto record = [&](double t, const State& x) {
        out.times.push_back(t);
        out.states.push_back(x);
        out.linf.push_back(nodal_linf(x));
        out.l2.push_back(nodal_l2(x));
        out.energy.push_back(energy_of(x));
        if (on_sample) on_sample(t, x);
    };
    auto guarded = [&](const State& x, State& dxdt, double t) {
        rhs(x, dxdt, t);
        if (!std::isfinite(dxdt[0]))
            throw std::runtime_error("integrate: state lost finiteness at t = " +
                                     std::to_string(t));
    };

    record(0.0, x0);
    out.sup_linf = nodal_linf(x0);

    stepper.initialize(x0, 0.0, std::min(1e-2, T / 64.0));
    const double min_dt = 1e-14 * std::max(1.0, T);
    State probe(x0.size());
    int next = 1;
    std::int64_t accepted = 0;
    while (next <= snapshots) {
        auto span = stepper.do_step(guarded);
        out.sup_linf = std::max(out.sup_linf, nodal_linf(stepper.current_state()));
        while (next <= snapshots && T * next / snapshots <= span.second) {
            double ts = T * next / snapshots;
            stepper.calc_state(ts, probe);
            record(ts, probe);
            ++next;
        }
        if (stepper.current_time_step() < min_dt)
            throw std::runtime_error("integrate: step size collapsed at t = " +
                                     std::to_string(stepper.current_time()));
        if (++accepted > 20'000'000)
            throw std::runtime_error("integrate: step budget exhausted at t = " +
                                     std::to_string(stepper.current_time()));
    }
    return out;
}

}  // namespace

Field ac_galerkin_imex_step(const Field& u, double nu, double tau, int N) {
    require_dealiased(u, N, "ac_galerkin_imex_step");
    if (u.grid.d > 2)
        throw std::invalid_argument("ac_galerkin_imex_step: fields must be 1- or 2-d");
    require_step(tau, "ac_galerkin_imex_step");
    require_nu(nu, "ac_galerkin_imex_step");
    Field cube = dealiased_cube(u, N);
    Field next(u.grid);
    for_each_slot(u.grid, [&](std::int64_t f, const std::array<int, 3>& k) {
        if (abs_max(k, u.grid.d) > N) return;
        size_t i = static_cast<size_t>(f);
        cplx rhs = (1.0 + tau) * u.coeffs[i] - tau * cube.coeffs[i];
        next.coeffs[i] = rhs * helmholtz_multiplier(tau * nu * nu, k_squared(k, u.grid.d));
    });
    next.sync_from_coeffs();
    return next;
}

Field ac_collocation_imex_step(const Field& U, double nu, double tau) {
    require_collocation(U, "ac_collocation_imex_step");
    require_step(tau, "ac_collocation_imex_step");
    require_nu(nu, "ac_collocation_imex_step");
    Field next(U.grid);
    for (size_t i = 0; i < next.values.size(); ++i) {
        double v = U.values[i];
        next.values[i] = (1.0 + tau) * v - tau * v * v * v;
    }
    next.sync_from_values();
    apply_helmholtz_inverse(next, nu * nu * tau);
    return next;
}

double reaction_flow(double z, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("reaction_flow: time must be nonnegative");
    if (z == 0.0) return z;
    // Written with expm1 so the denominator is exactly 1 at |z| = 1 and stays
    // accurate for small tau; the fixed points 0, +-1 are preserved bitwise.
    double w = -std::expm1(-2.0 * tau);  // 1 - e^{-2 tau}
    double denom = 1.0 + (z * z - 1.0) * w;
    if (denom > 0.0) return z / std::sqrt(denom);
    // Cancellation corner (tiny z with very large tau): integrated form.
    return z * std::exp(tau) / std::sqrt(1.0 + z * z * std::expm1(2.0 * tau));
}

Field ac_strang_step(const Field& U, double nu, double tau) {
    require_collocation(U, "ac_strang_step");
    require_step(tau, "ac_strang_step");
    require_nu(nu, "ac_strang_step");
    Field next = U;
    heat_half_step(next, nu, tau);
    for (auto& v : next.values) v = reaction_flow(v, tau);
    next.sync_from_values();
    heat_half_step(next, nu, tau);
    return next;
}

Trajectory ac_collocation_ode_integrate(const Field& U0, double nu, double T, int snapshots,
                                        double abs_tol, double rel_tol) {
    require_collocation(U0, "ac_collocation_ode_integrate");
    require_nu(nu, "ac_collocation_ode_integrate");
    Field work(U0.grid);
    Field probe(U0.grid);
    const double nu2 = nu * nu;
    auto rhs = [&](const State& x, State& dxdt, double) {
        work.values = x;
        work.sync_from_values();
        apply_laplacian(work);
        for (size_t i = 0; i < x.size(); ++i)
            dxdt[i] = nu2 * work.values[i] + x[i] - x[i] * x[i] * x[i];
    };
    auto energy_of = [&](const State& x) {
        probe.values = x;
        probe.sync_from_values();
        return energy(probe, nu);
    };
    return integrate_dense(U0.values, rhs, T, snapshots, abs_tol, rel_tol, energy_of, nullptr);
}

Trajectory ac_galerkin_ode_integrate(const Field& u0, double nu, double T, int N,
                                     int snapshots, double abs_tol, double rel_tol) {
    require_dealiased(u0, N, "ac_galerkin_ode_integrate");
    if (u0.grid.d > 2)
        throw std::invalid_argument("ac_galerkin_ode_integrate: fields must be 1- or 2-d");
    require_nu(nu, "ac_galerkin_ode_integrate");
    require_band_limited(u0, N, "ac_galerkin_ode_integrate");
    Field work(u0.grid);
    Field r(u0.grid);
    Field probe(u0.grid);
    const double nu2 = nu * nu;
    auto rhs = [&, N](const State& x, State& dxdt, double) {
        work.values = x;
        work.sync_from_values();
        Field cube = dealiased_cube(work, N);
        for_each_slot(u0.grid, [&](std::int64_t f, const std::array<int, 3>& k) {
            size_t i = static_cast<size_t>(f);
            if (abs_max(k, u0.grid.d) > N) {
                r.coeffs[i] = cplx{0.0, 0.0};
                return;
            }
            double lam = 1.0 - 4.0 * pi * pi * nu2 * k_squared(k, u0.grid.d);
            r.coeffs[i] = lam * work.coeffs[i] - cube.coeffs[i];
        });
        r.sync_from_coeffs();
        dxdt = r.values;
    };
    auto energy_of = [&](const State& x) {
        probe.values = x;
        probe.sync_from_values();
        return energy(probe, nu);
    };
    return integrate_dense(u0.values, rhs, T, snapshots, abs_tol, rel_tol, energy_of, nullptr);
}

Field burgers_galerkin_euler_step(const Field& u, double nu, double tau, int N) {
    require_dealiased(u, N, "burgers_galerkin_euler_step");
    if (u.grid.d != 1)
        throw std::invalid_argument("burgers_galerkin_euler_step: 1-d fields only");
    require_step(tau, "burgers_galerkin_euler_step");
    require_nu(nu, "burgers_galerkin_euler_step");
    Field ux = u;
    apply_derivative(ux, 0);
    Field transport = dealiased_product(u, ux, N);
    Field next(u.grid);
    for_each_slot(u.grid, [&](std::int64_t f, const std::array<int, 3>& k) {
        if (abs_max(k, u.grid.d) > N) return;
        size_t i = static_cast<size_t>(f);
        cplx rhs = u.coeffs[i] - tau * transport.coeffs[i];
        next.coeffs[i] = rhs * helmholtz_multiplier(tau * nu * nu, k_squared(k, u.grid.d));
    });
    next.sync_from_coeffs();
    return next;
}

BurgersTrajectory burgers_collocation_ode_integrate(const Field& U0, double T, int snapshots) {
    require_collocation(U0, "burgers_collocation_ode_integrate");
    if (U0.grid.d != 1)
        throw std::invalid_argument("burgers_collocation_ode_integrate: 1-d fields only");
    Field sq(U0.grid);
    Field lap(U0.grid);
    // Leaves D_h(U^2) at the nodes in sq.values (aliased pointwise square).
    auto square_derivative = [&](const State& x) {
        for (size_t i = 0; i < x.size(); ++i) sq.values[i] = x[i] * x[i];
        sq.sync_from_values();
        apply_derivative(sq, 0);
    };
    auto rhs = [&](const State& x, State& dxdt, double) {
        square_derivative(x);
        lap.values = x;
        lap.sync_from_values();
        apply_laplacian(lap);
        for (size_t i = 0; i < x.size(); ++i) dxdt[i] = lap.values[i] - 0.5 * sq.values[i];
    };
    auto energy_of = [](const State& x) {
        double s = nodal_l2(x);
        return 0.5 * s * s;
    };
    BurgersTrajectory out;
    auto on_sample = [&](double, const State& x) {
        square_derivative(x);
        double s = 0.0;
        for (size_t i = 0; i < x.size(); ++i) s += sq.values[i] * x[i];
        out.alias_pairing.push_back(s / static_cast<double>(x.size()));
    };
    out.base = integrate_dense(U0.values, rhs, T, snapshots, 1e-8, 1e-6, energy_of, on_sample);
    return out;
}

std::array<Field, 2> biot_savart(const Field& omega) {
    if (omega.grid.d != 2)
        throw std::invalid_argument("biot_savart: vorticity must be a 2-d field");
    if (std::abs(omega.coeff({0, 0, 0})) > 1e-12 * std::max(1.0, omega.linf()))
        throw std::invalid_argument("biot_savart: vorticity must have zero mean");
    const int M = omega.grid.M;
    Field u1(omega.grid);
    Field u2(omega.grid);
    for_each_slot(omega.grid, [&](std::int64_t f, const std::array<int, 3>& k) {
        size_t i = static_cast<size_t>(f);
        double ksq = k_squared(k, 2);
        // Derivative-type multipliers drop the ambiguous Nyquist pair (same
        // convention as the spectral derivative); zero anyway on band-limited
        // input.
        bool nyquist = M % 2 == 0 && (k[0] == M / 2 || k[1] == M / 2);
        if (ksq == 0.0 || nyquist) return;
        cplx w = omega.coeffs[i];
        u1.coeffs[i] = cplx(0.0, k[1] / (2.0 * pi * ksq)) * w;
        u2.coeffs[i] = cplx(0.0, -k[0] / (2.0 * pi * ksq)) * w;
    });
    u1.sync_from_coeffs();
    u2.sync_from_coeffs();
    return {u1, u2};
}

Field nse_vorticity_step(const Field& omega, double tau, int N) {
    require_dealiased(omega, N, "nse_vorticity_step");
    if (omega.grid.d != 2)
        throw std::invalid_argument("nse_vorticity_step: vorticity must be a 2-d field");
    require_step(tau, "nse_vorticity_step");
    auto u = biot_savart(omega);
    Field wx = omega;
    apply_derivative(wx, 0);
    Field wy = omega;
    apply_derivative(wy, 1);
    Field t1 = dealiased_product(u[0], wx, N);
    Field t2 = dealiased_product(u[1], wy, N);
    Field next(omega.grid);
    for_each_slot(omega.grid, [&](std::int64_t f, const std::array<int, 3>& k) {
        if (abs_max(k, 2) > N) return;
        size_t i = static_cast<size_t>(f);
        cplx rhs = omega.coeffs[i] - tau * (t1.coeffs[i] + t2.coeffs[i]);
        next.coeffs[i] = rhs * helmholtz_multiplier(tau, k_squared(k, 2));
    });
    next.sync_from_coeffs();
    return next;
}

double energy(const Field& u, double nu) {
    // Gradient term by Parseval over the retained modes; for collocation this
    // equals the nodal norm of the discrete gradient with Nyquist included,
    // the same operator the implicit solves invert. The quartic is a nodal
    // sum, exact for band-limited fields since M > 4N.
    double grad = 0.0;
    for_each_slot(u.grid, [&](std::int64_t f, const std::array<int, 3>& k) {
        grad += 4.0 * pi * pi * k_squared(k, u.grid.d) * std::norm(u.coeffs[static_cast<size_t>(f)]);
    });
    double pot = 0.0;
    for (double v : u.values) {
        double w = v * v - 1.0;
        pot += w * w;
    }
    pot /= 4.0 * static_cast<double>(u.values.size());
    return 0.5 * nu * nu * grad + pot;
}

StepDiagnostics diagnose(const Field& u, double nu, double reference_bound) {
    StepDiagnostics d;
    d.linf = u.linf();
    d.l2 = u.l2();
    d.energy = energy(u, nu);
    d.margin = d.linf - reference_bound;
    return d;
}

}  // namespace speclab
