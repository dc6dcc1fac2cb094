#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

namespace speclab {

// Adaptive Gauss-Kronrod on a finite interval (smooth integrands).
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, 15, tol);
}

// tanh-sinh: tolerates integrable endpoint singularities.
template <class F>
double integrate_singular(F&& f, double a, double b, double tol = 1e-12) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(std::forward<F>(f), a, b, tol);
}

// exp-sinh on [a, infinity) for decaying integrands.
template <class F>
double integrate_halfline(F&& f, double a, double tol = 1e-12) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate(std::forward<F>(f), a, std::numeric_limits<double>::infinity(), tol);
}

// Fixed-order Gauss on `panels` equal subintervals. Non-adaptive: safe for
// integrals whose value is near zero (adaptive relative-error schemes never
// converge there) provided the panel count resolves the integrand's frequency.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels) {
    if (panels < 1) panels = 1;
    double h = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p)
        acc += boost::math::quadrature::gauss<double, 15>::integrate(f, a + p * h, a + (p + 1) * h);
    return acc;
}

// Root of f on a bracketing interval [a, b] with f(a) f(b) <= 0, refined until
// the bracket width drops below `width`. Returns the bracket (lo, hi).
template <class F>
std::pair<double, double> bracket_root(F&& f, double a, double b, double width) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return {a, a};
    if (fb == 0.0) return {b, b};
    if ((fa > 0) == (fb > 0)) throw std::invalid_argument("bracket_root: endpoints do not bracket");
    auto stop = [width](double lo, double hi) { return hi - lo <= width; };
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(std::forward<F>(f), a, b, fa, fb, stop, iters);
    return {r.first, r.second};
}

}  // namespace speclab
