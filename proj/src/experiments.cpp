#include "speclab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

#include "speclab/expr.hpp"
#include "speclab/field.hpp"
#include "speclab/kernels.hpp"
#include "speclab/rng.hpp"
#include "speclab/schemes.hpp"
#include "speclab/stability.hpp"

namespace speclab {
namespace {

using json = nlohmann::json;
constexpr double pi = std::numbers::pi;

const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// small utilities
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& field, const std::string& text) {
    std::vector<std::string> items;
    std::string cur;
    std::stringstream ss(text);
    while (std::getline(ss, cur, ',')) {
        std::string t = trim(cur);
        if (t.empty()) throw std::invalid_argument(field + ": empty list entry in '" + text + "'");
        items.push_back(t);
    }
    if (items.empty()) throw std::invalid_argument(field + ": empty list");
    return items;
}

double parse_real(const std::string& field, const std::string& text) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (trim(text.substr(pos)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(field + ": expected a number, got '" + text + "'");
}

long long parse_int(const std::string& field, const std::string& text) {
    try {
        size_t pos = 0;
        long long v = std::stoll(text, &pos);
        if (trim(text.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(field + ": expected an integer, got '" + text + "'");
}

std::vector<double> parse_real_list(const std::string& field, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(field, text)) out.push_back(parse_real(field, item));
    return out;
}

std::vector<long long> parse_int_list(const std::string& field, const std::string& text) {
    std::vector<long long> out;
    for (const auto& item : split_list(field, text)) out.push_back(parse_int(field, item));
    return out;
}

// CSV assembly with the canonical decimal form for every floating cell.
class Csv {
  public:
    explicit Csv(const std::string& header) { text_ = header + "\n"; }
    Csv& cell(double v) { return raw(format_double(v)); }
    Csv& cell(long long v) { return raw(std::to_string(v)); }
    Csv& cell(int v) { return raw(std::to_string(v)); }
    Csv& cell(const std::string& v) { return raw(v); }
    void end_row() {
        for (size_t i = 0; i < row_.size(); ++i) {
            if (i) text_ += ',';
            text_ += row_[i];
        }
        text_ += '\n';
        row_.clear();
    }
    const std::string& str() const { return text_; }

  private:
    Csv& raw(std::string s) {
        row_.push_back(std::move(s));
        return *this;
    }
    std::string text_;
    std::vector<std::string> row_;
};

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    int workers = std::max(1, threads);
    workers = static_cast<int>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// experiment registry
// ---------------------------------------------------------------------------

enum class Kind { real, integer, text, real_list, int_list, expression };

struct Param {
    std::string key;
    Kind kind;
    std::string preset;
};

struct Ctx {
    const Config& cfg;
    std::uint64_t seed = 0;
    int threads = 1;
    json verdicts = json::object();
    json values = json::object();
    json fits = json::object();
    std::vector<std::pair<std::string, std::string>> tables = {};

    double real(const std::string& k) const { return cfg.get_double("params", k); }
    long long integer(const std::string& k) const { return cfg.get_int("params", k); }
    std::string text(const std::string& k) const { return cfg.get("params", k); }
    std::vector<double> reals(const std::string& k) const {
        return parse_real_list("params." + k, cfg.get("params", k));
    }
    std::vector<long long> ints(const std::string& k) const {
        return parse_int_list("params." + k, cfg.get("params", k));
    }
    std::vector<std::string> texts(const std::string& k) const {
        return split_list("params." + k, cfg.get("params", k));
    }

    void value(const std::string& name, double v) { values[name] = v; }
    void verdict(const std::string& name, bool v) { verdicts[name] = v; }
    void fit(const std::string& name, const DecayFit& f) {
        fits[name] = {{"slope", f.fit.slope},
                      {"intercept", f.fit.intercept},
                      {"r2", f.fit.r2},
                      {"n_used", f.n_used}};
    }
    void table(const std::string& name, const Csv& csv) { tables.emplace_back(name, csv.str()); }
};

struct Def {
    std::string name;
    std::string doc;
    std::vector<Param> params;
    std::function<void(Ctx&)> run;
};

void require(bool cond, const std::string& message) {
    if (!cond) throw std::invalid_argument(message);
}

// ---------------------------------------------------------------------------
// shared constructions
// ---------------------------------------------------------------------------

// Fixed phase tables for the lacunary (Hoelder-1/2) data family.
const double kPhase1[16] = {0.19, 2.77, 1.31, 4.92, 0.63, 3.58, 5.11, 1.97,
                            2.41, 0.88, 4.17, 3.02, 5.73, 1.53, 2.09, 4.46};
const double kPhase2[16] = {1.07, 3.94, 0.52, 2.33, 5.21, 1.66, 4.08, 0.29,
                            2.95, 5.47, 1.12, 3.61, 0.74, 4.83, 2.18, 5.91};

double lacunary1(double x, int levels) {
    double s = 0.0;
    for (int j = 0; j < levels; ++j) {
        double k = std::pow(2.0, j);
        s += std::pow(2.0, -0.5 * j) * std::cos(2 * pi * k * x + kPhase1[j]);
    }
    return 0.35 * s;
}

double lacunary2(double x, double y, int levels) {
    double s = 0.0;
    for (int j = 0; j < levels; ++j) {
        double k = std::pow(2.0, j);
        s += std::pow(2.0, -0.5 * j) * std::cos(2 * pi * k * x + kPhase1[j]) *
             std::cos(2 * pi * k * y + kPhase2[j]);
    }
    return 0.35 * s;
}

Field expression_field(const GridSpec& g, const std::string& text) {
    auto f = parse_expression(text);
    return field_from_function(g, [f](double x, double y, double) { return f(x, y); });
}

void check_finite(double v, int step) {
    if (!std::isfinite(v)) {
        throw std::runtime_error("solution lost finiteness at step " + std::to_string(step));
    }
}

// ---------------------------------------------------------------------------
// runners
// ---------------------------------------------------------------------------

void run_critical_exponent(Ctx& c) {
    double tol = c.real("tol");
    require(tol > 0.0 && tol <= 1e-3, "params.tol: must be in (0, 1e-3]");
    auto ce = critical_exponent(tol);
    double f_left = critical_integrand_f1(0.308443);
    double f_right = critical_integrand_f1(0.308444);

    c.value("s_star", ce.value);
    c.value("bracket_lo", ce.lo);
    c.value("bracket_hi", ce.hi);
    c.value("f1_bracket_lo", ce.f_lo);
    c.value("f1_bracket_hi", ce.f_hi);
    c.value("f1_at_0.308443", f_left);
    c.value("f1_at_0.308444", f_right);

    c.verdict("root_in_window", ce.value > 0.308443 && ce.value < 0.308444);
    c.verdict("left_end_value", std::abs(f_left - (-1.92202e-6)) <= 1e-9);
    c.verdict("right_end_value", std::abs(f_right - 5.43492e-7) <= 1e-9);

    Csv t("s,f1");
    for (int i = 0; i <= 40; ++i) {
        double s = 0.300 + 0.0005 * i;
        t.cell(s).cell(critical_integrand_f1(s));
        t.end_row();
    }
    c.table("integrand", t);
}

void run_stability_root(Ctx& c) {
    auto r = tau1_root();
    double reference = 0.860018;

    c.value("root", r.root);
    c.value("closed_form", r.closed_form);
    c.value("residual", r.residual);

    c.verdict("near_reference", std::abs(r.root - reference) <= 1e-6);
    c.verdict("matches_closed_form", std::abs(r.root - r.closed_form) <= 1e-12);
    c.verdict("grid_inequality", r.grid_inequality_ok);

    Csv t("tau,g_xc,margin_gap");
    for (int i = 0; i <= 50; ++i) {
        double tau = 0.50 + 0.01 * i;
        auto e = cubic_envelope(tau, 1.0);
        double gap = 0.5 + 1.0 / tau - 1.5 * e.g_xc * e.g_xc;
        t.cell(tau).cell(e.g_xc).cell(gap);
        t.end_row();
    }
    c.table("envelope", t);
}

void run_heat_table(Ctx& c) {
    int N = static_cast<int>(c.integer("n"));
    double nu = c.real("nu");
    double k0 = c.real("k0");
    int n_beta = static_cast<int>(c.integer("n_beta"));
    require(N >= 4, "params.n: must be at least 4");
    require(nu > 0.0, "params.nu: must be positive");
    require(k0 > 0.0, "params.k0: must be positive");
    require(n_beta >= 4, "params.n_beta: must be at least 4");

    double t_step = k0 * k0 / (4.0 * nu * nu * static_cast<double>(N) * N);
    auto a = heat_amplification(N, t_step, nu, n_beta);

    const double refs[4] = {0.54934, 0.219568, 0.0031275, 0.00413676};
    double sum3 = a.beta_j[0] + 2.0 * (a.beta_j[1] + a.beta_j[2] + a.beta_j[3]);
    for (int j = 0; j <= 3; ++j) {
        c.value("beta_" + std::to_string(j), a.beta_j[static_cast<size_t>(j)]);
        c.verdict("beta_" + std::to_string(j) + "_matches",
                  std::abs(a.beta_j[static_cast<size_t>(j)] - refs[j]) < 1e-5);
    }
    c.value("partial_sum_3", sum3);
    c.value("kernel_l1_mass", a.total);
    c.value("k0", a.k_param);
    c.value("b", a.b);
    c.verdict("partial_sum_exceeds_one", sum3 >= 1.002);

    Csv t("j,beta,kernel_row");
    for (int j = 0; j < n_beta; ++j) {
        t.cell(static_cast<long long>(j))
            .cell(a.beta_j[static_cast<size_t>(j)])
            .cell(a.kernel_row[static_cast<size_t>(j)]);
        t.end_row();
    }
    c.table("coefficients", t);
}

void run_resolvent_table(Ctx& c) {
    int N = static_cast<int>(c.integer("n"));
    double nu = c.real("nu");
    double k1 = c.real("k1");
    int power = static_cast<int>(c.integer("power"));
    int n_beta = static_cast<int>(c.integer("n_beta"));
    require(N >= 4, "params.n: must be at least 4");
    require(nu > 0.0, "params.nu: must be positive");
    require(k1 > 0.0, "params.k1: must be positive");
    require(power >= 1, "params.power: must be at least 1");
    require(n_beta >= 5, "params.n_beta: must be at least 5");

    double tau = k1 * k1 / (nu * nu * static_cast<double>(N) * N);
    auto a = resolvent_amplification(N, tau, power, nu, n_beta);

    const double refs[5] = {0.639093, 0.165881, 0.00883796, 0.00691018, -0.00220351};
    double sum3 = a.beta_j[0] +
                  2.0 * (std::abs(a.beta_j[1]) + std::abs(a.beta_j[2]) + std::abs(a.beta_j[3]));
    for (int j = 0; j <= 4; ++j) {
        c.value("beta_" + std::to_string(j), a.beta_j[static_cast<size_t>(j)]);
        c.verdict("beta_" + std::to_string(j) + "_matches",
                  std::abs(a.beta_j[static_cast<size_t>(j)] - refs[j]) < 1e-5);
    }
    c.value("abs_sum_3", sum3);
    c.value("kernel_l1_mass", a.total);
    c.value("k1", a.k_param);
    c.verdict("abs_sum_exceeds_one", sum3 > 1.0023);

    Csv t("j,beta,kernel_row");
    for (int j = 0; j < n_beta; ++j) {
        t.cell(static_cast<long long>(j))
            .cell(a.beta_j[static_cast<size_t>(j)])
            .cell(a.kernel_row[static_cast<size_t>(j)]);
        t.end_row();
    }
    c.table("coefficients", t);
}

void run_heat_closed_form(Ctx& c) {
    auto bs = c.reals("b_list");
    int N = static_cast<int>(c.integer("n"));
    int n_beta = static_cast<int>(c.integer("n_beta"));
    double tol = c.real("tolerance");
    require(N >= 4, "params.n: must be at least 4");
    require(n_beta >= 4, "params.n_beta: must be at least 4");
    for (double b : bs)
        require(b > 0.0 && b <= 0.5, "params.b_list: entries must lie in (0, 1/2]");

    Csv t("b,closed_form,coefficient_sum,kernel_mass,coefficient_err,kernel_err");
    double max_coeff_err = 0.0, max_kernel_err = 0.0;
    for (double b : bs) {
        double k0 = 2.0 * std::sqrt(b) / pi;
        auto a = heat_amplification(N, k0 * k0 / (4.0 * static_cast<double>(N) * N), 1.0, n_beta);
        if (!a.closed_form_valid)
            throw std::runtime_error("closed form unavailable at b = " + format_double(b));
        double series = heat_coefficient_l1_sum(b);
        double ce = std::abs(a.closed_form - series);
        double ke = std::abs(a.closed_form - a.total);
        max_coeff_err = std::max(max_coeff_err, ce);
        max_kernel_err = std::max(max_kernel_err, ke);
        t.cell(b).cell(a.closed_form).cell(series).cell(a.total).cell(ce).cell(ke);
        t.end_row();
    }
    c.value("max_coefficient_err", max_coeff_err);
    c.value("max_kernel_err", max_kernel_err);
    c.verdict("closed_form_matches_series", max_coeff_err <= tol);
    c.table("closed-form", t);
}

void run_kernel_window(Ctx& c) {
    double beta = c.real("beta");
    double s = c.real("s");
    double lo = c.real("window_lo");
    double hi = c.real("window_hi");
    require(beta > 0.0, "params.beta: must be positive");
    require(s > 0.0 && s < 1.0, "params.s: must lie in (0, 1)");

    auto r = a_beta(beta, s);
    c.value("a_beta", r.value);
    c.value("neg_a_beta", -r.value);
    c.value("first_integral", r.first_integral);
    c.value("first_closed_form", r.first_closed_form);
    c.value("second_integral", r.second_integral);

    c.verdict("in_window", -r.value >= lo && -r.value <= hi);
    c.verdict("gamma_identity", std::abs(r.first_integral - r.first_closed_form) <= 1e-6);

    Csv t("s,neg_a_beta");
    for (int i = 2; i <= 18; ++i) {
        double si = 0.05 * i;
        t.cell(si).cell(-a_beta(beta, si).value);
        t.end_row();
    }
    c.table("window", t);
}

void run_projection_overshoot(Ctx& c) {
    double delta = c.real("delta");
    double nu = c.real("nu");
    double tau = c.real("tau");
    int N = static_cast<int>(c.integer("n"));
    require(delta > 0.0 && delta < 0.5, "params.delta: must lie in (0, 1/2)");

    auto g = GridSpec::make_galerkin(1, N);
    Field u0 = field_from_function(g, [&](double x, double, double) {
        double cx = std::cos(2 * pi * x);
        return 1.0 - 2.0 * delta * cx * cx;
    });
    Field u1 = ac_galerkin_imex_step(u0, nu, tau, N);
    double overshoot = -1e300;
    for (double v : u1.values) overshoot = std::max(overshoot, v - 1.0);
    double threshold = 0.375 * delta * delta;

    c.value("overshoot", overshoot);
    c.value("quadratic_threshold", threshold);
    c.value("initial_linf", u0.linf());
    c.value("polynomial_sup", oversampled_linf(u1, N));
    c.verdict("initial_bounded", u0.linf() <= 1.0 + 1e-12);
    c.verdict("exceeds_quadratic_threshold", overshoot > threshold);

    Csv t("x,u0,u1");
    for (int j = 0; j < g.M; ++j) {
        t.cell(static_cast<double>(j) / g.M)
            .cell(u0.values[static_cast<size_t>(j)])
            .cell(u1.values[static_cast<size_t>(j)]);
        t.end_row();
    }
    c.table("profile", t);
}

void run_tau2_counterexample(Ctx& c) {
    double nu = c.real("nu");
    int N = static_cast<int>(c.integer("n"));
    auto w = counterexample_tau2(nu, N);
    double bound = std::sqrt(2.0);

    c.value("delta", w.delta);
    c.value("u0_linf", w.u0_linf);
    c.value("u1_linf", w.u1_linf);
    c.value("overshoot", w.overshoot);
    c.value("kernel_min", w.kernel_min);
    c.value("identity_value", w.identity_value);
    c.verdict("initial_within_bound", w.u0_linf <= bound + 1e-12);
    c.verdict("exceeds_bound", w.u1_linf > bound);

    Csv t("nu,n,delta,u0_linf,u1_linf,overshoot,kernel_min");
    t.cell(nu).cell(static_cast<long long>(N)).cell(w.delta).cell(w.u0_linf).cell(w.u1_linf)
        .cell(w.overshoot).cell(w.kernel_min);
    t.end_row();
    c.table("witness", t);
}

void run_sharp_max(Ctx& c) {
    double nu = c.real("nu");
    double tau = c.real("tau");
    int N = static_cast<int>(c.integer("n"));
    int trials = static_cast<int>(c.integer("trials"));
    int steps = static_cast<int>(c.integer("steps"));
    require(trials >= 1, "params.trials: must be at least 1");
    require(steps >= 1, "params.steps: must be at least 1");

    auto g = GridSpec::make_collocation(1, N);
    CounterRng rng(c.seed);
    long long violations = 0;
    double worst = 0.0;
    Csv t("trial,max_linf");
    for (int trial = 0; trial < trials; ++trial) {
        Field u(g);
        for (size_t j = 0; j < u.values.size(); ++j) {
            u.values[j] = rng.symmetric(static_cast<std::uint64_t>(trial) * 1000003ULL + j);
        }
        u.sync_from_values();
        double mx = 0.0;
        for (int n = 0; n < steps; ++n) {
            u = ac_collocation_imex_step(u, nu, tau);
            double m = u.linf();
            mx = std::max(mx, m);
            if (m > 1.0) ++violations;
        }
        worst = std::max(worst, mx);
        t.cell(static_cast<long long>(trial)).cell(mx);
        t.end_row();
    }
    c.value("violations", static_cast<double>(violations));
    c.value("worst_linf", worst);
    c.value("trials", trials);
    c.value("steps", steps);
    c.verdict("bound_never_violated", violations == 0);
    c.verdict("bound_exercised", worst > 0.5);
    c.table("trial-maxima", t);
}

void run_blowup(Ctx& c) {
    double tau = c.real("tau");
    double nu = c.real("nu");
    int N = static_cast<int>(c.integer("n"));
    double u0 = c.real("u0");
    int max_steps = static_cast<int>(c.integer("max_steps"));
    double threshold = c.real("threshold");
    require(max_steps >= 1, "params.max_steps: must be at least 1");

    auto g = GridSpec::make_galerkin(1, N);
    Field u = field_from_function(g, [&](double, double, double) { return u0; });
    double alpha = u0;
    int crossing = -1;
    double rec_err = 0.0;
    double last = u.linf();
    Csv t("step,linf,scalar_map");
    t.cell(0LL).cell(last).cell(std::abs(alpha));
    t.end_row();
    for (int n = 1; n <= max_steps; ++n) {
        u = ac_galerkin_imex_step(u, nu, tau, N);
        alpha = cubic_map(tau, alpha);
        last = u.linf();
        rec_err = std::max(rec_err,
                           std::abs(last - std::abs(alpha)) / std::max(1.0, std::abs(alpha)));
        t.cell(static_cast<long long>(n)).cell(last).cell(std::abs(alpha));
        t.end_row();
        if (last > threshold) {
            crossing = n;
            break;
        }
    }
    c.value("crossing_step", crossing);
    c.value("final_linf", last);
    c.value("recursion_rel_err", rec_err);
    c.value("threshold", threshold);
    c.verdict("escapes_within_budget", crossing >= 1 && crossing <= max_steps);
    c.verdict("matches_scalar_map", rec_err <= 1e-10);
    c.table("escape", t);
}

void run_energy_monotone(Ctx& c) {
    double nu = c.real("nu");
    int N = static_cast<int>(c.integer("n"));
    int steps = static_cast<int>(c.integer("steps"));
    auto tau_items = c.texts("tau_list");
    double amp = c.real("amplitude");
    double tol = c.real("tolerance");
    require(steps >= 1, "params.steps: must be at least 1");

    auto g = GridSpec::make_galerkin(1, N);
    Field u0 = field_from_function(g, [&](double x, double, double) {
        return amp * std::sin(2 * pi * x) * std::cos(6 * pi * x);
    });
    double sup = u0.linf();
    bool all_ok = true;
    for (const auto& item : tau_items) {
        double tau = parse_real("params.tau_list", item);
        Field u = u0;
        double prev = energy(u, nu);
        long long increases = 0;
        double max_inc = -1e300;
        Csv t("step,t,linf,l2,energy,margin");
        auto d0 = diagnose(u, nu, 1.0);
        t.cell(0LL).cell(0.0).cell(d0.linf).cell(d0.l2).cell(d0.energy).cell(d0.margin);
        t.end_row();
        for (int n = 1; n <= steps; ++n) {
            u = ac_galerkin_imex_step(u, nu, tau, N);
            auto d = diagnose(u, nu, 1.0);
            check_finite(d.linf, n);
            double inc = d.energy - prev;
            if (inc > tol) ++increases;
            max_inc = std::max(max_inc, inc);
            prev = d.energy;
            sup = std::max(sup, d.linf);
            t.cell(static_cast<long long>(n)).cell(n * tau).cell(d.linf).cell(d.l2)
                .cell(d.energy).cell(d.margin);
            t.end_row();
        }
        c.value("increases_tau_" + item, static_cast<double>(increases));
        c.value("max_increase_tau_" + item, max_inc);
        c.verdict("monotone_tau_" + item, increases == 0);
        all_ok = all_ok && increases == 0;
        c.table("energy-tau-" + item, t);
    }
    c.value("sup_linf", sup);
    c.verdict("all_monotone", all_ok);
}

void run_margin_decay(Ctx& c) {
    auto n_list = c.ints("n_list");
    double g_nu = c.real("galerkin_nu"), g_tau = c.real("galerkin_tau");
    int g_steps = static_cast<int>(c.integer("galerkin_steps"));
    double g_amp = c.real("galerkin_amplitude");
    double c_nu = c.real("collocation_nu"), c_tau = c.real("collocation_tau");
    double s_nu = c.real("strang_nu"), s_tau = c.real("strang_tau");
    int s_steps = static_cast<int>(c.integer("strang_steps"));
    double s_amp = c.real("strang_amplitude");
    double max_slope = c.real("max_slope");
    require(n_list.size() >= 2, "params.n_list: need at least two sizes");

    auto margin_galerkin = [&](int N) {
        auto g = GridSpec::make_galerkin(1, N);
        Field u = field_from_function(g, [&](double x, double, double) {
            return std::clamp(g_amp * std::sin(2 * pi * x), -1.0, 1.0);
        });
        project_galerkin(u, N);
        double m = oversampled_linf(u, N) - 1.0;
        for (int n = 1; n <= g_steps; ++n) {
            u = ac_galerkin_imex_step(u, g_nu, g_tau, N);
            m = std::max(m, oversampled_linf(u, N) - 1.0);
        }
        return m;
    };
    auto margin_collocation = [&](int N) {
        auto g = GridSpec::make_collocation(1, N);
        Field row(g);
        for (auto& v : row.values) v = 0.0;
        row.values[static_cast<size_t>(N / 2)] = 1.0;
        row.sync_from_values();
        apply_helmholtz_inverse(row, c_nu * c_nu * c_tau);
        Field u(g);
        for (size_t j = 0; j < u.values.size(); ++j)
            u.values[j] = row.values[j] >= 0.0 ? 1.0 : -1.0;
        u.sync_from_values();
        u = ac_collocation_imex_step(u, c_nu, c_tau);
        return u.linf() - 1.0;
    };
    auto margin_strang = [&](int N) {
        auto g = GridSpec::make_collocation(1, N);
        Field u = field_from_function(g, [&](double x, double, double) {
            return std::clamp(s_amp * std::sin(2 * pi * x), -1.0, 1.0);
        });
        double m = -1e300;
        for (int n = 1; n <= s_steps; ++n) {
            u = ac_strang_step(u, s_nu, s_tau);
            m = std::max(m, u.linf() - 1.0);
        }
        return m;
    };

    struct Family {
        const char* name;
        std::function<double(int)> measure;
    };
    const Family families[3] = {{"galerkin", margin_galerkin},
                                {"collocation", margin_collocation},
                                {"strang", margin_strang}};

    std::vector<double> xs;
    for (long long n : n_list) xs.push_back(static_cast<double>(n));
    Csv t("family,n,margin");
    bool all_ok = true;
    for (const auto& fam : families) {
        std::vector<double> margins(n_list.size());
        parallel_for(n_list.size(), c.threads, [&](std::size_t i) {
            margins[i] = fam.measure(static_cast<int>(n_list[i]));
        });
        bool positive = true;
        for (size_t i = 0; i < n_list.size(); ++i) {
            positive = positive && margins[i] > 0.0;
            c.value(std::string("margin_") + fam.name + "_n" + std::to_string(n_list[i]),
                    margins[i]);
            t.cell(std::string(fam.name)).cell(n_list[i]).cell(margins[i]);
            t.end_row();
        }
        auto f = fit_decay(xs, margins);
        c.fit(fam.name, f);
        c.value(std::string("slope_") + fam.name, f.fit.slope);
        bool slope_ok = f.n_used == static_cast<int>(n_list.size()) && f.fit.slope <= max_slope;
        c.verdict(std::string(fam.name) + "_margins_positive", positive);
        c.verdict(std::string(fam.name) + "_slope_decays", slope_ok);
        all_ok = all_ok && positive && slope_ok;
    }
    c.verdict("all_families_decay", all_ok);
    c.table("margins", t);
}

void run_overshoot_scaling(Ctx& c) {
    auto b_n_list = c.ints("burgers_n_list");
    double b_n_nu = c.real("burgers_n_nu");
    double b_n_tau = c.real("burgers_n_tau");
    double b_n_time = c.real("burgers_n_time");
    double b_n_amp = c.real("burgers_n_amplitude");
    auto b_tau_items = c.texts("burgers_tau_list");
    double b_tau_nu = c.real("burgers_tau_nu");
    int b_tau_n = static_cast<int>(c.integer("burgers_tau_n"));
    double b_tau_time = c.real("burgers_tau_time");
    int b_levels = static_cast<int>(c.integer("burgers_levels"));
    auto w_n_list = c.ints("nse_n_list");
    double w_n_tau = c.real("nse_n_tau");
    int w_n_steps = static_cast<int>(c.integer("nse_n_steps"));
    double w_n_amp = c.real("nse_n_amplitude");
    auto w_tau_items = c.texts("nse_tau_list");
    int w_tau_n = static_cast<int>(c.integer("nse_tau_n"));
    double w_tau_amp = c.real("nse_tau_amplitude");
    int w_tau_steps = static_cast<int>(c.integer("nse_tau_steps"));
    int w_levels = static_cast<int>(c.integer("nse_levels"));
    require(b_levels >= 1 && b_levels <= 16, "params.burgers_levels: must lie in [1, 16]");
    require(w_levels >= 1 && w_levels <= 16, "params.nse_levels: must lie in [1, 16]");

    // Overshoot of the whole trajectory (projection included) over the
    // pre-truncation sup of the clamped data, in a regime where the dynamics
    // stay under the initial excess.
    auto burgers_vs_data = [&](int N) {
        auto g = GridSpec::make_galerkin(1, N);
        Field u = field_from_function(g, [&](double x, double, double) {
            return std::clamp(b_n_amp * std::sin(2 * pi * x), -1.0, 1.0);
        });
        project_galerkin(u, N);
        double m = u.linf() - 1.0;
        int steps = static_cast<int>(std::llround(b_n_time / b_n_tau));
        for (int n = 1; n <= steps; ++n) {
            u = burgers_galerkin_euler_step(u, b_n_nu, b_n_tau, N);
            check_finite(u.linf(), n);
            m = std::max(m, u.linf() - 1.0);
        }
        return m;
    };
    // Overshoot of the marched states over the realized initial max (pure
    // dynamics) for rough lacunary data.
    auto burgers_vs_init = [&](double tau) {
        auto g = GridSpec::make_galerkin(1, b_tau_n);
        Field u = field_from_function(
            g, [&](double x, double, double) { return lacunary1(x, b_levels); });
        project_galerkin(u, b_tau_n);
        double base = u.linf();
        double sup = -1e300;
        int steps = static_cast<int>(std::llround(b_tau_time / tau));
        for (int n = 1; n <= steps; ++n) {
            u = burgers_galerkin_euler_step(u, b_tau_nu, tau, b_tau_n);
            check_finite(u.linf(), n);
            sup = std::max(sup, u.linf());
        }
        return sup - base;
    };
    auto nse_vs_data = [&](int N) {
        auto g = GridSpec::make_galerkin(2, N);
        Field w = field_from_function(g, [&](double x, double y, double) {
            double s = 1.6 * (std::sin(2 * pi * x) * std::sin(2 * pi * y) +
                              0.4 * std::cos(4 * pi * x) * std::sin(2 * pi * y));
            return w_n_amp * std::clamp(s, -1.0, 1.0);
        });
        double mean = w.mean();
        for (auto& v : w.values) v -= mean;
        w.sync_from_values();
        project_galerkin(w, N);
        double sup = w.linf();
        for (int n = 1; n <= w_n_steps; ++n) {
            w = nse_vorticity_step(w, w_n_tau, N);
            check_finite(w.linf(), n);
            sup = std::max(sup, w.linf());
        }
        return sup - w_n_amp;
    };
    auto nse_vs_init = [&](double tau_eff) {
        auto g = GridSpec::make_galerkin(2, w_tau_n);
        Field w = field_from_function(g, [&](double x, double y, double) {
            return w_tau_amp * lacunary2(x, y, w_levels);
        });
        project_galerkin(w, w_tau_n);
        double base = w.linf();
        double sup = -1e300;
        double tau = tau_eff / w_tau_amp;
        for (int n = 1; n <= w_tau_steps; ++n) {
            w = nse_vorticity_step(w, tau, w_tau_n);
            check_finite(w.linf(), n);
            sup = std::max(sup, w.linf());
        }
        return (sup - base) / w_tau_amp;
    };

    struct Point {
        std::string equation, sweep, item;
        double x = 0.0;
        std::function<double()> measure;
        double overshoot = 0.0;
    };
    std::vector<Point> points;
    for (long long n : b_n_list) {
        int N = static_cast<int>(n);
        points.push_back({"burgers", "n", std::to_string(n), static_cast<double>(n),
                          [=]() { return burgers_vs_data(N); }});
    }
    for (const auto& item : b_tau_items) {
        double tau = parse_real("params.burgers_tau_list", item);
        points.push_back({"burgers", "tau", item, tau, [=]() { return burgers_vs_init(tau); }});
    }
    for (long long n : w_n_list) {
        int N = static_cast<int>(n);
        points.push_back({"nse", "n", std::to_string(n), static_cast<double>(n),
                          [=]() { return nse_vs_data(N); }});
    }
    for (const auto& item : w_tau_items) {
        double te = parse_real("params.nse_tau_list", item);
        points.push_back({"nse", "tau", item, te, [=]() { return nse_vs_init(te); }});
    }

    parallel_for(points.size(), c.threads,
                 [&](std::size_t i) { points[i].overshoot = points[i].measure(); });

    Csv t("equation,sweep,parameter,overshoot");
    bool all_ok = true;
    for (const char* eq : {"burgers", "nse"}) {
        for (const char* sw : {"n", "tau"}) {
            std::vector<double> xs, ys;
            bool positive = true;
            for (const auto& p : points) {
                if (p.equation != eq || p.sweep != sw) continue;
                xs.push_back(p.x);
                ys.push_back(p.overshoot);
                positive = positive && p.overshoot > 0.0;
                c.value(p.equation + "_" + p.sweep + "_" + p.item, p.overshoot);
                t.cell(p.equation).cell(p.sweep).cell(p.item).cell(p.overshoot);
                t.end_row();
            }
            auto f = fit_decay(xs, ys);
            std::string key = std::string(eq) + "-" + sw;
            c.fit(key, f);
            c.value("slope_" + std::string(eq) + "_" + sw, f.fit.slope);
            bool full = f.n_used == static_cast<int>(xs.size());
            bool sign_ok = std::string(sw) == "n" ? f.fit.slope < 0.0 : f.fit.slope > 0.0;
            c.verdict(std::string(eq) + "_" + sw + "_positive", positive);
            c.verdict(std::string(eq) + "_" + sw + (std::string(sw) == "n" ? "_decays" : "_grows"),
                      full && sign_ok);
            all_ok = all_ok && positive && full && sign_ok;
        }
    }
    c.verdict("all_sweeps_sign_consistent", all_ok);
    c.table("overshoots", t);
}

void run_kernel_bands(Ctx& c) {
    double beta = c.real("beta");
    double factor = c.real("factor");
    auto d1 = c.ints("d1_n_list");
    auto d2 = c.ints("d2_n_list");
    require(beta > 0.0, "params.beta: must be positive");
    require(factor > 1.0, "params.factor: must exceed 1");

    Csv t("d,n,value,ratio,reference_error");
    bool all_ok = true;
    for (int d = 1; d <= 2; ++d) {
        const auto& list = d == 1 ? d1 : d2;
        std::vector<double> xs, values, ratios;
        for (long long n : list) {
            auto r = tail_l1_norm(d, static_cast<int>(n), beta);
            xs.push_back(static_cast<double>(n));
            values.push_back(r.value);
            ratios.push_back(r.ratio);
            t.cell(static_cast<long long>(d)).cell(n).cell(r.value).cell(r.ratio)
                .cell(r.reference_error);
            t.end_row();
        }
        double lo = *std::min_element(ratios.begin(), ratios.end());
        double hi = *std::max_element(ratios.begin(), ratios.end());
        std::string p = "d" + std::to_string(d) + "_";
        c.value(p + "ratio_min", lo);
        c.value(p + "ratio_max", hi);
        c.value(p + "band", hi / lo);
        c.fit("d" + std::to_string(d) + "-tail", fit_decay(xs, values));
        bool ok = lo > 0.0 && hi / lo < factor;
        c.verdict(p + "band_ok", ok);
        all_ok = all_ok && ok;
    }
    c.verdict("bands_within_factor", all_ok);
    c.table("tails", t);
}

void run_strang_order(Ctx& c) {
    int N = static_cast<int>(c.integer("n"));
    double nu = c.real("nu");
    double T = c.real("horizon");
    int base_steps = static_cast<int>(c.integer("base_steps"));
    int levels = static_cast<int>(c.integer("levels"));
    double tol = c.real("ode_tol");
    std::string initial = c.text("initial");
    double window = c.real("window");
    require(levels >= 2, "params.levels: must be at least 2");
    require(base_steps >= 1, "params.base_steps: must be at least 1");
    require(T > 0.0, "params.horizon: must be positive");

    auto g = GridSpec::make_collocation(1, N);
    Field u0 = expression_field(g, initial);
    auto ref = ac_collocation_ode_integrate(u0, nu, T, 1, tol, tol);
    const auto& rT = ref.states.back();

    std::vector<double> taus, errs;
    Csv t("steps,tau,error");
    for (int level = 0; level < levels; ++level) {
        int n = base_steps << level;
        Field u = u0;
        for (int i = 0; i < n; ++i) u = ac_strang_step(u, nu, T / n);
        double e = 0.0;
        for (size_t j = 0; j < rT.size(); ++j) e = std::max(e, std::abs(u.values[j] - rT[j]));
        taus.push_back(T / n);
        errs.push_back(e);
        c.value("error_level_" + std::to_string(level), e);
        t.cell(static_cast<long long>(n)).cell(T / n).cell(e);
        t.end_row();
    }
    auto f = fit_decay(taus, errs);
    c.fit("order", f);
    c.value("slope", f.fit.slope);
    c.value("r2", f.fit.r2);
    c.verdict("second_order", f.n_used == levels && std::abs(f.fit.slope - 2.0) <= window);
    c.table("refinement", t);
}

void run_adversarial(Ctx& c) {
    auto n_list = c.ints("n_list");
    auto modes = c.texts("modes");
    double nu = c.real("nu");
    double threshold = c.real("threshold");
    for (const auto& m : modes)
        require(m == "heat" || m == "resolvent", "params.modes: entries must be heat or resolvent");

    Csv t("mode,n,step_time,witness,overshoot");
    double min_witness = 1e300;
    for (const auto& mode : modes) {
        for (long long n : n_list) {
            auto r = adversarial_data(static_cast<int>(n), mode, nu);
            min_witness = std::min(min_witness, r.witness_value);
            c.value("witness_" + mode + "_n" + std::to_string(n), r.witness_value);
            t.cell(mode).cell(n).cell(r.step_time).cell(r.witness_value).cell(r.overshoot);
            t.end_row();
        }
    }
    c.value("min_witness", min_witness);
    c.verdict("all_exceed_threshold", min_witness >= threshold);
    c.table("witnesses", t);
}

void run_ac_imex(Ctx& c) {
    std::string scheme = c.text("scheme");
    int d = static_cast<int>(c.integer("d"));
    int N = static_cast<int>(c.integer("n"));
    double nu = c.real("nu");
    double tau = c.real("tau");
    int steps = static_cast<int>(c.integer("steps"));
    std::string initial = c.text("initial");
    double bound = c.real("bound");
    require(scheme == "galerkin" || scheme == "collocation" || scheme == "strang",
            "params.scheme: must be galerkin, collocation, or strang");
    require(d == 1 || d == 2, "params.d: must be 1 or 2");
    require(steps >= 1, "params.steps: must be at least 1");

    GridSpec g = scheme == "galerkin" ? GridSpec::make_galerkin(d, N)
                                      : GridSpec::make_collocation(d, N);
    Field u = expression_field(g, initial);
    if (scheme == "galerkin") project_galerkin(u, N);

    auto step = [&](const Field& v) {
        if (scheme == "galerkin") return ac_galerkin_imex_step(v, nu, tau, N);
        if (scheme == "collocation") return ac_collocation_imex_step(v, nu, tau);
        return ac_strang_step(v, nu, tau);
    };

    Csv t("step,t,linf,l2,energy,margin");
    auto d0 = diagnose(u, nu, bound);
    t.cell(0LL).cell(0.0).cell(d0.linf).cell(d0.l2).cell(d0.energy).cell(d0.margin);
    t.end_row();
    double sup = d0.linf;
    double prev_e = d0.energy;
    long long increases = 0;
    StepDiagnostics dn = d0;
    for (int n = 1; n <= steps; ++n) {
        u = step(u);
        dn = diagnose(u, nu, bound);
        check_finite(dn.linf, n);
        if (dn.energy - prev_e > 1e-12) ++increases;
        prev_e = dn.energy;
        sup = std::max(sup, dn.linf);
        t.cell(static_cast<long long>(n)).cell(n * tau).cell(dn.linf).cell(dn.l2).cell(dn.energy)
            .cell(dn.margin);
        t.end_row();
    }
    c.value("initial_linf", d0.linf);
    c.value("final_linf", dn.linf);
    c.value("final_l2", dn.l2);
    c.value("final_energy", dn.energy);
    c.value("sup_linf", sup);
    c.value("energy_increases", static_cast<double>(increases));
    c.table("trajectory", t);
}

void run_burgers(Ctx& c) {
    int N = static_cast<int>(c.integer("n"));
    double nu = c.real("nu");
    double tau = c.real("tau");
    int steps = static_cast<int>(c.integer("steps"));
    std::string initial = c.text("initial");
    require(steps >= 1, "params.steps: must be at least 1");

    auto g = GridSpec::make_galerkin(1, N);
    auto f = parse_expression(initial);
    double data_sup = 0.0;
    for (int i = 0; i < 8192; ++i) data_sup = std::max(data_sup, std::abs(f(i / 8192.0, 0.0)));
    Field u = field_from_function(g, [&](double x, double, double) { return f(x, 0.0); });
    project_galerkin(u, N);
    double base = u.linf();
    double sup_all = base;
    double sup_later = -1e300;

    Csv t("step,t,linf,l2");
    t.cell(0LL).cell(0.0).cell(base).cell(u.l2());
    t.end_row();
    for (int n = 1; n <= steps; ++n) {
        u = burgers_galerkin_euler_step(u, nu, tau, N);
        double m = u.linf();
        check_finite(m, n);
        sup_all = std::max(sup_all, m);
        sup_later = std::max(sup_later, m);
        t.cell(static_cast<long long>(n)).cell(n * tau).cell(m).cell(u.l2());
        t.end_row();
    }
    c.value("data_sup", data_sup);
    c.value("initial_linf", base);
    c.value("sup_linf", sup_all);
    c.value("overshoot_vs_init", sup_later - base);
    c.value("overshoot_vs_data", sup_all - data_sup);
    c.table("trajectory", t);
}

void run_nse(Ctx& c) {
    int N = static_cast<int>(c.integer("n"));
    double tau = c.real("tau");
    int steps = static_cast<int>(c.integer("steps"));
    std::string initial = c.text("initial");
    require(steps >= 1, "params.steps: must be at least 1");

    auto g = GridSpec::make_galerkin(2, N);
    Field w = expression_field(g, initial);
    double mean = w.mean();
    for (auto& v : w.values) v -= mean;
    w.sync_from_values();
    project_galerkin(w, N);
    double base = w.linf();
    double sup_all = base;
    double sup_later = -1e300;

    Csv t("step,t,linf,l2");
    t.cell(0LL).cell(0.0).cell(base).cell(w.l2());
    t.end_row();
    for (int n = 1; n <= steps; ++n) {
        w = nse_vorticity_step(w, tau, N);
        double m = w.linf();
        check_finite(m, n);
        sup_all = std::max(sup_all, m);
        sup_later = std::max(sup_later, m);
        t.cell(static_cast<long long>(n)).cell(n * tau).cell(m).cell(w.l2());
        t.end_row();
    }
    c.value("initial_linf", base);
    c.value("sup_linf", sup_all);
    c.value("overshoot_vs_init", sup_later - base);
    c.table("trajectory", t);
}

void run_kernel_tail(Ctx& c) {
    int d = static_cast<int>(c.integer("d"));
    int N = static_cast<int>(c.integer("n"));
    double beta = c.real("beta");
    auto r = tail_l1_norm(d, N, beta);
    c.value("value", r.value);
    c.value("ratio", r.ratio);
    c.value("reference_error", r.reference_error);
}

void run_kernel_profile(Ctx& c) {
    int d = static_cast<int>(c.integer("d"));
    int N = static_cast<int>(c.integer("n"));
    double beta = c.real("beta");
    double s = c.real("s");
    int refinement = static_cast<int>(c.integer("refinement"));

    auto p = kernel_profile(d, N, beta, s, refinement);
    c.value("min_value", p.min_value);
    c.value("l1_norm", p.l1_norm);
    c.value("mass", p.mass);
    c.value("certificate_gap", p.certificate_gap);
    c.value("positive", p.positive ? 1.0 : 0.0);
    c.value("argmin_x", p.argmin[0]);
    if (d == 2) c.value("argmin_y", p.argmin[1]);

    int m = p.samples_per_axis;
    if (d == 1) {
        Csv t("x,kernel");
        for (int i = 0; i < m; ++i) {
            t.cell(static_cast<double>(i) / m).cell(p.samples[static_cast<size_t>(i)]);
            t.end_row();
        }
        c.table("profile", t);
    } else {
        Csv t("x,y,kernel");
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                t.cell(static_cast<double>(i) / m)
                    .cell(static_cast<double>(j) / m)
                    .cell(p.samples[static_cast<size_t>(i) * m + j]);
                t.end_row();
            }
        }
        c.table("profile", t);
    }
}

void run_discrete_kernel(Ctx& c) {
    int N = static_cast<int>(c.integer("n"));
    double nu = c.real("nu");
    double tau = c.real("tau");
    require(nu > 0.0, "params.nu: must be positive");
    require(tau > 0.0, "params.tau: must be positive");

    auto p = discrete_helmholtz_kernel(N, nu, tau);
    long long negatives = 0;
    for (double v : p.samples)
        if (v < 0.0) ++negatives;

    c.value("min_value", p.min_value);
    c.value("l1_norm", p.l1_norm);
    c.value("positive", p.positive ? 1.0 : 0.0);
    c.value("negative_nodes", static_cast<double>(negatives));
    c.value("threshold_formula", discrete_kernel_threshold(nu, tau));
    c.value("k1", N * nu * std::sqrt(tau));

    Csv t("j,x,kernel");
    for (int j = 0; j < static_cast<int>(p.samples.size()); ++j) {
        t.cell(static_cast<long long>(j))
            .cell(static_cast<double>(j) / static_cast<double>(p.samples.size()))
            .cell(p.samples[static_cast<size_t>(j)]);
        t.end_row();
    }
    c.table("kernel", t);
}

// ---------------------------------------------------------------------------
// registry table
// ---------------------------------------------------------------------------

const std::vector<Def>& registry() {
    static const std::vector<Def> defs = [] {
        std::vector<Def> v;
        auto R = [](const char* k, double d) { return Param{k, Kind::real, format_double(d)}; };
        auto I = [](const char* k, long long d) {
            return Param{k, Kind::integer, std::to_string(d)};
        };
        auto S = [](const char* k, const char* d) { return Param{k, Kind::text, d}; };
        auto RL = [](const char* k, const char* d) { return Param{k, Kind::real_list, d}; };
        auto IL = [](const char* k, const char* d) { return Param{k, Kind::int_list, d}; };
        auto E = [](const char* k, const char* d) { return Param{k, Kind::expression, d}; };

        v.push_back({"critical-exponent",
                     "positivity transition exponent s* of the scaled kernels",
                     {R("tol", 1e-7)},
                     run_critical_exponent});
        v.push_back({"stability-root",
                     "largest admissible step size tau_1 of the cubic stage map",
                     {},
                     run_stability_root});
        v.push_back({"heat-table",
                     "one-step heat amplification coefficients at similarity k0",
                     {I("n", 512), R("nu", 1.0), R("k0", 1.0), I("n_beta", 9)},
                     run_heat_table});
        v.push_back({"resolvent-table",
                     "one-step resolvent amplification coefficients at similarity k1",
                     {I("n", 512), R("nu", 1.0), R("k1", 0.5), I("power", 1), I("n_beta", 10)},
                     run_resolvent_table});
        v.push_back({"heat-closed-form",
                     "closed-form heat kernel l1 mass vs the coefficient series",
                     {RL("b_list", "0.05,0.2,0.5"), I("n", 1024), I("n_beta", 12),
                      R("tolerance", 1e-6)},
                     run_heat_closed_form});
        v.push_back({"kernel-window",
                     "window bracket for the limiting kernel amplitude A_beta(s)",
                     {R("beta", 0.25 / (pi * pi)), R("s", 0.3), R("window_lo", 0.60),
                      R("window_hi", 1.66)},
                     run_kernel_window});
        v.push_back({"projection-overshoot",
                     "one projected step pushes a near-maximal state past 1",
                     {R("delta", 0.05), R("nu", 1e-3), R("tau", 0.5), I("n", 2)},
                     run_projection_overshoot});
        v.push_back({"tau2-counterexample",
                     "tau = 2 step escaping the sqrt(2) invariant region",
                     {R("nu", 0.05), I("n", 8)},
                     run_tau2_counterexample});
        v.push_back({"sharp-max",
                     "pointwise scheme keeps the exact unit bound on random data",
                     {R("nu", 1.0), R("tau", 0.5), I("n", 8), I("trials", 200), I("steps", 200)},
                     run_sharp_max});
        v.push_back({"blowup",
                     "oversized steps escape the interior equilibrium",
                     {R("tau", 3.0), R("nu", 1.0), I("n", 8), R("u0", 2.0 / 3.0),
                      I("max_steps", 50), R("threshold", 1e3)},
                     run_blowup});
        v.push_back({"energy-monotone",
                     "semi-implicit energy decay across admissible step sizes",
                     {R("nu", 0.25), I("n", 256), I("steps", 500), RL("tau_list", "0.1,0.5,0.86"),
                      R("amplitude", 1.29), R("tolerance", 1e-12)},
                     run_energy_monotone});
        v.push_back({"margin-decay",
                     "effective-maximum margins vanish with resolution",
                     {IL("n_list", "128,256,512"), R("galerkin_nu", 0.02), R("galerkin_tau", 0.25),
                      I("galerkin_steps", 5), R("galerkin_amplitude", 1.5),
                      R("collocation_nu", 0.00625), R("collocation_tau", 0.5), R("strang_nu", 0.002),
                      R("strang_tau", 0.1), I("strang_steps", 5), R("strang_amplitude", 1.5),
                      R("max_slope", -0.25)},
                     run_margin_decay});
        v.push_back({"overshoot-scaling",
                     "transport overshoots shrink with resolution and step size",
                     {IL("burgers_n_list", "32,64,128,256"), R("burgers_n_nu", 0.05),
                      R("burgers_n_tau", 2.5e-5), R("burgers_n_time", 0.01),
                      R("burgers_n_amplitude", 1.4), RL("burgers_tau_list", "2.5e-5,5e-5,1e-4,2e-4"),
                      R("burgers_tau_nu", 0.01), I("burgers_tau_n", 128), R("burgers_tau_time", 0.05),
                      I("burgers_levels", 14), IL("nse_n_list", "16,24,32,48"), R("nse_n_tau", 5e-5),
                      I("nse_n_steps", 100), R("nse_n_amplitude", 30.0),
                      RL("nse_tau_list", "2.5e-5,5e-5,1e-4,2e-4"), I("nse_tau_n", 32),
                      R("nse_tau_amplitude", 1e6), I("nse_tau_steps", 10), I("nse_levels", 5)},
                     run_overshoot_scaling});
        v.push_back({"kernel-bands",
                     "truncated-kernel l1 tails stay inside fixed ratio bands",
                     {R("beta", 1.0), R("factor", 25.0), IL("d1_n_list", "2,4,8,16,32,64,128,256"),
                      IL("d2_n_list", "2,8,32")},
                     run_kernel_bands});
        v.push_back({"strang-order",
                     "second-order convergence of the splitting scheme",
                     {I("n", 16), R("nu", 0.1), R("horizon", 0.5), I("base_steps", 40),
                      I("levels", 5), R("ode_tol", 1e-12),
                      E("initial", "0.4*sin(2*pi*x)-0.3*cos(4*pi*x)+0.1*cos(6*pi*x)"),
                      R("window", 0.1)},
                     run_strang_order});
        v.push_back({"adversarial",
                     "worst-case bounded data beats the unit bound at every resolution",
                     {IL("n_list", "128,256,512,1024"), S("modes", "heat,resolvent"), R("nu", 1.0),
                      R("threshold", 1.001)},
                     run_adversarial});
        v.push_back({"ac-imex",
                     "phase-field time series under a chosen discretization",
                     {S("scheme", "galerkin"), I("d", 1), I("n", 64), R("nu", 0.25), R("tau", 0.1),
                      I("steps", 100), E("initial", "0.9*sin(2*pi*x)"), R("bound", 1.0)},
                     run_ac_imex});
        v.push_back({"burgers",
                     "viscous transport time series with projected nonlinearity",
                     {I("n", 128), R("nu", 0.01), R("tau", 1e-4), I("steps", 200),
                      E("initial", "sin(2*pi*x)")},
                     run_burgers});
        v.push_back({"nse",
                     "vorticity time series of the unit-viscosity planar flow",
                     {I("n", 32), R("tau", 1e-4), I("steps", 100),
                      E("initial", "sin(2*pi*x)*sin(2*pi*y)")},
                     run_nse});
        v.push_back({"kernel-tail",
                     "l1 tail of one truncated kernel (sweep-friendly scalar)",
                     {I("d", 1), I("n", 16), R("beta", 1.0)},
                     run_kernel_tail});
        v.push_back({"kernel-profile",
                     "scan of one truncated kernel with a positivity certificate",
                     {I("d", 1), I("n", 16), R("beta", 1.0), R("s", 2.0), I("refinement", 1)},
                     run_kernel_profile});
        v.push_back({"discrete-kernel",
                     "collocation resolvent kernel row and its positivity threshold",
                     {I("n", 128), R("nu", 0.05), R("tau", 0.5)},
                     run_discrete_kernel});
        return v;
    }();
    return defs;
}

const Def& find_def(const std::string& name) {
    for (const auto& d : registry())
        if (d.name == name) return d;
    std::string names;
    for (const auto& d : registry()) names += (names.empty() ? "" : ", ") + d.name;
    throw std::invalid_argument("experiment: unknown name '" + name + "' (available: " + names +
                                ")");
}

void validate_param(const Def& def, const Param& p, const std::string& text) {
    std::string field = "params." + p.key;
    switch (p.kind) {
        case Kind::real: (void)parse_real(field, text); break;
        case Kind::integer: (void)parse_int(field, text); break;
        case Kind::real_list: (void)parse_real_list(field, text); break;
        case Kind::int_list: (void)parse_int_list(field, text); break;
        case Kind::expression:
            try {
                (void)parse_expression(text);
            } catch (const std::exception& e) {
                throw std::invalid_argument(field + ": " + e.what());
            }
            break;
        case Kind::text:
            if (trim(text).empty())
                throw std::invalid_argument(field + ": must not be empty");
            break;
    }
    (void)def;
}

struct SweepPlan {
    std::vector<std::string> keys;
    std::vector<std::vector<std::string>> lists;  // aligned with keys
    std::string fit_x;
    std::vector<std::string> fit_y;
    std::size_t points = 1;
};

SweepPlan sweep_plan(const Config& cfg, const Def& def) {
    SweepPlan plan;
    const auto& sections = cfg.sections();
    auto it = sections.find("sweep");
    if (it == sections.end()) throw std::invalid_argument("sweep: missing [sweep] section");
    for (const auto& [key, value] : it->second) {
        if (key == "fit_x") {
            plan.fit_x = trim(value);
            continue;
        }
        if (key == "fit_y") {
            plan.fit_y = split_list("sweep.fit_y", value);
            continue;
        }
        const Param* param = nullptr;
        for (const auto& p : def.params)
            if (p.key == key) param = &p;
        if (!param)
            throw std::invalid_argument("sweep." + key + ": not a parameter of experiment '" +
                                        def.name + "'");
        auto items = split_list("sweep." + key, value);
        for (const auto& item : items) validate_param(def, *param, item);
        plan.keys.push_back(key);
        plan.lists.push_back(items);
        plan.points *= items.size();
        if (plan.points > 10000)
            throw std::invalid_argument("sweep: grid has more than 10000 points");
    }
    if (plan.keys.empty()) throw std::invalid_argument("empty sweep");
    if (!plan.fit_x.empty()) {
        bool swept = std::find(plan.keys.begin(), plan.keys.end(), plan.fit_x) != plan.keys.end();
        if (!swept)
            throw std::invalid_argument("sweep.fit_x: '" + plan.fit_x + "' is not a swept key");
        if (plan.fit_y.empty())
            throw std::invalid_argument("sweep.fit_y: required when fit_x is set");
    }
    return plan;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json fits_or_empty(const json& fits) { return fits.is_null() ? json::object() : fits; }

RunResult finish(const Config& resolved, const std::string& name, Ctx& ctx, double seconds,
                 const json& extra_sweep) {
    RunResult r;
    r.resolved = resolved;
    r.hash = config_hash(resolved);

    int checks = 0, passed = 0;
    for (const auto& [key, val] : ctx.verdicts.items()) {
        (void)key;
        ++checks;
        if (val.get<bool>()) ++passed;
    }
    r.ok = passed == checks;
    if (checks == 0) {
        r.verdict_line = name + ": done";
    } else {
        r.verdict_line = name + (r.ok ? ": PASS (" : ": FAIL (") + std::to_string(passed) + "/" +
                         std::to_string(checks) + " checks)";
    }

    json j;
    j["experiment"] = name;
    j["config_hash"] = hash_hex(r.hash);
    j["seed"] = ctx.seed;
    j["tool_version"] = kVersion;
    j["runtime_seconds"] = seconds;
    j["verdicts"] = ctx.verdicts;
    j["values"] = ctx.values;
    j["fits"] = fits_or_empty(ctx.fits);
    json names = json::array();
    for (const auto& [tname, content] : ctx.tables) {
        (void)content;
        names.push_back(tname);
    }
    j["tables"] = names;
    if (!extra_sweep.is_null()) j["sweep"] = extra_sweep;
    r.summary_json = j.dump(2) + "\n";
    r.csv_tables = std::move(ctx.tables);
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

std::string tool_version() { return kVersion; }

std::vector<std::string> experiment_names() {
    std::vector<std::string> names;
    for (const auto& d : registry()) names.push_back(d.name);
    std::sort(names.begin(), names.end());
    return names;
}

Config resolve_experiment_config(const Config& cfg) {
    if (!cfg.has("", "experiment"))
        throw std::invalid_argument("experiment: missing (set 'experiment = <name>' at the top)");
    const Def& def = find_def(cfg.get("", "experiment"));

    for (const auto& [section, kv] : cfg.sections()) {
        if (section.empty()) {
            for (const auto& [key, value] : kv) {
                (void)value;
                if (key != "experiment")
                    throw std::invalid_argument(key + ": unknown top-level key");
            }
        } else if (section == "params") {
            for (const auto& [key, value] : kv) {
                (void)value;
                bool known = false;
                for (const auto& p : def.params) known = known || p.key == key;
                if (!known)
                    throw std::invalid_argument("params." + key +
                                                ": unknown key for experiment '" + def.name + "'");
            }
        } else if (section == "sweep") {
            throw std::invalid_argument(
                "sweep: config declares a [sweep] section; use the sweep command");
        } else {
            throw std::invalid_argument("[" + section + "]: unknown section");
        }
    }

    Config r;
    r.set("", "experiment", def.name);
    for (const auto& p : def.params) {
        std::string text = cfg.has("params", p.key) ? cfg.get("params", p.key) : p.preset;
        validate_param(def, p, text);
        r.set("params", p.key, text);
    }
    return r;
}

Config resolve_sweep_config(const Config& cfg, std::size_t* point_count) {
    Config base;
    for (const auto& [section, kv] : cfg.sections()) {
        if (section == "sweep") continue;
        for (const auto& [key, value] : kv) base.set(section, key, value);
    }
    Config resolved = resolve_experiment_config(base);
    const Def& def = find_def(resolved.get("", "experiment"));
    SweepPlan plan = sweep_plan(cfg, def);
    if (point_count) *point_count = plan.points;

    auto it = cfg.sections().find("sweep");
    for (const auto& [key, value] : it->second) resolved.set("sweep", key, value);
    return resolved;
}

RunResult run_experiment(const Config& cfg, std::uint64_t seed, int threads) {
    Config resolved = resolve_experiment_config(cfg);
    const Def& def = find_def(resolved.get("", "experiment"));
    Ctx ctx{resolved, seed, std::max(1, threads)};
    auto t0 = std::chrono::steady_clock::now();
    def.run(ctx);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return finish(resolved, def.name, ctx, seconds, json());
}

RunResult run_sweep(const Config& cfg, std::uint64_t seed, int threads) {
    Config resolved = resolve_sweep_config(cfg, nullptr);
    const Def& def = find_def(resolved.get("", "experiment"));
    SweepPlan plan = sweep_plan(resolved, def);

    Config base;
    for (const auto& [section, kv] : resolved.sections()) {
        if (section == "sweep") continue;
        for (const auto& [key, value] : kv) base.set(section, key, value);
    }

    // Cartesian product: the last sorted key cycles fastest.
    std::vector<std::size_t> strides(plan.keys.size(), 1);
    for (size_t k = plan.keys.size(); k-- > 1;)
        strides[k - 1] = strides[k] * plan.lists[k].size();

    std::vector<Config> points(plan.points, base);
    for (std::size_t i = 0; i < plan.points; ++i) {
        for (size_t k = 0; k < plan.keys.size(); ++k) {
            const auto& items = plan.lists[k];
            points[i].set("params", plan.keys[k], items[(i / strides[k]) % items.size()]);
        }
    }

    auto t0 = std::chrono::steady_clock::now();
    std::vector<RunResult> results(plan.points);
    parallel_for(plan.points, threads,
                 [&](std::size_t i) { results[i] = run_experiment(points[i], seed, 1); });
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // Deterministic merge in point order.
    std::vector<std::string> value_names;
    {
        json first = json::parse(results.front().summary_json);
        for (const auto& [key, val] : first["values"].items()) {
            (void)val;
            value_names.push_back(key);
        }
    }
    std::string header = "index";
    for (const auto& k : plan.keys) header += "," + k;
    for (const auto& vn : value_names) header += "," + vn;
    Csv table(header);
    bool all_ok = true;
    std::vector<json> summaries;
    summaries.reserve(plan.points);
    for (std::size_t i = 0; i < plan.points; ++i) {
        json s = json::parse(results[i].summary_json);
        table.cell(static_cast<long long>(i));
        for (size_t k = 0; k < plan.keys.size(); ++k)
            table.cell(points[i].get("params", plan.keys[k]));
        for (const auto& vn : value_names) {
            if (s["values"].contains(vn))
                table.cell(s["values"][vn].get<double>());
            else
                table.cell(std::string());
        }
        table.end_row();
        all_ok = all_ok && results[i].ok;
        summaries.push_back(std::move(s));
    }

    Ctx ctx{resolved, seed, threads};
    ctx.verdicts["all_points_ok"] = all_ok;
    ctx.values["points"] = static_cast<double>(plan.points);
    std::string fit_note;
    if (!plan.fit_x.empty()) {
        size_t kx = static_cast<size_t>(
            std::find(plan.keys.begin(), plan.keys.end(), plan.fit_x) - plan.keys.begin());
        std::vector<double> xs(plan.points);
        for (std::size_t i = 0; i < plan.points; ++i)
            xs[i] = parse_real("sweep." + plan.fit_x, points[i].get("params", plan.fit_x));
        for (const auto& yname : plan.fit_y) {
            std::vector<double> ys;
            ys.reserve(plan.points);
            for (std::size_t i = 0; i < plan.points; ++i) {
                if (!summaries[i]["values"].contains(yname))
                    throw std::invalid_argument("sweep.fit_y: '" + yname +
                                                "' is not a value of experiment '" + def.name +
                                                "'");
                ys.push_back(summaries[i]["values"][yname].get<double>());
            }
            auto f = fit_decay(xs, ys);
            ctx.fit(yname + "_vs_" + plan.fit_x, f);
            ctx.values["fit_" + yname + "_slope"] = f.fit.slope;
            char note[160];
            std::snprintf(note, sizeof(note), ", %s: slope %.4f (r2 %.4f, %d pts)", yname.c_str(),
                          f.fit.slope, f.fit.r2, f.n_used);
            fit_note += note;
        }
        (void)kx;
    }
    ctx.table("sweep", table);

    json sweep_info;
    sweep_info["keys"] = plan.keys;
    sweep_info["points"] = plan.points;
    RunResult r = finish(resolved, def.name, ctx, seconds, sweep_info);
    r.ok = all_ok;
    r.verdict_line = def.name + " sweep: " + std::to_string(plan.points) + " points" +
                     (all_ok ? "" : " (some points FAILED checks)") + fit_note;
    return r;
}

// ---------------------------------------------------------------------------
// reproductions
// ---------------------------------------------------------------------------

namespace {
const std::vector<std::pair<std::string, std::string>>& reproduction_table() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"sstar", "critical-exponent"},
        {"tau1", "stability-root"},
        {"heat-table", "heat-table"},
        {"resolvent-table", "resolvent-table"},
        {"heat-closed-form", "heat-closed-form"},
        {"abeta-window", "kernel-window"},
        {"projection-overshoot", "projection-overshoot"},
        {"tau2-counterexample", "tau2-counterexample"},
        {"sharp-max", "sharp-max"},
        {"blowup", "blowup"},
        {"energy-monotone", "energy-monotone"},
        {"margin-decay", "margin-decay"},
        {"overshoot-scaling", "overshoot-scaling"},
        {"kernel-bands", "kernel-bands"},
        {"strang-order", "strang-order"},
        {"adversarial", "adversarial"},
    };
    return table;
}
}  // namespace

std::vector<std::string> reproduction_names() {
    std::vector<std::string> names;
    for (const auto& [name, exp] : reproduction_table()) {
        (void)exp;
        names.push_back(name);
    }
    return names;
}

Config reproduction_config(const std::string& name) {
    for (const auto& [rname, exp] : reproduction_table()) {
        if (rname != name) continue;
        Config c;
        c.set("", "experiment", exp);
        return resolve_experiment_config(c);
    }
    std::string names;
    for (const auto& [rname, exp] : reproduction_table()) {
        (void)exp;
        names += (names.empty() ? "" : ", ") + rname;
    }
    throw std::invalid_argument("reproduce: unknown name '" + name + "' (available: " + names +
                                ")");
}

// ---------------------------------------------------------------------------
// fits
// ---------------------------------------------------------------------------

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    if (x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ybar = sy / n;
    for (size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return f;
}

DecayFit fit_decay(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_decay: size mismatch");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    DecayFit d;
    d.n_used = static_cast<int>(lx.size());
    if (d.n_used >= 2) d.fit = fit_line(lx, ly);
    return d;
}

}  // namespace speclab
