#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qtm/constants.hpp"
#include "qtm/qudit.hpp"

namespace qtm {

/// Posterior profile P(phi | x) for a K-step base-d run with reference
/// phase phi_tilde = (2 pi / d) sum_k x_k / d^k.
struct PosteriorSpec {
    int base;
    int steps;
    double reference_phase; // in [0, 2 pi)

    static PosteriorSpec from_digits(const DigitString& digits) {
        double phi = two_pi / digits.base() * digits.fraction();
        return {digits.base(), digits.length(), std::fmod(phi, two_pi)};
    }
};

namespace detail {

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

/// Adaptive Simpson on [a, b] with absolute tolerance. The first `force`
/// levels always refine: narrow peaks or oscillations commensurate with the
/// initial stride would otherwise terminate the recursion prematurely.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth, int force, double fa,
                               double fm, double fb, double whole) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (force <= 0 && (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol))
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, 0.5 * tol, depth - 1, force - 1, fa, flm, fm, left) +
           adaptive_simpson(f, m, b, 0.5 * tol, depth - 1, force - 1, fm, frm, fb, right);
}

} // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-8, int depth = 50) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson(f, a, b, tol, depth, 8, fa, fm, fb, whole);
}

/// Closed-form posterior density
/// (1/2pi) sin^2[d^K delta / 2] / (d^K sin^2[delta / 2]); the removable
/// singularity at delta = 0 is handled through the sinc form, giving the
/// limit value d^K / 2pi at the reference phase.
inline double posterior_density(double phi, const PosteriorSpec& spec) {
    if (spec.base < 2 || spec.steps < 1)
        throw std::invalid_argument("posterior needs d >= 2, K >= 1");
    const double n = std::pow(static_cast<double>(spec.base), spec.steps);
    double delta = std::remainder(phi - spec.reference_phase, two_pi);
    const double x = 0.5 * delta;
    const double sn = detail::sinc(n * x);
    const double s1 = detail::sinc(x);
    // Away from the peak plain sines are cheaper and avoid the huge n*x
    // argument of sinc cancellation; use them unless delta is tiny.
    if (std::abs(delta) > 1e-6) {
        const double num = std::sin(n * x);
        const double den = std::sin(x);
        return num * num / (n * den * den) / two_pi;
    }
    return n / two_pi * (sn * sn) / (s1 * s1);
}

/// Product-form posterior: per-step likelihood factors
/// (1/d^2) |sum_m exp(i m d^k delta)|^2 multiplied over k and normalized
/// by d^K / 2pi. Serves as the independent route against the closed form.
inline double posterior_product(double phi, const DigitString& digits) {
    const int d = digits.base();
    const int K = digits.length();
    const double phi_tilde = two_pi / d * digits.fraction();
    double value = 1.0;
    double scale = 1.0;
    for (int k = 0; k < K; ++k) {
        Complex s = 0.0;
        for (int m = 0; m < d; ++m)
            s += std::polar(1.0, m * scale * (phi - phi_tilde));
        value *= std::norm(s) / (static_cast<double>(d) * d);
        scale *= d;
    }
    return value * std::pow(static_cast<double>(d), K) / two_pi;
}

/// Posterior mass of the central peak, delta in [-2 pi / d^K, 2 pi / d^K].
inline double central_peak_probability(int d, int K, double tol = 1e-8) {
    if (d < 2 || K < 1) throw std::invalid_argument("need d >= 2, K >= 1");
    PosteriorSpec spec{d, K, 0.0};
    const double half_width = two_pi / std::pow(static_cast<double>(d), K);
    return integrate([&](double phi) { return posterior_density(phi, spec); },
                     -half_width, half_width, tol);
}

/// Net phase-accumulation time tau0 sum_{k=0}^{K-1} d^k.
inline double coherence_time(int d, int K, double tau0) {
    if (d < 2 || K < 1 || !(tau0 > 0.0)) throw std::invalid_argument("invalid resource inputs");
    double sum = 0.0, term = 1.0;
    for (int k = 0; k < K; ++k) { sum += term; term *= d; }
    return tau0 * sum;
}

struct ResourceBudget {
    double total_time; // s
    int steps;
    double tau0;       // s

    static ResourceBudget from(int d, int K, double tau0) {
        return {coherence_time(d, K, tau0), K, tau0};
    }
};

/// Heisenberg-limit sensitivity dH = 2 pi hbar / [mu (d - 1) T].
inline double heisenberg_precision(int d, double total_time, double mu) {
    if (d < 2 || !(total_time > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("invalid precision inputs");
    return two_pi * constants().hbar / (mu * (d - 1) * total_time);
}

/// T2-limited resolution 2 pi hbar / (mu d T2).
inline double t2_limited_precision(double mu, int d, double t2) {
    if (!(mu > 0.0) || d < 2 || !(t2 > 0.0)) throw std::invalid_argument("invalid inputs");
    return two_pi * constants().hbar / (mu * d * t2);
}

/// Standard-scaling resolution 2 pi hbar / (mu d sqrt(T2 t)) for t >= T2.
inline double long_time_precision(double mu, int d, double t2, double t) {
    if (t < t2) throw std::invalid_argument("long-time formula needs t >= T2");
    return two_pi * constants().hbar / (mu * d * std::sqrt(t2 * t));
}

/// Repetition-dominated resolution 2 pi hbar / (mu d T2 sqrt(t / T_rep)).
inline double long_time_precision_rep(double mu, int d, double t2, double t_rep, double t) {
    if (t < t_rep || t_rep < t2)
        throw std::invalid_argument("repetition formula needs t >= T_rep >= T2");
    return two_pi * constants().hbar / (mu * d * t2 * std::sqrt(t / t_rep));
}

/// K = ceil(-log_d r) steps to reach relative precision r.
inline int steps_required(int d, double relative_precision) {
    if (d < 2 || !(relative_precision > 0.0) || !(relative_precision < 1.0))
        throw std::invalid_argument("need d >= 2 and 0 < r < 1");
    double k = -std::log(relative_precision) / std::log(static_cast<double>(d));
    // Guard against 3^-5 style inputs landing epsilon above an integer.
    double rounded = std::round(k);
    if (std::abs(k - rounded) < 1e-9) return static_cast<int>(rounded);
    return static_cast<int>(std::ceil(k));
}

/// Asymptotic step-count ratio K_{d2} / K_{d1} -> ln d1 / ln d2.
inline double step_ratio(int d1, int d2) {
    if (d1 < 2 || d2 < 2) throw std::invalid_argument("bases must be >= 2");
    return std::log(static_cast<double>(d1)) / std::log(static_cast<double>(d2));
}

/// Sampled posterior profile for plotting, as (delta_phi, density) rows.
inline std::vector<std::pair<double, double>>
density_profile(const PosteriorSpec& spec, const std::vector<double>& grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double dphi : grid)
        out.emplace_back(dphi, posterior_density(spec.reference_phase + dphi, spec));
    return out;
}

} // namespace qtm
