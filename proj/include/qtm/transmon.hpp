#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "qtm/constants.hpp"

namespace qtm {

/// Flux-tunable transmon device constants. n_g is accepted for completeness
/// but the perturbative spectrum does not depend on it; in the transmon
/// limit its effect is exponentially small.
struct TransmonParams {
    double charging_energy = 0.0;   // E_C, J
    double josephson_sum = 0.0;     // E_J_Sigma, J
    double asymmetry = 0.0;         // a in [0, 1]
    double loop_area = 0.0;         // A, m^2
    double charge_bias = 0.0;       // n_g, unused by the spectrum

    void validate() const {
        if (!(charging_energy > 0.0)) throw std::invalid_argument("E_C must be positive");
        if (!(josephson_sum > 0.0)) throw std::invalid_argument("E_J_Sigma must be positive");
        if (asymmetry < 0.0 || asymmetry > 1.0)
            throw std::invalid_argument("asymmetry must lie in [0, 1]");
        if (!(loop_area > 0.0)) throw std::invalid_argument("loop area must be positive");
    }

    /// The device is meant to operate at E_J/E_C ~ 80-200; outside that
    /// window the perturbative spectrum degrades.
    std::optional<std::string> regime_warning(double flux) const;
};

struct FluxPoint {
    double flux;          // Wb
    double reduced;       // pi Phi / Phi_0, rad

    explicit FluxPoint(double phi)
        : flux(phi), reduced(pi * phi / constants().flux_quantum) {
        if (!std::isfinite(phi)) throw std::invalid_argument("flux must be finite");
    }
};

/// E_J(Phi) = E_J_Sigma sqrt(cos^2 f + a^2 sin^2 f), f = pi Phi / Phi_0.
inline double josephson_energy(const TransmonParams& p, double flux) {
    const double f = FluxPoint(flux).reduced;
    const double c = std::cos(f), s = std::sin(f);
    return p.josephson_sum * std::sqrt(c * c + p.asymmetry * p.asymmetry * s * s);
}

/// dE_J/dPhi, analytic.
inline double josephson_energy_derivative(const TransmonParams& p, double flux) {
    const double f = FluxPoint(flux).reduced;
    const double c = std::cos(f), s = std::sin(f);
    const double a2 = p.asymmetry * p.asymmetry;
    const double root = std::sqrt(c * c + a2 * s * s);
    return -p.josephson_sum * (pi / constants().flux_quantum) * (1.0 - a2) * s * c / root;
}

/// E_n = sqrt(8 E_C E_J)(n + 1/2) - E_J - (E_C/12)(6 n^2 + 6 n + 3).
inline double energy_level(const TransmonParams& p, double flux, int n) {
    if (n < 0) throw std::invalid_argument("level index must be non-negative");
    const double ej = josephson_energy(p, flux);
    const double ec = p.charging_energy;
    return std::sqrt(8.0 * ec * ej) * (n + 0.5) - ej -
           ec / 12.0 * (6.0 * n * n + 6.0 * n + 3.0);
}

inline std::optional<std::string> TransmonParams::regime_warning(double flux) const {
    const double ratio = josephson_energy(*this, flux) / charging_energy;
    if (ratio < 80.0 || ratio > 200.0)
        return "E_J/E_C = " + std::to_string(ratio) + " outside the transmon regime 80-200";
    if (std::sqrt(8.0 * charging_energy / josephson_energy(*this, flux)) > 0.5)
        return "perturbative spectrum degrades: sqrt(8 E_C / E_J) > 0.5";
    return std::nullopt;
}

/// w_{n,n+1} = (E_{n+1} - E_n)/hbar = (sqrt(8 E_C E_J) - E_C (n+1))/hbar.
inline double transition_frequency(const TransmonParams& p, double flux, int n) {
    if (n < 0) throw std::invalid_argument("level index must be non-negative");
    const double ej = josephson_energy(p, flux);
    const double ec = p.charging_energy;
    return (std::sqrt(8.0 * ec * ej) - ec * (n + 1.0)) / constants().hbar;
}

/// mu = hbar A dw01/dPhi. Only the sqrt(8 E_C E_J) term of the spectrum
/// carries flux dependence of w01: the -E_J contribution cancels in the
/// level difference.
inline double magnetic_moment(const TransmonParams& p, double flux) {
    const double ej = josephson_energy(p, flux);
    const double ec = p.charging_energy;
    // d(sqrt(8 ec ej))/dPhi = sqrt(2 ec / ej) dej/dPhi
    return p.loop_area * std::sqrt(2.0 * ec / ej) * josephson_energy_derivative(p, flux);
}

/// Closed-form magnitude from the near-bottom estimate
/// mu = pi (A / Phi_0) sqrt(8 E_C E_J_Sigma / a); reported as a diagnostic,
/// not asserted against the numerical maximum.
inline double magnetic_moment_closed_form_estimate(const TransmonParams& p) {
    if (!(p.asymmetry > 0.0)) throw std::invalid_argument("estimate needs a > 0");
    return pi * p.loop_area / constants().flux_quantum *
           std::sqrt(8.0 * p.charging_energy * p.josephson_sum / p.asymmetry);
}

/// Flux satisfying tan^2(pi Phi / Phi_0) = 1/a, the textbook closed-form
/// candidate for the working point.
inline double tan_condition_flux(const TransmonParams& p) {
    if (!(p.asymmetry > 0.0)) throw std::invalid_argument("tan condition needs a > 0");
    return std::atan(1.0 / std::sqrt(p.asymmetry)) * constants().flux_quantum / pi;
}

struct BiasOptimum {
    double flux;            // maximizer of |mu|, Wb
    double moment;          // mu at the maximizer (signed), J/T
    double tan_candidate_flux;   // closed-form candidate, Wb
    double closed_form_estimate_moment; // near-bottom closed-form magnitude, J/T
    bool validity_warning;  // true when the spectrum approximation is doubtful there
};

/// Maximizes |mu(Phi_c)| over Phi_c in (0, Phi_0/2) by grid scan plus
/// golden-section refinement.
inline BiasOptimum optimal_bias(const TransmonParams& p) {
    p.validate();
    if (!(p.asymmetry > 0.0))
        throw std::invalid_argument("optimal_bias needs 0 < a < 1: the a = 0 maximum sits at "
                                    "Phi_0/2 where the perturbative spectrum breaks down");
    const double phi0 = constants().flux_quantum;
    auto neg_abs_mu = [&](double phi) { return -std::abs(magnetic_moment(p, phi)); };

    const int grid = 2000;
    double best_phi = phi0 / 4.0;
    double best_val = neg_abs_mu(best_phi);
    for (int i = 1; i < grid; ++i) {
        double phi = 0.5 * phi0 * i / grid;
        double v = neg_abs_mu(phi);
        if (v < best_val) { best_val = v; best_phi = phi; }
    }

    // Golden-section refine around the grid minimum.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::max(best_phi - 0.5 * phi0 / grid, 1e-6 * phi0);
    double b = std::min(best_phi + 0.5 * phi0 / grid, 0.5 * phi0 - 1e-6 * phi0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    while (b - a > 1e-13 * phi0) {
        if (neg_abs_mu(c) < neg_abs_mu(d)) { b = d; } else { a = c; }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    const double phi_star = 0.5 * (a + b);
    const double mu_star = magnetic_moment(p, phi_star);
    const bool warn = p.regime_warning(phi_star).has_value();
    return {phi_star, mu_star, tan_condition_flux(p), magnetic_moment_closed_form_estimate(p), warn};
}

/// Exact accumulated phase [w01(Phi) - w01(Phi_c)] tau.
inline double accumulated_phase(const TransmonParams& p, double reference_flux,
                                double flux, double tau) {
    return (transition_frequency(p, flux, 0) - transition_frequency(p, reference_flux, 0)) * tau;
}

/// Linearized phase mu dH tau / hbar with Phi - Phi_c = A dH.
inline double linearized_phase(double mu, double field_offset, double tau) {
    return mu * field_offset * tau / constants().hbar;
}

} // namespace qtm
