#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtm/constants.hpp"
#include "qtm/qudit.hpp"
#include "qtm/transmon.hpp"

namespace qtm {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Root of the readout-pulse constraint system. Sign conventions:
/// readout uses (epsilon, Delta1, Delta2) = (-e0, +D0, +D0), preparation
/// (+e0, -D0, -D0).
struct PulseSolution {
    double epsilon; // delta_omega * tau_p
    double xi;      // sqrt(epsilon^2 + 2 Delta^2)
    double delta;   // effective transition amplitude * tau_p
    double residual_amplitude; // |eps^2 - xi^2 (1 - 2 / (3 sin^2 xi))|
    double residual_phase;     // |cos e cos xi + (e/xi) sin e sin xi|
};

namespace pulse_detail {

inline double amplitude_constraint(double eps, double xi) {
    const double s = std::sin(xi);
    return eps * eps - xi * xi * (1.0 - 2.0 / (3.0 * s * s));
}

inline double phase_constraint(double eps, double xi) {
    return std::cos(eps) * std::cos(xi) + eps / xi * std::sin(eps) * std::sin(xi);
}

/// epsilon(xi) >= 0 from the amplitude constraint; requires sin^2 xi >= 2/3.
inline double epsilon_of_xi(double xi) {
    const double s = std::sin(xi);
    const double v = xi * xi * (1.0 - 2.0 / (3.0 * s * s));
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

} // namespace pulse_detail

/// All roots of the constraint system found in the admissible window
/// sin^2 xi >= 2/3, ordered by xi. Diagnostic companion to
/// solve_transcendental.
inline std::vector<PulseSolution> scan_transcendental_roots() {
    using namespace pulse_detail;
    const double lo = std::asin(std::sqrt(2.0 / 3.0));
    const double hi = pi - lo;
    const int n = 10000;
    auto g = [](double xi) { return phase_constraint(epsilon_of_xi(xi), xi); };

    std::vector<PulseSolution> roots;
    double prev_xi = lo + (hi - lo) * 1e-9;
    double prev_g = g(prev_xi);
    for (int i = 1; i <= n; ++i) {
        double xi = lo + (hi - lo) * (static_cast<double>(i) / n);
        if (i == n) xi = hi - (hi - lo) * 1e-9;
        double cur = g(xi);
        if (prev_g == 0.0 || (prev_g < 0.0) != (cur < 0.0)) {
            double a = prev_xi, b = xi;
            while (b - a > 1e-12) {
                double m = 0.5 * (a + b);
                if ((g(a) < 0.0) != (g(m) < 0.0)) b = m; else a = m;
            }
            const double xr = 0.5 * (a + b);
            const double er = epsilon_of_xi(xr);
            const double dr = std::sqrt(0.5 * (xr * xr - er * er));
            roots.push_back({er, xr, dr,
                             std::abs(amplitude_constraint(er, xr)),
                             std::abs(phase_constraint(er, xr))});
        }
        prev_xi = xi;
        prev_g = cur;
    }
    return roots;
}

/// The minimal-epsilon positive solution (shortest rf-pulse for a given
/// detuning): e0 ~ 0.8525, xi0 ~ 2.0205, D0 ~ 1.2953.
inline PulseSolution solve_transcendental() {
    auto roots = scan_transcendental_roots();
    if (roots.empty())
        throw SolverError("no root of the pulse constraint system in the scanned window");
    const PulseSolution* best = &roots.front();
    for (const auto& r : roots)
        if (r.epsilon < best->epsilon) best = &r;
    return *best;
}

using RealSym3 = std::array<double, 9>;

/// K = [[0, D1, 0], [D1, 2 eps, D2], [0, D2, 0]]; the pulse unitary is
/// exp(-i K).
inline RealSym3 generator_matrix(double eps, double d1, double d2) {
    if (!std::isfinite(eps) || !std::isfinite(d1) || !std::isfinite(d2))
        throw std::invalid_argument("generator parameters must be finite");
    return {0.0, d1, 0.0, d1, 2.0 * eps, d2, 0.0, d2, 0.0};
}

namespace pulse_detail {

/// Cyclic Jacobi eigendecomposition of a real symmetric 3x3 matrix.
/// Returns eigenvalues and orthonormal eigenvectors (columns of V).
inline void jacobi_eigen3(RealSym3 a, std::array<double, 3>& w, RealSym3& v) {
    v = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = std::abs(a[1]) + std::abs(a[2]) + std::abs(a[5]);
        if (off < 1e-300) break;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) {
                double apq = a[p * 3 + q];
                if (std::abs(apq) < 1e-300) continue;
                double app = a[p * 3 + p], aqq = a[q * 3 + q];
                double theta = 0.5 * (aqq - app) / apq;
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    double akp = a[k * 3 + p], akq = a[k * 3 + q];
                    a[k * 3 + p] = c * akp - s * akq;
                    a[k * 3 + q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    double apk = a[p * 3 + k], aqk = a[q * 3 + k];
                    a[p * 3 + k] = c * apk - s * aqk;
                    a[q * 3 + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    double vkp = v[k * 3 + p], vkq = v[k * 3 + q];
                    v[k * 3 + p] = c * vkp - s * vkq;
                    v[k * 3 + q] = s * vkp + c * vkq;
                }
            }
    }
    w = {a[0], a[4], a[8]};
}

} // namespace pulse_detail

/// exp(-i M) of a real symmetric 3x3 matrix via spectral decomposition.
inline UnitaryMatrix exp_neg_i(const RealSym3& m) {
    std::array<double, 3> w;
    RealSym3 v;
    pulse_detail::jacobi_eigen3(m, w, v);
    std::vector<Complex> u(9, 0.0);
    for (int l = 0; l < 3; ++l) {
        Complex phase = std::polar(1.0, -w[l]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                u[r * 3 + c] += phase * v[r * 3 + l] * v[c * 3 + l];
    }
    return UnitaryMatrix(3, std::move(u));
}

enum class PulseUnitaryMethod { closed_form, exponential };

/// Unitary generated by a rectangular two-tone pulse. The closed form is
/// the three-matrix sum with xi = sqrt(eps^2 + D1^2 + D2^2); the
/// exponential route diagonalizes K independently and is the oracle the
/// closed form is checked against.
inline UnitaryMatrix pulse_unitary(double eps, double d1, double d2,
                                   PulseUnitaryMethod method = PulseUnitaryMethod::closed_form) {
    if (method == PulseUnitaryMethod::exponential)
        return exp_neg_i(generator_matrix(eps, d1, d2));

    const double dd = d1 * d1 + d2 * d2;
    if (dd < 1e-300) {
        // Pure detuning: exp(-i diag(0, 2 eps, 0)).
        return UnitaryMatrix::diagonal({1.0, std::polar(1.0, -2.0 * eps), 1.0});
    }
    const double xi = std::sqrt(eps * eps + dd);
    const Complex e = std::polar(1.0, -eps);
    const double sincxi = (xi > 0.0) ? std::sin(xi) / xi : 1.0;
    const Complex c1 = e * std::cos(xi);
    const Complex c2 = Complex(0.0, 1.0) * e * sincxi;

    const double p11 = d1 * d1 / dd, p22 = d2 * d2 / dd, p12 = d1 * d2 / dd;
    std::vector<Complex> u(9);
    u[0] = p22 + c1 * p11 + c2 * (eps * p11);
    u[1] = c2 * (-d1);
    u[2] = -p12 + c1 * p12 + c2 * (eps * p12);
    u[3] = c2 * (-d1);
    u[4] = c1 + c2 * (-eps);
    u[5] = c2 * (-d2);
    u[6] = u[2];
    u[7] = c2 * (-d2);
    u[8] = p11 + c1 * p22 + c2 * (eps * p22);
    return UnitaryMatrix(3, std::move(u));
}

struct ProtocolUnitaries {
    UnitaryMatrix readout;      // U_r = U(-e0, +D0, +D0)
    UnitaryMatrix preparation;  // U_p = U(+e0, -D0, -D0) = U_r^dagger
};

inline ProtocolUnitaries protocol_unitaries(const PulseSolution& sol) {
    UnitaryMatrix ur = pulse_unitary(-sol.epsilon, sol.delta, sol.delta);
    UnitaryMatrix up = pulse_unitary(sol.epsilon, -sol.delta, -sol.delta);
    if (up.max_entry_distance(ur.adjoint()) > 1e-10)
        throw SolverError("preparation pulse is not the adjoint of the readout pulse");
    return {std::move(ur), std::move(up)};
}

enum class EqualModulusClass { fourier, inverse_fourier, neither };

/// Strips left/right diagonal phases off a 3x3 unitary whose entries all
/// have modulus 1/sqrt(3) and classifies the residual phase pattern as
/// F3, F3^-1, or neither (also when the moduli are not all 1/sqrt(3)).
inline EqualModulusClass equal_modulus_classification(const UnitaryMatrix& u) {
    if (u.dim() != 3) throw std::invalid_argument("classification needs a 3x3 unitary");
    const double target = 1.0 / std::sqrt(3.0);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (std::abs(std::abs(u(r, c)) - target) > 1e-6)
                return EqualModulusClass::neither;

    // Left phases make column 0 real positive, right phases then fix row 0.
    std::array<Complex, 3> left, right;
    for (int r = 0; r < 3; ++r) left[r] = std::abs(u(r, 0)) / u(r, 0);
    for (int c = 0; c < 3; ++c) {
        Complex e = left[0] * u(0, c);
        right[c] = std::abs(e) / e;
    }
    // Rescale to unit modulus so the core compares against pure phases.
    auto canon = [&](int r, int c) { return std::sqrt(3.0) * left[r] * u(r, c) * right[c]; };

    const Complex w = std::polar(1.0, two_pi / 3.0);
    auto matches = [&](const Complex& a11) {
        // The 2x2 core of F3 (a11 = w) or F3^-1 (a11 = conj(w)) determines
        // the rest through the orthogonality constraints.
        return std::abs(canon(1, 1) - a11) < 1e-6 &&
               std::abs(canon(2, 2) - a11) < 1e-6 &&
               std::abs(canon(1, 2) - std::conj(a11)) < 1e-6 &&
               std::abs(canon(2, 1) - std::conj(a11)) < 1e-6;
    };
    if (matches(w)) return EqualModulusClass::fourier;
    if (matches(std::conj(w))) return EqualModulusClass::inverse_fourier;
    return EqualModulusClass::neither;
}

enum class PulseMode { readout, preparation };

struct IQSettings {
    double a1;          // V
    double a2;          // V
    double omega_lo;    // rad/s
    double omega_if;    // rad/s
    double carrier_phase; // rad
    std::function<double(double)> envelope; // dimensionless Omega(t)
    double sample_rate; // Hz
};

/// Mixer settings producing the two-tone pulse of the requested mode.
/// Readout: omega_IF = (w01 - w12)/2 - 2 dw, phase 0; preparation flips
/// the detuning sign and uses phase pi, reversing eps, Delta1, Delta2.
inline IQSettings iq_pulse_settings(PulseMode mode, const TransmonParams& device,
                                    double reference_flux, double detuning, double v1,
                                    double v2, double sample_rate = 0.0) {
    device.validate();
    const double w01 = transition_frequency(device, reference_flux, 0);
    const double w12 = transition_frequency(device, reference_flux, 1);
    const double base_if = 0.5 * (w01 - w12);
    IQSettings s;
    s.a1 = 2.0 * (v1 + v2);
    s.a2 = 2.0 * (v2 - v1);
    s.omega_lo = 0.5 * (w01 + w12);
    s.omega_if = (mode == PulseMode::readout) ? base_if - 2.0 * detuning
                                              : base_if + 2.0 * detuning;
    s.carrier_phase = (mode == PulseMode::readout) ? 0.0 : pi;
    s.envelope = [](double) { return 1.0; };
    s.sample_rate = sample_rate;
    if (s.omega_if <= 0.0)
        throw std::invalid_argument("omega_IF must be positive; reduce the detuning");
    return s;
}

struct Waveform {
    double sample_rate; // Hz
    std::vector<double> samples; // V, uniform grid starting at t = 0

    double time(std::size_t i) const { return static_cast<double>(i) / sample_rate; }
};

/// V(t) = Omega(t)/4 [(A1-A2) cos((LO+IF) t + phi) + (A1+A2) cos((LO-IF) t - phi)]
/// sampled over [0, tau_p].
inline Waveform synthesize_waveform(const IQSettings& s, double tau_p) {
    const double max_tone = (s.omega_lo + s.omega_if) / two_pi;
    if (!(s.sample_rate > 4.0 * max_tone))
        throw std::invalid_argument("sample rate must exceed 4x the highest tone frequency");
    const std::size_t n = static_cast<std::size_t>(std::floor(tau_p * s.sample_rate)) + 1;
    Waveform w{s.sample_rate, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = w.time(i);
        w.samples[i] = s.envelope(t) / 4.0 *
                       ((s.a1 - s.a2) * std::cos((s.omega_lo + s.omega_if) * t + s.carrier_phase) +
                        (s.a1 + s.a2) * std::cos((s.omega_lo - s.omega_if) * t - s.carrier_phase));
    }
    return w;
}

/// Rotating-frame three-level Hamiltonian (in rad/s, i.e. H/hbar):
/// diag(0, w01 - w1, w01 + w12 - w1 - w2) with off-diagonals
/// Omega(t) Delta1 and Omega(t) Delta2.
inline std::function<RealSym3(double)>
rotating_frame_hamiltonian(const TransmonParams& device, double reference_flux,
                           double omega1, double omega2,
                           std::function<double(double)> envelope, double delta1,
                           double delta2) {
    device.validate();
    const double w01 = transition_frequency(device, reference_flux, 0);
    const double w12 = transition_frequency(device, reference_flux, 1);
    const double diag1 = w01 - omega1;
    const double diag2 = w01 + w12 - omega1 - omega2;
    return [=, env = std::move(envelope)](double t) -> RealSym3 {
        const double o = env(t);
        return {0.0, o * delta1, 0.0, o * delta1, diag1, o * delta2, 0.0, o * delta2, diag2};
    };
}

} // namespace qtm
