#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtm/qudit.hpp"
#include "qtm/rng.hpp"
#include "qtm/transmon.hpp"

namespace qtm {

enum class RunMode { analytic, sampled };

/// K-step Fourier estimation loop configuration. h0 = H0 / d is the field
/// scale of the base-d fractional representation; tau0 satisfies
/// mu h0 tau0 / hbar = 2 pi / d for the matching oracle.
struct ProtocolConfig {
    int base = 3;
    int steps = 3;
    double tau0 = 1.0;     // s
    double field_range = 1.0; // H0, tesla
    RunMode mode = RunMode::analytic;
    std::uint64_t seed = 0;

    double h0() const { return field_range / base; }

    void validate() const {
        if (base < 2) throw std::invalid_argument("protocol base must be >= 2");
        if (steps < 1) throw std::invalid_argument("protocol needs at least one step");
        if (!(tau0 > 0.0)) throw std::invalid_argument("tau0 must be positive");
        if (!(field_range > 0.0)) throw std::invalid_argument("field range must be positive");
    }
};

/// Maps a Ramsey delay to the accumulated phase; linear in tau for the
/// ideal oracle.
using PhaseOracle = std::function<double(double tau)>;

/// Ideal oracle for a true field H under the tau0 calibration
/// mu h0 tau0 / hbar = 2 pi / d, i.e. phi(tau) = 2 pi H tau / (H0 tau0).
inline PhaseOracle ideal_oracle(const ProtocolConfig& cfg, double field) {
    cfg.validate();
    const double rate = two_pi * field / (cfg.field_range * cfg.tau0);
    return [rate](double tau) { return rate * tau; };
}

/// Physical oracle phi(tau) = [w01(Phi) - w01(Phi_c)] tau for a flux-biased
/// transmon. Used with the pulse-module unitaries the full Ramsey cycle
/// reproduces the ideal-oracle outcome probabilities.
inline PhaseOracle transmon_backend(const TransmonParams& device, double flux,
                                    double reference_flux) {
    device.validate();
    const double dw = transition_frequency(device, flux, 0) -
                      transition_frequency(device, reference_flux, 0);
    return [dw](double tau) { return dw * tau; };
}

struct MeasurementRecord {
    int step;                     // digit index k (0 = most significant)
    double delay;                 // tau_k, s
    double compensation;          // theta_k, rad
    int outcome;
    std::vector<double> probabilities;
};

/// Per-step outcome distribution from the step phase alone:
/// P_j = (1/d^2) |sum_m exp(i m (phi - 2 pi j / d))|^2.
inline std::vector<double> digit_probabilities_from_phase(int d, double phi) {
    std::vector<double> p(d);
    for (int j = 0; j < d; ++j) {
        Complex s = 0.0;
        for (int m = 0; m < d; ++m)
            s += std::polar(1.0, m * (phi - two_pi * j / d));
        p[j] = std::norm(s) / (static_cast<double>(d) * d);
    }
    return p;
}

/// Distribution for true digit t with a scaled residual phase:
/// phi = (2 pi / d) t + step_scale * residual. For d = 3 this reduces to
/// P_j = (1/9) [1 + 2 cos(phi - 2 pi j / 3)]^2.
inline std::vector<double> digit_probabilities(int t_true, double residual, int d,
                                               double step_scale) {
    if (t_true < 0 || t_true >= d) throw std::invalid_argument("digit out of range");
    return digit_probabilities_from_phase(d, two_pi * t_true / d + step_scale * residual);
}

/// H = h0 * sum_k digits[k] / d^k.
inline double decode_field(const DigitString& digits, double h0) {
    return h0 * digits.fraction();
}

/// Smallest-index argmax; ties at sector boundaries go to the lower digit.
inline int argmax_digit(const std::vector<double>& p) {
    int best = 0;
    for (int j = 1; j < static_cast<int>(p.size()); ++j)
        if (p[j] > p[best]) best = j;
    return best;
}

/// Runs the K-step semi-classical Fourier loop, least significant digit
/// first: balanced state, phase accumulation over tau_k = d^k tau0,
/// compensation for already-found digits, inverse Fourier, projective
/// readout.
inline std::pair<DigitString, std::vector<MeasurementRecord>>
run_fourier_estimation(const ProtocolConfig& cfg, const PhaseOracle& oracle) {
    cfg.validate();
    const int d = cfg.base;
    const int K = cfg.steps;
    SplitMix64 rng = stream_for_run(cfg.seed, 0);

    const UnitaryMatrix inv_fourier = inverse_fourier_matrix(d);
    std::vector<int> found;  // least significant first
    std::vector<MeasurementRecord> records;
    records.reserve(K);

    for (int k = K - 1; k >= 0; --k) {
        const double tau_k = std::pow(static_cast<double>(d), k) * cfg.tau0;
        const double phi = oracle(tau_k);
        if (!std::isfinite(phi)) throw std::runtime_error("phase oracle returned non-finite phase");

        // Suffix of already-measured digits, nearest (one position down) first.
        std::vector<int> suffix(found.rbegin(), found.rend());
        const double theta = compensation_angle(d, suffix);

        QuditState s = balanced_state(d);
        s = apply(phase_evolution(d, phi), s);
        s = apply(compensation_unitary(d, suffix), s);
        s = apply(inv_fourier, s);

        std::vector<double> p = born_probabilities(s);
        int outcome = (cfg.mode == RunMode::analytic) ? argmax_digit(p)
                                                      : sample_outcome(s, rng);
        records.push_back({k, tau_k, theta, outcome, std::move(p)});
        found.push_back(outcome);
    }

    std::vector<int> msf(found.rbegin(), found.rend());
    return {DigitString(d, std::move(msf)), std::move(records)};
}

} // namespace qtm
