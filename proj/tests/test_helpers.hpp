#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qtm/qudit.hpp"
#include "qtm/rng.hpp"

namespace qtm::test {

/// Haar-ish random unitary via Gram-Schmidt on a random complex matrix.
/// Good enough for invariance checks; no distribution claims.
inline UnitaryMatrix random_unitary(int d, SplitMix64& rng) {
    std::vector<std::vector<Complex>> cols(d, std::vector<Complex>(d));
    for (auto& col : cols)
        for (auto& x : col)
            x = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
    for (int c = 0; c < d; ++c) {
        for (int prev = 0; prev < c; ++prev) {
            Complex dot = 0.0;
            for (int r = 0; r < d; ++r) dot += std::conj(cols[prev][r]) * cols[c][r];
            for (int r = 0; r < d; ++r) cols[c][r] -= dot * cols[prev][r];
        }
        double n = 0.0;
        for (int r = 0; r < d; ++r) n += std::norm(cols[c][r]);
        n = std::sqrt(n);
        for (int r = 0; r < d; ++r) cols[c][r] /= n;
    }
    std::vector<Complex> e(static_cast<std::size_t>(d) * d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            e[static_cast<std::size_t>(r) * d + c] = cols[c][r];
    return UnitaryMatrix(d, std::move(e));
}

inline QuditState random_state(int d, SplitMix64& rng) {
    std::vector<Complex> a(d);
    double n = 0.0;
    for (auto& x : a) {
        x = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
        n += std::norm(x);
    }
    n = std::sqrt(n);
    for (auto& x : a) x /= n;
    return QuditState(d, std::move(a));
}

/// Counting state |psi_j> = F_d |j>: amplitudes e^{2 pi i j n / d} / sqrt d.
inline QuditState counting_state(int d, int j) {
    std::vector<Complex> a(d);
    for (int n = 0; n < d; ++n)
        a[n] = std::polar(1.0 / std::sqrt(static_cast<double>(d)), two_pi * j * n / d);
    return QuditState(d, std::move(a));
}

} // namespace qtm::test
