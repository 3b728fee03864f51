#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qtm/constants.hpp"
#include "qtm/rng.hpp"

namespace qtm {

using Complex = std::complex<double>;

inline constexpr double algebra_tol = 1e-12;

/// Normalized complex amplitude vector of dimension d.
class QuditState {
  public:
    QuditState(int dim, std::vector<Complex> amplitudes)
        : dim_(dim), amp_(std::move(amplitudes)) {
        if (dim_ < 2) throw std::invalid_argument("qudit dimension must be >= 2");
        if (static_cast<int>(amp_.size()) != dim_)
            throw std::invalid_argument("amplitude count does not match dimension");
        double n2 = 0.0;
        for (const auto& a : amp_) n2 += std::norm(a);
        if (std::abs(n2 - 1.0) > algebra_tol)
            throw std::invalid_argument("state is not normalized");
    }

    /// Computational basis state |j>.
    static QuditState basis(int dim, int j) {
        if (dim < 2) throw std::invalid_argument("qudit dimension must be >= 2");
        if (j < 0 || j >= dim) throw std::invalid_argument("basis index out of range");
        std::vector<Complex> a(dim, 0.0);
        a[j] = 1.0;
        return QuditState(dim, std::move(a));
    }

    int dim() const { return dim_; }
    const std::vector<Complex>& amplitudes() const { return amp_; }
    Complex amplitude(int j) const { return amp_.at(j); }

    /// Canonical form for comparisons up to global phase: first amplitude
    /// with |a| > tol is rotated to the real-positive axis.
    QuditState canonical() const {
        for (const auto& a : amp_) {
            if (std::abs(a) > 1e-9) {
                Complex phase = std::abs(a) / a;
                std::vector<Complex> out(amp_.size());
                for (std::size_t i = 0; i < amp_.size(); ++i) out[i] = amp_[i] * phase;
                return QuditState(dim_, std::move(out));
            }
        }
        return *this;
    }

    double distance_up_to_phase(const QuditState& other) const {
        if (dim_ != other.dim_) throw std::invalid_argument("dimension mismatch");
        QuditState a = canonical();
        QuditState b = other.canonical();
        double m = 0.0;
        for (int i = 0; i < dim_; ++i)
            m = std::max(m, std::abs(a.amp_[i] - b.amp_[i]));
        return m;
    }

  private:
    int dim_;
    std::vector<Complex> amp_;
};

/// d x d complex matrix with a unitarity invariant, row-major.
class UnitaryMatrix {
  public:
    UnitaryMatrix(int dim, std::vector<Complex> entries)
        : dim_(dim), m_(std::move(entries)) {
        if (dim_ < 1) throw std::invalid_argument("matrix dimension must be positive");
        if (static_cast<int>(m_.size()) != dim_ * dim_)
            throw std::invalid_argument("entry count does not match dimension");
        if (unitarity_defect() > algebra_tol)
            throw std::invalid_argument("matrix is not unitary");
    }

    static UnitaryMatrix identity(int dim) {
        std::vector<Complex> e(static_cast<std::size_t>(dim) * dim, 0.0);
        for (int i = 0; i < dim; ++i) e[static_cast<std::size_t>(i) * dim + i] = 1.0;
        return UnitaryMatrix(dim, std::move(e));
    }

    static UnitaryMatrix diagonal(std::vector<Complex> phases) {
        int d = static_cast<int>(phases.size());
        std::vector<Complex> e(static_cast<std::size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i) e[static_cast<std::size_t>(i) * d + i] = phases[i];
        return UnitaryMatrix(d, std::move(e));
    }

    int dim() const { return dim_; }
    Complex operator()(int r, int c) const { return m_[static_cast<std::size_t>(r) * dim_ + c]; }
    const std::vector<Complex>& entries() const { return m_; }

    UnitaryMatrix adjoint() const {
        std::vector<Complex> e(m_.size());
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c)
                e[static_cast<std::size_t>(c) * dim_ + r] = std::conj((*this)(r, c));
        return UnitaryMatrix(dim_, std::move(e));
    }

    UnitaryMatrix operator*(const UnitaryMatrix& rhs) const {
        if (dim_ != rhs.dim_) throw std::invalid_argument("dimension mismatch");
        std::vector<Complex> e(m_.size(), 0.0);
        for (int r = 0; r < dim_; ++r)
            for (int k = 0; k < dim_; ++k) {
                Complex a = (*this)(r, k);
                for (int c = 0; c < dim_; ++c)
                    e[static_cast<std::size_t>(r) * dim_ + c] += a * rhs(k, c);
            }
        return UnitaryMatrix(dim_, std::move(e));
    }

    /// max_ij |(U^dag U - I)_ij|
    double unitarity_defect() const {
        double worst = 0.0;
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) {
                Complex s = 0.0;
                for (int k = 0; k < dim_; ++k)
                    s += std::conj((*this)(k, r)) * (*this)(k, c);
                if (r == c) s -= 1.0;
                worst = std::max(worst, std::abs(s));
            }
        return worst;
    }

    double max_entry_distance(const UnitaryMatrix& other) const {
        if (dim_ != other.dim_) throw std::invalid_argument("dimension mismatch");
        double m = 0.0;
        for (std::size_t i = 0; i < m_.size(); ++i)
            m = std::max(m, std::abs(m_[i] - other.m_[i]));
        return m;
    }

  private:
    int dim_;
    std::vector<Complex> m_;
};

/// Base-d digit sequence, most-significant-first: digit k carries weight d^-k.
class DigitString {
  public:
    DigitString(int base, std::vector<int> digits)
        : base_(base), digits_(std::move(digits)) {
        if (base_ < 2) throw std::invalid_argument("digit base must be >= 2");
        for (int d : digits_)
            if (d < 0 || d >= base_)
                throw std::invalid_argument("digit out of range for base");
    }

    int base() const { return base_; }
    int length() const { return static_cast<int>(digits_.size()); }
    int digit(int k) const { return digits_.at(k); }
    const std::vector<int>& digits() const { return digits_; }

    /// Fractional value sum_k digits[k] / base^k (digit 0 has weight 1).
    double fraction() const {
        double v = 0.0;
        double w = 1.0;
        for (int d : digits_) {
            v += d * w;
            w /= base_;
        }
        return v;
    }

    bool operator==(const DigitString& rhs) const {
        return base_ == rhs.base_ && digits_ == rhs.digits_;
    }

  private:
    int base_;
    std::vector<int> digits_;
};

/// |psi_0> = (1/sqrt d) sum_j |j>
inline QuditState balanced_state(int d) {
    if (d < 2) throw std::invalid_argument("qudit dimension must be >= 2");
    std::vector<Complex> a(d, Complex(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
    return QuditState(d, std::move(a));
}

/// Entry (k, n) = exp(-2 pi i n k / d) / sqrt(d).
inline UnitaryMatrix inverse_fourier_matrix(int d) {
    if (d < 2) throw std::invalid_argument("qudit dimension must be >= 2");
    std::vector<Complex> e(static_cast<std::size_t>(d) * d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < d; ++k)
        for (int n = 0; n < d; ++n)
            e[static_cast<std::size_t>(k) * d + n] =
                norm * std::polar(1.0, -two_pi * n * k / d);
    return UnitaryMatrix(d, std::move(e));
}

inline UnitaryMatrix fourier_matrix(int d) { return inverse_fourier_matrix(d).adjoint(); }

/// diag(exp(i j phi)), j = 0..d-1; the overall phase is already dropped.
inline UnitaryMatrix phase_evolution(int d, double phi) {
    if (d < 2) throw std::invalid_argument("qudit dimension must be >= 2");
    if (!std::isfinite(phi)) throw std::invalid_argument("phase must be finite");
    std::vector<Complex> p(d);
    for (int j = 0; j < d; ++j) p[j] = std::polar(1.0, j * phi);
    return UnitaryMatrix::diagonal(std::move(p));
}

/// Compensation angle for the already-measured lower-significance digits:
/// theta = (2 pi / d) * sum_m suffix[m-1] / d^m, m counted from the current
/// digit (the first suffix entry sits one position down).
inline double compensation_angle(int d, const std::vector<int>& suffix) {
    double sum = 0.0;
    double w = 1.0 / d;
    for (int s : suffix) {
        if (s < 0 || s >= d) throw std::invalid_argument("suffix digit out of range");
        sum += s * w;
        w /= d;
    }
    return two_pi / d * sum;
}

/// diag(1, e^{-i theta}, ..., e^{-i(d-1) theta}).
inline UnitaryMatrix compensation_unitary(int d, const std::vector<int>& suffix) {
    double theta = compensation_angle(d, suffix);
    std::vector<Complex> p(d);
    for (int j = 0; j < d; ++j) p[j] = std::polar(1.0, -j * theta);
    return UnitaryMatrix::diagonal(std::move(p));
}

inline QuditState apply(const UnitaryMatrix& u, const QuditState& s) {
    if (u.dim() != s.dim()) throw std::invalid_argument("dimension mismatch");
    int d = s.dim();
    std::vector<Complex> out(d, 0.0);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            out[r] += u(r, c) * s.amplitude(c);
    return QuditState(d, std::move(out));
}

inline std::vector<double> born_probabilities(const QuditState& s) {
    std::vector<double> p(s.dim());
    for (int j = 0; j < s.dim(); ++j) p[j] = std::norm(s.amplitude(j));
    return p;
}

/// Born-rule sample; deterministic given the generator state.
inline int sample_outcome(const QuditState& s, SplitMix64& rng) {
    double u = rng.next_double();
    double acc = 0.0;
    for (int j = 0; j < s.dim(); ++j) {
        acc += std::norm(s.amplitude(j));
        if (u < acc) return j;
    }
    return s.dim() - 1;
}

} // namespace qtm
