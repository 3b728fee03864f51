#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtm/analysis.hpp"
#include "qtm/protocol.hpp"
#include "test_helpers.hpp"

using namespace qtm;

namespace {

DigitString random_digits(int d, int K, SplitMix64& rng) {
    std::vector<int> digits(K);
    for (int& x : digits) x = static_cast<int>(rng.next_u64() % d);
    return DigitString(d, std::move(digits));
}

} // namespace

TEST_CASE("posterior density peak value") {
    PosteriorSpec spec{3, 2, 1.0};
    CHECK(posterior_density(1.0, spec) == doctest::Approx(9.0 / two_pi).epsilon(1e-12));
}

TEST_CASE("posterior density normalizes to one") {
    for (int d : {2, 3})
        for (int K = 1; K <= 5; ++K) {
            PosteriorSpec spec{d, K, 2.5};
            double integral = integrate(
                [&](double phi) { return posterior_density(phi, spec); },
                spec.reference_phase - pi, spec.reference_phase + pi, 1e-10);
            CHECK(std::abs(integral - 1.0) < 1e-6);
        }
}

TEST_CASE("product form equals closed form") {
    SplitMix64 rng(21);
    for (int i = 0; i < 1000; ++i) {
        int d = (rng.next_u64() % 2) ? 2 : 3;
        int K = 1 + static_cast<int>(rng.next_u64() % 6);
        auto digits = random_digits(d, K, rng);
        double phi = two_pi * rng.next_double();
        auto spec = PosteriorSpec::from_digits(digits);
        CHECK(std::abs(posterior_product(phi, digits) - posterior_density(phi, spec)) < 1e-10);
    }
}

TEST_CASE("product form specifics") {
    DigitString exact(3, {1, 2, 0});
    auto spec = PosteriorSpec::from_digits(exact);
    // Maximum at phi = phi_tilde.
    double peak = posterior_product(spec.reference_phase, exact);
    CHECK(peak == doctest::Approx(27.0 / two_pi).epsilon(1e-9));
    CHECK(posterior_product(spec.reference_phase + 0.01, exact) < peak);

    // d=3, K=1: orthogonal counting state gives zero.
    DigitString one(3, {0});
    CHECK(posterior_product(two_pi / 3.0, one) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("central peak probability") {
    CHECK(std::abs(central_peak_probability(3, 6) - 0.903) < 0.003);
    CHECK(std::abs(central_peak_probability(2, 8) - 0.903) < 0.003);
    // K=1 integrates over the whole central sector and exceeds the large-K value.
    CHECK(central_peak_probability(3, 1) >= central_peak_probability(3, 6));
}

TEST_CASE("central peak mass stabilizes for growing K") {
    for (int d : {2, 3}) {
        double prev = central_peak_probability(d, 6);
        CHECK(prev >= 0.90);
        for (int K = 7; K <= 8; ++K) {
            double cur = central_peak_probability(d, K);
            CHECK(cur >= 0.90);
            CHECK(std::abs(cur - prev) < 0.005);
            prev = cur;
        }
    }
}

TEST_CASE("coherence time") {
    CHECK(coherence_time(2, 3, 1.0) == doctest::Approx(7.0));
    CHECK(coherence_time(3, 3, 1.0) == doctest::Approx(13.0));
    for (int K = 8; K <= 12; ++K)
        CHECK(coherence_time(3, K, 1.0) ==
              doctest::Approx(std::pow(3.0, K) / 2.0).epsilon(0.01));
    CHECK(ResourceBudget::from(3, 3, 2.0).total_time == doctest::Approx(26.0));
}

TEST_CASE("heisenberg precision") {
    const double mu = 1e5 * constants().mu_bohr;
    const double T = 1e-3;
    CHECK(heisenberg_precision(2, T, mu) ==
          doctest::Approx(two_pi * constants().hbar / (mu * T)).epsilon(1e-14));
    CHECK(heisenberg_precision(3, T, mu) ==
          doctest::Approx(heisenberg_precision(2, T, mu) / 2.0).epsilon(1e-14));
    CHECK(heisenberg_precision(3, 2.0 * T, mu) * 2.0 * T ==
          doctest::Approx(heisenberg_precision(3, T, mu) * T).epsilon(1e-12));
}

TEST_CASE("T2-limited and long-time precision") {
    const double mu = 1e5 * constants().mu_bohr;
    const double t2 = 1e-6;
    double dh = t2_limited_precision(mu, 3, t2);
    CHECK(dh > 0.1e-9);
    CHECK(dh < 0.5e-9);
    CHECK(dh == doctest::Approx(0.238e-9).epsilon(0.01));

    CHECK(long_time_precision(mu, 3, t2, t2) == doctest::Approx(dh).epsilon(1e-14));
    CHECK(long_time_precision_rep(mu, 3, t2, t2, 5e-6) ==
          doctest::Approx(long_time_precision(mu, 3, t2, 5e-6)).epsilon(1e-14));
    CHECK_THROWS_AS(long_time_precision(mu, 3, t2, 0.5 * t2), std::invalid_argument);
}

TEST_CASE("steps required and step ratio") {
    CHECK(step_ratio(2, 3) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
    CHECK(steps_required(3, std::pow(3.0, -5)) == 5);
    CHECK(steps_required(3, 1e-3) == 7);
    CHECK(steps_required(2, 1e-3) == 10);
}

TEST_CASE("density profile") {
    PosteriorSpec spec{3, 3, 0.0};
    std::vector<double> grid;
    for (int i = -400; i <= 400; ++i) grid.push_back(i * pi / 400.0);
    auto profile = density_profile(spec, grid);
    CHECK(profile[400].second == doctest::Approx(27.0 / two_pi).epsilon(1e-9));

    // Satellite maxima decay with the sector index.
    double prev = profile[400].second;
    for (int sector = 1; sector <= 5; ++sector) {
        double lo = 2 * sector * pi / 27.0, hi = (2 * sector + 2) * pi / 27.0;
        double peak = 0.0;
        for (auto& [dphi, dens] : profile)
            if (dphi > lo && dphi < hi) peak = std::max(peak, dens);
        CHECK(peak < prev);
        prev = peak;
    }

    // Central-peak half-width 2 pi / d^K: the qutrit peak at K=3 is (3/2)^3
    // narrower than the qubit one; the density vanishes at the first zero.
    CHECK(posterior_density(two_pi / 27.0, spec) < 1e-10);
    PosteriorSpec qb{2, 3, 0.0};
    CHECK(posterior_density(two_pi / 8.0, qb) < 1e-10);
    CHECK((two_pi / 8.0) / (two_pi / 27.0) == doctest::Approx(std::pow(1.5, 3)));
}

TEST_CASE("sampled runs reproduce the posterior (KS)") {
    const int d = 3, K = 4, runs = 10000;
    ProtocolConfig cfg{d, K, 1.0, 3.0, RunMode::sampled, 0};
    const double h = 1.2345;
    const double phi = two_pi * h / cfg.field_range;

    // Exact distribution over strings from the product likelihood.
    const int total = 81;
    std::vector<std::pair<double, double>> dist; // (phi_tilde, probability)
    for (int code = 0; code < total; ++code) {
        std::vector<int> digits(K);
        int c = code;
        for (int k = K - 1; k >= 0; --k) { digits[k] = c % d; c /= d; }
        DigitString s(d, digits);
        double phi_tilde = two_pi / d * s.fraction();
        double p = 1.0, scale = 1.0;
        for (int k = 0; k < K; ++k) {
            p *= std::pow(1.0 + 2.0 * std::cos(scale * (phi - phi_tilde)), 2) / 9.0;
            scale *= 3.0;
        }
        dist.emplace_back(phi_tilde, p);
    }
    std::sort(dist.begin(), dist.end());

    std::vector<double> samples;
    for (int r = 0; r < runs; ++r) {
        cfg.seed = 1000 + r;
        auto [digits, records] = run_fourier_estimation(cfg, ideal_oracle(cfg, h));
        samples.push_back(two_pi / d * digits.fraction());
    }
    std::sort(samples.begin(), samples.end());

    double ks = 0.0, cdf = 0.0;
    std::size_t idx = 0;
    for (auto& [value, p] : dist) {
        while (idx < samples.size() && samples[idx] <= value + 1e-12) ++idx;
        cdf += p;
        ks = std::max(ks, std::abs(idx / static_cast<double>(runs) - cdf));
    }
    CHECK(std::abs(cdf - 1.0) < 1e-9);
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(runs))); // 1% KS level
}
