#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qcdma/spectral.hpp"

using namespace qcdma::spectral;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double banded_integral(const PowerSpectrum& ps, double lo, double hi) {
  double acc = 0.0;
  for (std::size_t k = 1; k + 1 < ps.omega.size(); ++k) {
    if (ps.omega[k] < lo || ps.omega[k + 1] > hi) continue;
    acc += 0.5 * (ps.density[k] + ps.density[k + 1]) * (ps.omega[k + 1] - ps.omega[k]);
  }
  return acc;
}

}  // namespace

TEST_CASE("estimate_psd: all-zero series gives zero density") {
  std::vector<double> zeros(4096, 0.0);
  const auto ps = estimate_psd(zeros, 0.01, 4);
  for (double d : ps.density) CHECK(d == 0.0);
}

TEST_CASE("estimate_psd: single tone integrates to A^2/(2 pi)") {
  // A = 0.2 at omega = 10; banded integral should be 0.04/(2 pi) = 6.366e-3.
  const Tone tone{0.2, 10.0, 0.3};
  const double dt = 1e-3 * kTwoPi;
  const auto series = synthesize_tones({&tone, 1}, dt, 1 << 18);
  const auto ps = estimate_psd(series, dt, 8);
  const double got = banded_integral(ps, 8.0, 12.0);
  const double expected = 0.2 * 0.2 / kTwoPi;
  CHECK(std::abs(got - expected) / expected < 0.02);
}

TEST_CASE("estimate_psd: normalization reproduces <delta^2>/pi for tone mixes") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(0.05, 0.4), freq(2.0, 20.0), ph(0.0, kTwoPi);
  const double dt = 1e-3 * kTwoPi;
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<Tone> tones;
    for (int i = 0; i < 4; ++i) tones.push_back({amp(rng), freq(rng), ph(rng)});
    const auto series = synthesize_tones(tones, dt, 1 << 18);
    double var = 0.0;
    for (double v : series) var += v * v;
    var /= static_cast<double>(series.size());
    const auto ps = estimate_psd(series, dt, 8);
    const double total = banded_integral(ps, ps.omega[1], ps.omega.back());
    CHECK(std::abs(std::numbers::pi * total - var) / var < 0.02);
  }
}

TEST_CASE("correction_factor: zero spectrum gives M = 1") {
  std::vector<double> zeros(8192, 0.0);
  const auto ps = estimate_psd(zeros, 0.01, 4);
  const auto cf = correction_factor(ps, ps.omega[1], ps.omega.back());
  CHECK(cf.M == doctest::Approx(1.0));
}

TEST_CASE("correction_factor: single tone matches exp(-A^2/(2 w^2))") {
  const Tone tone{0.2, 10.0, 0.0};
  const double dt = 1e-3 * kTwoPi;
  const auto series = synthesize_tones({&tone, 1}, dt, 1 << 18);
  const auto ps = estimate_psd(series, dt, 8);
  const auto band = default_band(ps);
  const auto cf = correction_factor(ps, band.first, band.second);
  const double expected = std::exp(-0.2 * 0.2 / (2.0 * 100.0));  // 0.99980...
  CHECK(cf.M == doctest::Approx(expected).epsilon(2e-5));
}

TEST_CASE("correction_factor: band edges validated") {
  const Tone tone{0.1, 5.0, 0.0};
  const auto series = synthesize_tones({&tone, 1}, 0.01, 1 << 14);
  const auto ps = estimate_psd(series, 0.01, 4);
  CHECK_THROWS_AS(correction_factor(ps, -1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(correction_factor(ps, 3.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(correction_factor(ps, ps.omega.back() * 2, ps.omega.back() * 3),
                  std::invalid_argument);
}

TEST_CASE("correction_factor: M multiplicative across a band split") {
  const Tone tones[] = {{0.2, 5.0, 0.1}, {0.15, 12.0, 1.2}};
  const double dt = 1e-3 * kTwoPi;
  const auto series = synthesize_tones(tones, dt, 1 << 17);
  const auto ps = estimate_psd(series, dt, 8);
  const auto band = default_band(ps);
  // Split at a grid node inside the band.
  std::size_t lo_idx = 0, hi_idx = 0;
  for (std::size_t k = 0; k < ps.omega.size(); ++k) {
    if (ps.omega[k] == band.first) lo_idx = k;
    if (ps.omega[k] == band.second) hi_idx = k;
  }
  const double mid = ps.omega[(lo_idx + hi_idx) / 2];
  REQUIRE(mid > band.first);
  REQUIRE(mid < band.second);
  const double whole = correction_factor(ps, band.first, band.second).M;
  const double left = correction_factor(ps, band.first, mid).M;
  const double right = correction_factor(ps, mid, band.second).M;
  CHECK(whole == doctest::Approx(left * right).epsilon(1e-12));
}

TEST_CASE("correction_factor: monotone under added in-band mass") {
  const Tone one[] = {{0.2, 5.0, 0.0}};
  const Tone two[] = {{0.2, 5.0, 0.0}, {0.1, 8.0, 0.4}};
  const double dt = 1e-3 * kTwoPi;
  const auto ps1 = estimate_psd(synthesize_tones(one, dt, 1 << 17), dt, 8);
  const auto ps2 = estimate_psd(synthesize_tones(two, dt, 1 << 17), dt, 8);
  const double m1 = correction_factor(ps1, 3.0, 10.0).M;
  const double m2 = correction_factor(ps2, 3.0, 10.0).M;
  CHECK(m2 < m1);
}

TEST_CASE("accumulate_phase: constant integrand") {
  std::vector<double> delta(1001, 0.3);
  const auto theta = accumulate_phase(delta, 0.01);
  CHECK(theta[0] == 0.0);
  CHECK(theta.back() == doctest::Approx(0.3 * 10.0).epsilon(1e-12));
}

TEST_CASE("accumulate_phase: cosine integrates to sine") {
  const double A = 0.5, w = 3.0, dt = 1e-4;
  std::vector<double> delta(200000);
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = A * std::cos(w * dt * i);
  const auto theta = accumulate_phase(delta, dt);
  double worst = 0.0;
  for (std::size_t i = 0; i < delta.size(); i += 997) {
    const double expect = A / w * std::sin(w * dt * i);
    worst = std::max(worst, std::abs(theta[i] - expect));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("empirical_phase_average: zero phase gives 1") {
  std::vector<double> theta(100, 0.0);
  const auto avg = empirical_phase_average(theta);
  CHECK(avg.real() == doctest::Approx(1.0));
  CHECK(avg.imag() == doctest::Approx(0.0));
}

TEST_CASE("empirical_phase_average: sinusoidal phase gives J0") {
  // theta = 0.1 sin(w t) over many periods -> J0(0.1) = 0.9975016.
  const double w = 2.0, dt = 1e-3;
  std::vector<double> theta(static_cast<std::size_t>(kTwoPi / w / dt * 500));
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = 0.1 * std::sin(w * dt * i);
  const auto avg = empirical_phase_average(theta);
  CHECK(std::abs(avg) == doctest::Approx(0.997502).epsilon(1e-4));
}

TEST_CASE("empirical_phase_average: magnitude never exceeds 1") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> theta(1000);
    for (auto& t : theta) t = u(rng);
    CHECK(std::abs(empirical_phase_average(theta)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("bessel_product_average: empty list gives 1") {
  CHECK(bessel_product_average({}) == doctest::Approx(1.0));
}

TEST_CASE("bessel_product_average: single and paired tones") {
  const Tone one{0.2, 2.0, 0.0};  // A/w = 0.1
  CHECK(bessel_product_average({&one, 1}) == doctest::Approx(0.997502).epsilon(1e-6));
  const Tone two[] = {{0.2, 2.0, 0.0}, {0.3, 1.5, 0.7}};
  const double a = bessel_product_average({two, 1});
  const double b = bessel_product_average({two + 1, 1});
  CHECK(bessel_product_average(two) == doctest::Approx(a * b).epsilon(1e-14));
}

TEST_CASE("bessel_product_average: zero frequency rejected") {
  const Tone bad{0.1, 0.0, 0.0};
  CHECK_THROWS_AS(bessel_product_average({&bad, 1}), std::invalid_argument);
}

TEST_CASE("oracle chain: quasiperiodic signals tie all three averages together") {
  // For <= 5 tones with A/w <= 0.3: |mean exp(-i theta)|, prod J0(A/w) and
  // sqrt(M) agree pairwise within 1e-2.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ratio(0.02, 0.3), freq(1.0, 9.0), ph(0.0, kTwoPi);
  const double dt = 2e-3 * kTwoPi;
  const std::size_t n = 1 << 20;  // ~6600 base periods at w >= 1

  for (int rep = 0; rep < 4; ++rep) {
    std::vector<Tone> tones;
    const int count = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < count; ++i) {
      const double w = freq(rng);
      tones.push_back({ratio(rng) * w, w, ph(rng)});
    }
    const auto delta = synthesize_tones(tones, dt, n);
    const auto theta = accumulate_phase(delta, dt);
    const double emp = std::abs(empirical_phase_average(theta));
    const double bessel = bessel_product_average(tones);
    const auto ps = estimate_psd(delta, dt, 8);
    const auto band = default_band(ps);
    const double sqrt_m = std::sqrt(correction_factor(ps, band.first, band.second).M);

    CAPTURE(count);
    CAPTURE(emp);
    CAPTURE(bessel);
    CAPTURE(sqrt_m);
    CHECK(std::abs(emp - bessel) < 1e-2);
    CHECK(std::abs(emp - sqrt_m) < 1e-2);
    CHECK(std::abs(bessel - sqrt_m) < 1e-2);
  }
}
