#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qcdma/duffing.hpp"

using namespace qcdma::chaos;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

DuffingParams quiet_params() {
  DuffingParams p;
  p.omega0 = 1.0;
  p.mu = 0.0;
  p.gamma = 0.0;
  p.f_d = 0.0;
  p.omega_d = 1.0;
  p.g_fo = 0.0;
  p.well = WellShape::SingleSoftening;
  return p;
}

DuffingParams chaotic_params() {
  // Calibrated chaotic-regime defaults (double well, near-resonant drive).
  DuffingParams p;
  p.well = WellShape::DoubleWell;
  return p;
}

}  // namespace

TEST_CASE("eom_derivative: harmonic oscillator") {
  auto p = quiet_params();
  const auto d = eom_derivative({1.0, 0.0}, p, 0.0);
  CHECK(d.x == doctest::Approx(0.0));
  CHECK(d.p == doctest::Approx(-1.0));
}

TEST_CASE("eom_derivative: linear damping term") {
  auto p = quiet_params();
  p.gamma = 0.05;
  const auto d = eom_derivative({0.0, 1.0}, p, 0.0);
  CHECK(d.x == doctest::Approx(1.0));
  CHECK(d.p == doctest::Approx(-0.05));
}

TEST_CASE("eom_derivative: quartic force cancels the linear one at x = 1") {
  // 4 mu x^3 = 1 against -omega0 x = -1 in the softening well.
  auto p = quiet_params();
  p.mu = 0.25;
  const auto d = eom_derivative({1.0, 0.0}, p, 0.0);
  CHECK(d.x == doctest::Approx(0.0));
  CHECK(d.p == doctest::Approx(0.0));
}

TEST_CASE("eom_derivative: double well flips the sign pattern") {
  auto p = quiet_params();
  p.mu = 0.25;
  p.well = WellShape::DoubleWell;
  const auto d = eom_derivative({1.0, 0.0}, p, 0.0);
  CHECK(d.p == doctest::Approx(0.0));  // equilibrium at the well bottom
  const auto d2 = eom_derivative({0.5, 0.0}, p, 0.0);
  CHECK(d2.p > 0.0);  // pushed away from the hilltop at x = 0
}

TEST_CASE("integrate: harmonic solution cos(w0 t) to 1e-6 over 10 periods") {
  auto p = quiet_params();
  const double dt = 1e-3 * kTwoPi;
  const auto traj = integrate(p, {1.0, 0.0}, 10.0 * kTwoPi, dt);
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); i += 37)
    worst = std::max(worst, std::abs(traj.x[i] - std::cos(traj.t[i])));
  CHECK(worst < 1e-6);
}

TEST_CASE("integrate: conservative energy drift below 1e-8 over 100 periods") {
  auto p = quiet_params();
  p.mu = 0.25;

  for (WellShape well : {WellShape::SingleSoftening, WellShape::DoubleWell}) {
    p.well = well;
    const OscState init{0.5, 0.2};
    const double e0 = energy(init, p);
    const auto traj = integrate(p, init, 100.0 * kTwoPi, 1e-3 * kTwoPi);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); i += 101) {
      const double e = energy({traj.x[i], traj.p[i]}, p);
      worst = std::max(worst, std::abs(e - e0));
    }
    CAPTURE(static_cast<int>(well));
    CHECK(worst / std::abs(e0) < 1e-8);
  }
}

TEST_CASE("integrate: time reversal returns to the initial state") {
  auto p = quiet_params();
  p.mu = 0.25;
  p.well = WellShape::DoubleWell;
  const double dt = 1e-3 * kTwoPi;
  const auto fwd = integrate(p, {0.7, 0.1}, 20.0 * kTwoPi, dt);
  // Reverse: flip momentum and integrate the same span again.
  const auto back = integrate(p, {fwd.x.back(), -fwd.p.back()}, 20.0 * kTwoPi, dt);
  CHECK(std::abs(back.x.back() - 0.7) < 1e-6);
  CHECK(std::abs(back.p.back() + 0.1) < 1e-6);
}

TEST_CASE("integrate: theta is the trapezoidal integral of delta") {
  auto p = chaotic_params();
  p.f_d = 12.0;
  const double dt = 1e-3 * kTwoPi;
  const auto traj = integrate(p, {0.1, 0.0}, 50.0 * kTwoPi, dt);
  CHECK(traj.theta[0] == 0.0);
  double acc = 0.0;
  double worst = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    acc += 0.5 * dt * (traj.delta[i - 1] + traj.delta[i]);
    worst = std::max(worst, std::abs(acc - traj.theta[i]));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("integrate: softening well diverges at the strong chaotic drive") {
  // The literal single-well form escapes at f_d = 36; this is why the chaotic
  // scenarios run the double well.
  auto p = chaotic_params();
  p.well = WellShape::SingleSoftening;
  p.f_d = 36.0;
  CHECK_THROWS_AS(integrate(p, {0.1, 0.0}, 200.0 * kTwoPi, 1e-3 * kTwoPi), DivergenceError);
}

TEST_CASE("integrate: double well stays bounded at the same drive") {
  auto p = chaotic_params();
  const auto traj = integrate(p, {0.1, 0.0}, 200.0 * kTwoPi, 1e-3 * kTwoPi);
  double max_x = 0.0;
  for (double x : traj.x) max_x = std::max(max_x, std::abs(x));
  CHECK(max_x < 20.0);
}

TEST_CASE("integrate: determinism is bitwise") {
  auto p = chaotic_params();
  const auto t1 = integrate(p, {0.1, 0.0}, 100.0 * kTwoPi, 1e-3 * kTwoPi);
  const auto t2 = integrate(p, {0.1, 0.0}, 100.0 * kTwoPi, 1e-3 * kTwoPi);
  REQUIRE(t1.size() == t2.size());
  for (std::size_t i = 0; i < t1.size(); i += 11) {
    CHECK(t1.x[i] == t2.x[i]);
    CHECK(t1.p[i] == t2.p[i]);
    CHECK(t1.theta[i] == t2.theta[i]);
  }
}

TEST_CASE("integrate: argument validation") {
  const auto p = quiet_params();
  CHECK_THROWS_AS(integrate(p, {0, 0}, 10.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(p, {0, 0}, 0.001, 0.01), std::invalid_argument);
  DuffingParams bad = p;
  bad.gamma = -1.0;
  CHECK_THROWS_AS(integrate(bad, {0, 0}, 10.0, 0.01), std::invalid_argument);
}

TEST_CASE("synchronized pair: identical initial states stay identical") {
  auto p = chaotic_params();
  p.k_I = 0.3;
  auto [a, b] = integrate_synchronized_pair(p, {0.2, 0.1}, {0.2, 0.1}, 50.0 * kTwoPi,
                                            1e-3 * kTwoPi);
  for (std::size_t i = 0; i < a.size(); i += 53) {
    CHECK(a.x[i] == b.x[i]);
    CHECK(a.p[i] == b.p[i]);
  }
}

TEST_CASE("synchronized pair: swapping the initial states swaps the outputs") {
  auto p = chaotic_params();
  p.k_I = 0.5;
  const double h = 30.0 * kTwoPi, dt = 1e-3 * kTwoPi;
  auto [a1, b1] = integrate_synchronized_pair(p, {0.1, 0.0}, {0.3, -0.2}, h, dt);
  auto [a2, b2] = integrate_synchronized_pair(p, {0.3, -0.2}, {0.1, 0.0}, h, dt);
  for (std::size_t i = 0; i < a1.size(); i += 97) {
    CHECK(a1.x[i] == b2.x[i]);
    CHECK(b1.x[i] == a2.x[i]);
  }
}

TEST_CASE("synchronized pair: uncoupled nearby chaotic states separate at ~lambda") {
  auto p = chaotic_params();
  p.k_I = 0.0;
  const double h = 400.0 * kTwoPi, dt = 1e-3 * kTwoPi;
  auto [a, b] = integrate_synchronized_pair(p, {0.1, 0.0}, {0.1 + 1e-6, 0.0}, h, dt);
  // Pre-saturation growth rate between two early windows should sit near the
  // maximal Lyapunov exponent (~0.1 at these defaults).
  const double e1 = sync_error(a, b, 10.0, 40.0);
  const double e2 = sync_error(a, b, 40.0, 70.0);
  CHECK(e1 < 0.01);
  CHECK(e2 > e1);
  const double rate = std::log(e2 / e1) / 30.0;
  CAPTURE(rate);
  CHECK(rate > 0.02);
  CHECK(rate < 0.5);
  CHECK(sync_error(a, b, h / 2.0, h) > 0.1);  // fully decorrelated late
}

TEST_CASE("synchronized pair: strong spring coupling synchronizes hard chaos") {
  auto p = chaotic_params();
  p.k_I = 10.0;
  const double t_drive = kTwoPi / p.omega_d;
  const double h = 500.0 * t_drive, dt = 1e-3 * kTwoPi;
  auto [a, b] = integrate_synchronized_pair(p, {0.1, 0.0}, {0.11, 0.0}, h, dt);
  CHECK(sync_error(a, b, h / 2.0, h) < 0.01);

  // Drive-response needs a stiffer spring than bidirectional coupling.
  p.k_I = 16.0;
  auto [c, d] = integrate_synchronized_pair(p, {0.1, 0.0}, {0.11, 0.0}, h, dt,
                                            CouplingMode::DriveResponse);
  CHECK(sync_error(c, d, h / 2.0, h) < 0.01);
}

TEST_CASE("sync_error: algebraic identities") {
  auto p = quiet_params();
  const auto traj = integrate(p, {1.0, 0.0}, 10.0 * kTwoPi, 1e-3 * kTwoPi);
  CHECK(sync_error(traj, traj, 0.0, 10.0 * kTwoPi) == 0.0);

  Trajectory negated = traj;
  for (auto& v : negated.x) v = -v;
  CHECK(sync_error(traj, negated, 0.0, 10.0 * kTwoPi) == doctest::Approx(2.0));

  Trajectory other = traj;
  other.dt *= 2.0;
  CHECK_THROWS_AS(sync_error(traj, other, 0.0, 1.0), GridMismatchError);
}

TEST_CASE("max_lyapunov: damped linear oscillator gives -gamma/2") {
  auto p = quiet_params();
  p.gamma = 0.05;
  LyapunovSettings s;
  s.transient = 50.0;
  s.horizon = 4000.0;
  const auto est = max_lyapunov(p, {1.0, 0.0}, s);
  CHECK(est.converged);
  CHECK(est.lambda == doctest::Approx(-0.025).epsilon(0.10));
}

TEST_CASE("max_lyapunov: undriven nonlinear damped motion is non-chaotic") {
  auto p = quiet_params();
  p.mu = 0.25;
  p.gamma = 0.1;
  p.well = WellShape::DoubleWell;
  LyapunovSettings s;
  s.transient = 100.0;
  s.horizon = 4000.0;
  const auto est = max_lyapunov(p, {0.4, 0.3}, s);
  CHECK(est.lambda < 0.0);
}

TEST_CASE("max_lyapunov: hard-chaos drive has a positive exponent") {
  auto p = chaotic_params();
  LyapunovSettings s;
  s.transient = 300.0 * kTwoPi / p.omega_d;
  s.horizon = 2500.0 * kTwoPi / p.omega_d;
  const auto est = max_lyapunov(p, {0.1, 0.0}, s);
  CAPTURE(est.lambda);
  CHECK(est.converged);
  CHECK(est.lambda > 0.02);
}

TEST_CASE("classify_regime: thresholds") {
  LyapunovEstimate damped;
  damped.lambda = -0.025;
  damped.converged = true;
  CHECK(classify_regime(damped, 0.5) == Regime::Periodic);
  CHECK(classify_regime(damped, 0.01) == Regime::Periodic);

  LyapunovEstimate chaotic;
  chaotic.lambda = 0.038;
  chaotic.converged = true;
  CHECK(classify_regime(chaotic, 0.5) == Regime::SoftChaos);
  CHECK(classify_regime(chaotic, 0.0103) == Regime::HardChaos);

  LyapunovEstimate unconverged;
  unconverged.lambda = 0.1;
  unconverged.converged = false;
  CHECK_THROWS_AS(classify_regime(unconverged, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(classify_regime(chaotic, 1.5), std::invalid_argument);
}
