#include "qcdma/duffing.hpp"

#include <cmath>
#include <string>

namespace qcdma::chaos {

namespace {

// Force on p excluding damping and drive: the configured well's -dV/dx.
inline double well_force(double x, const DuffingParams& pr) {
  const double cubic = 4.0 * pr.mu * x * x * x;
  return pr.well == WellShape::SingleSoftening ? -pr.omega0 * x + cubic
                                               : pr.omega0 * x - cubic;
}

// d(well_force)/dx, for the tangent dynamics.
inline double well_force_dx(double x, const DuffingParams& pr) {
  const double c = 12.0 * pr.mu * x * x;
  return pr.well == WellShape::SingleSoftening ? -pr.omega0 + c : pr.omega0 - c;
}

inline bool out_of_bounds(double x, double p, const DuffingParams& pr) {
  return !(std::abs(x) <= pr.divergence_bound && std::abs(p) <= pr.divergence_bound);
}

}  // namespace

void DuffingParams::validate() const {
  auto bad = [](const char* what) { throw std::invalid_argument(std::string("DuffingParams: ") + what); };
  if (!(omega0 > 0.0)) bad("omega0 must be > 0");
  if (gamma < 0.0) bad("gamma must be >= 0");
  if (mu < 0.0) bad("mu must be >= 0");
  if (f_d < 0.0) bad("f_d must be >= 0");
  if (!(omega_d > 0.0)) bad("omega_d must be > 0");
  if (k_I < 0.0) bad("k_I must be >= 0");
  if (g_fo < 0.0) bad("g_fo must be >= 0");
  if (!(divergence_bound > 0.0)) bad("divergence_bound must be > 0");
}

OscState eom_derivative(const OscState& s, const DuffingParams& params, double t) {
  const double drive = params.f_d * std::cos(params.omega_d * t);
  return {params.omega0 * s.p,
          well_force(s.x, params) + drive - params.gamma * s.p};
}

double energy(const OscState& s, const DuffingParams& params) {
  const double quart = params.mu * s.x * s.x * s.x * s.x;
  const double kin = 0.5 * params.omega0 * s.p * s.p;
  return params.well == WellShape::SingleSoftening
             ? kin + 0.5 * params.omega0 * s.x * s.x - quart
             : kin - 0.5 * params.omega0 * s.x * s.x + quart;
}

namespace {

// One RK4 step of the single oscillator.
inline OscState rk4_step(const OscState& s, const DuffingParams& pr, double t, double dt) {
  const OscState k1 = eom_derivative(s, pr, t);
  const OscState s2{s.x + 0.5 * dt * k1.x, s.p + 0.5 * dt * k1.p};
  const OscState k2 = eom_derivative(s2, pr, t + 0.5 * dt);
  const OscState s3{s.x + 0.5 * dt * k2.x, s.p + 0.5 * dt * k2.p};
  const OscState k3 = eom_derivative(s3, pr, t + 0.5 * dt);
  const OscState s4{s.x + dt * k3.x, s.p + dt * k3.p};
  const OscState k4 = eom_derivative(s4, pr, t + dt);
  return {s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
}

}  // namespace

Trajectory integrate(const DuffingParams& params, OscState init, double horizon, double dt) {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (horizon < dt) throw std::invalid_argument("integrate: horizon must be >= dt");

  const auto nsteps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trajectory traj;
  traj.dt = dt;
  traj.t.resize(nsteps + 1);
  traj.x.resize(nsteps + 1);
  traj.p.resize(nsteps + 1);
  traj.delta.resize(nsteps + 1);
  traj.theta.resize(nsteps + 1);

  OscState s = init;
  double theta = 0.0;
  traj.t[0] = 0.0;
  traj.x[0] = s.x;
  traj.p[0] = s.p;
  traj.delta[0] = params.g_fo * s.x;
  traj.theta[0] = 0.0;

  for (std::size_t i = 1; i <= nsteps; ++i) {
    const double t = static_cast<double>(i - 1) * dt;
    s = rk4_step(s, params, t, dt);
    if (out_of_bounds(s.x, s.p, params))
      throw DivergenceError("integrate: trajectory diverged at t = " + std::to_string(t + dt));
    const double delta = params.g_fo * s.x;
    theta += 0.5 * dt * (traj.delta[i - 1] + delta);
    traj.t[i] = static_cast<double>(i) * dt;
    traj.x[i] = s.x;
    traj.p[i] = s.p;
    traj.delta[i] = delta;
    traj.theta[i] = theta;
  }
  return traj;
}

namespace {

struct PairState {
  double xa, pa, xb, pb;
};

// Coupled pair derivative. kb = 0 gives drive-response (a drives b is wrong
// way round: here ka acts on a, kb on b; drive-response zeroes ka).
inline PairState pair_deriv(const PairState& s, const DuffingParams& pr, double t,
                            double ka, double kb) {
  const double drive = pr.f_d * std::cos(pr.omega_d * t);
  return {pr.omega0 * s.pa,
          well_force(s.xa, pr) + drive - pr.gamma * s.pa - ka * (s.xa - s.xb),
          pr.omega0 * s.pb,
          well_force(s.xb, pr) + drive - pr.gamma * s.pb + kb * (s.xa - s.xb)};
}

inline PairState pair_rk4(const PairState& s, const DuffingParams& pr, double t,
                          double dt, double ka, double kb) {
  auto add = [](const PairState& a, const PairState& b, double h) {
    return PairState{a.xa + h * b.xa, a.pa + h * b.pa, a.xb + h * b.xb, a.pb + h * b.pb};
  };
  const PairState k1 = pair_deriv(s, pr, t, ka, kb);
  const PairState k2 = pair_deriv(add(s, k1, 0.5 * dt), pr, t + 0.5 * dt, ka, kb);
  const PairState k3 = pair_deriv(add(s, k2, 0.5 * dt), pr, t + 0.5 * dt, ka, kb);
  const PairState k4 = pair_deriv(add(s, k3, dt), pr, t + dt, ka, kb);
  return {s.xa + dt / 6.0 * (k1.xa + 2.0 * k2.xa + 2.0 * k3.xa + k4.xa),
          s.pa + dt / 6.0 * (k1.pa + 2.0 * k2.pa + 2.0 * k3.pa + k4.pa),
          s.xb + dt / 6.0 * (k1.xb + 2.0 * k2.xb + 2.0 * k3.xb + k4.xb),
          s.pb + dt / 6.0 * (k1.pb + 2.0 * k2.pb + 2.0 * k3.pb + k4.pb)};
}

}  // namespace

std::pair<Trajectory, Trajectory> integrate_synchronized_pair(
    const DuffingParams& params, OscState init_a, OscState init_b,
    double horizon, double dt, CouplingMode mode) {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_synchronized_pair: dt must be > 0");
  if (horizon < dt) throw std::invalid_argument("integrate_synchronized_pair: horizon must be >= dt");

  const double ka = mode == CouplingMode::Bidirectional ? params.k_I : 0.0;
  const double kb = params.k_I;

  const auto nsteps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trajectory ta, tb;
  for (Trajectory* tr : {&ta, &tb}) {
    tr->dt = dt;
    tr->t.resize(nsteps + 1);
    tr->x.resize(nsteps + 1);
    tr->p.resize(nsteps + 1);
    tr->delta.resize(nsteps + 1);
    tr->theta.resize(nsteps + 1);
  }

  PairState s{init_a.x, init_a.p, init_b.x, init_b.p};
  double tha = 0.0, thb = 0.0;
  ta.t[0] = tb.t[0] = 0.0;
  ta.x[0] = s.xa; ta.p[0] = s.pa; ta.delta[0] = params.g_fo * s.xa; ta.theta[0] = 0.0;
  tb.x[0] = s.xb; tb.p[0] = s.pb; tb.delta[0] = params.g_fo * s.xb; tb.theta[0] = 0.0;

  for (std::size_t i = 1; i <= nsteps; ++i) {
    const double t = static_cast<double>(i - 1) * dt;
    s = pair_rk4(s, params, t, dt, ka, kb);
    if (out_of_bounds(s.xa, s.pa, params) || out_of_bounds(s.xb, s.pb, params))
      throw DivergenceError("integrate_synchronized_pair: diverged at t = " + std::to_string(t + dt));
    const double da = params.g_fo * s.xa;
    const double db = params.g_fo * s.xb;
    tha += 0.5 * dt * (ta.delta[i - 1] + da);
    thb += 0.5 * dt * (tb.delta[i - 1] + db);
    const double tt = static_cast<double>(i) * dt;
    ta.t[i] = tt; ta.x[i] = s.xa; ta.p[i] = s.pa; ta.delta[i] = da; ta.theta[i] = tha;
    tb.t[i] = tt; tb.x[i] = s.xb; tb.p[i] = s.pb; tb.delta[i] = db; tb.theta[i] = thb;
  }
  return {std::move(ta), std::move(tb)};
}

double sync_error(const Trajectory& a, const Trajectory& b, double t_lo, double t_hi) {
  if (a.size() != b.size() || a.dt != b.dt)
    throw GridMismatchError("sync_error: trajectories are on different grids");
  if (a.size() == 0) throw GridMismatchError("sync_error: empty trajectories");

  double num = 0.0, den = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.t[i] < t_lo || a.t[i] > t_hi) continue;
    const double d = a.x[i] - b.x[i];
    num += d * d;
    den += a.x[i] * a.x[i];
    ++count;
  }
  if (count == 0) throw std::invalid_argument("sync_error: window contains no samples");
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

LyapunovEstimate max_lyapunov(const DuffingParams& params, OscState init,
                              const LyapunovSettings& settings) {
  params.validate();
  const double two_pi = 2.0 * std::acos(-1.0);
  const double dt = settings.dt > 0.0 ? settings.dt : 1e-3 * two_pi / params.omega0;
  const auto renorm_steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(settings.renorm_interval / dt)));
  const auto transient_steps = static_cast<std::size_t>(std::llround(settings.transient / dt));
  const auto total_steps =
      transient_steps + static_cast<std::size_t>(std::llround(settings.horizon / dt));

  // State plus tangent vector; the tangent obeys the linearized flow.
  double x = init.x, p = init.p;
  double vx = 1.0, vp = 0.0;
  constexpr double kRef = 1.0;

  LyapunovEstimate est;
  double log_sum = 0.0;
  double accumulated_time = 0.0;

  auto deriv4 = [&](double xx, double pp, double vvx, double vvp, double t, double out[4]) {
    const double drive = params.f_d * std::cos(params.omega_d * t);
    out[0] = params.omega0 * pp;
    out[1] = well_force(xx, params) + drive - params.gamma * pp;
    out[2] = params.omega0 * vvp;
    out[3] = well_force_dx(xx, params) * vvx - params.gamma * vvp;
  };

  for (std::size_t i = 0; i < total_steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    double k1[4], k2[4], k3[4], k4[4];
    deriv4(x, p, vx, vp, t, k1);
    deriv4(x + 0.5 * dt * k1[0], p + 0.5 * dt * k1[1], vx + 0.5 * dt * k1[2],
           vp + 0.5 * dt * k1[3], t + 0.5 * dt, k2);
    deriv4(x + 0.5 * dt * k2[0], p + 0.5 * dt * k2[1], vx + 0.5 * dt * k2[2],
           vp + 0.5 * dt * k2[3], t + 0.5 * dt, k3);
    deriv4(x + dt * k3[0], p + dt * k3[1], vx + dt * k3[2], vp + dt * k3[3], t + dt, k4);
    x += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    p += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    vx += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    vp += dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]);
    if (out_of_bounds(x, p, params))
      throw DivergenceError("max_lyapunov: trajectory diverged at t = " + std::to_string(t + dt));

    if ((i + 1) % renorm_steps == 0) {
      const double norm = std::hypot(vx, vp);
      if (i >= transient_steps) {
        log_sum += std::log(norm / kRef);
        accumulated_time += static_cast<double>(renorm_steps) * dt;
        est.history.push_back(log_sum / accumulated_time);
      }
      vx *= kRef / norm;
      vp *= kRef / norm;
    }
  }

  if (est.history.empty())
    throw std::invalid_argument("max_lyapunov: horizon too short for any renormalization");
  est.lambda = est.history.back();

  // Convergence: relative spread of the running estimate over the last 10%.
  const std::size_t tail = std::max<std::size_t>(2, est.history.size() / 10);
  double lo = est.history.back(), hi = est.history.back();
  for (std::size_t i = est.history.size() - tail; i < est.history.size(); ++i) {
    lo = std::min(lo, est.history[i]);
    hi = std::max(hi, est.history[i]);
  }
  const double scale = std::max(std::abs(est.lambda), 1e-3);
  est.converged = (hi - lo) < 0.05 * scale;
  return est;
}

Regime classify_regime(const LyapunovEstimate& estimate, double M,
                       const RegimeThresholds& thresholds) {
  if (!estimate.converged)
    throw std::invalid_argument("classify_regime: Lyapunov estimate not converged");
  if (!(M > 0.0 && M <= 1.0))
    throw std::invalid_argument("classify_regime: M must lie in (0, 1]");
  if (estimate.lambda <= thresholds.lambda0) return Regime::Periodic;
  return M >= thresholds.m_hard ? Regime::SoftChaos : Regime::HardChaos;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Periodic: return "periodic";
    case Regime::SoftChaos: return "soft-chaos";
    case Regime::HardChaos: return "hard-chaos";
  }
  return "unknown";
}

}  // namespace qcdma::chaos
