#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qcdma::chaos {

/// Raised when a trajectory leaves the configured bound (the softening well
/// has escape channels; see DuffingParams::well).
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Quartic term of the oscillator potential.
///
/// SingleSoftening is the potential (w0/2)x^2 - mu x^4 as written: a single
/// well with barriers at x = +-sqrt(w0/(4 mu)). It diverges under strong
/// driving. DoubleWell flips both signs, -(w0/2)x^2 + mu x^4, the standard
/// chaotic Duffing well; this is what the chaotic scenarios use.
enum class WellShape { SingleSoftening, DoubleWell };

struct DuffingParams {
  double omega0 = 1.0;   // angular frequency scale (rad/time); > 0
  double mu = 0.25;      // quartic coefficient, units of omega0
  double gamma = 0.1;    // damping rate, units of omega0
  double f_d = 36.0;     // drive amplitude, units of omega0
  double omega_d = 0.9;  // drive frequency, units of omega0
  double k_I = 10.0;     // sync spring constant, units of omega0
  double g_fo = 0.03;    // field-oscillator coupling, units of omega0
  WellShape well = WellShape::SingleSoftening;
  double divergence_bound = 1e6;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct OscState {
  double x = 0.0;
  double p = 0.0;
};

/// Uniformly sampled trajectory, including the induced frequency shift
/// delta(t) = g_fo * x(t) and the accumulated phase theta(t) = int delta.
struct Trajectory {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> delta;
  std::vector<double> theta;

  std::size_t size() const { return t.size(); }
};

/// Right-hand side of the equations of motion:
///   dx/dt = w0 p
///   dp/dt = -w0 x + 4 mu x^3 + f_d cos(w_d t) - gamma p   (SingleSoftening)
///   dp/dt = +w0 x - 4 mu x^3 + f_d cos(w_d t) - gamma p   (DoubleWell)
OscState eom_derivative(const OscState& s, const DuffingParams& params, double t);

/// Oscillator energy (w0/2)(p^2 + x^2) - mu x^4 for the softening well and
/// (w0/2)p^2 - (w0/2)x^2 + mu x^4 for the double well; conserved when
/// gamma = 0 and f_d = 0.
double energy(const OscState& s, const DuffingParams& params);

/// Fixed-step RK4 integration over [0, horizon]; theta accumulated by the
/// trapezoidal rule on the sample grid. Throws DivergenceError if |x| or |p|
/// exceeds params.divergence_bound.
Trajectory integrate(const DuffingParams& params, OscState init, double horizon, double dt);

enum class CouplingMode { Bidirectional, DriveResponse };

/// Two oscillators under the same drive coupled by the spring potential
/// k_I (x_a - x_b)^2 / 2. Bidirectional applies the reaction force to both;
/// DriveResponse lets a evolve freely and slaves b.
std::pair<Trajectory, Trajectory> integrate_synchronized_pair(
    const DuffingParams& params, OscState init_a, OscState init_b,
    double horizon, double dt, CouplingMode mode = CouplingMode::Bidirectional);

/// RMS of x_a - x_b over t in [t_lo, t_hi], normalized by RMS of x_a there.
/// Throws GridMismatchError if the trajectories are not on the same grid.
double sync_error(const Trajectory& a, const Trajectory& b, double t_lo, double t_hi);

struct LyapunovSettings {
  double transient = 500.0;        // discarded lead-in, time units
  double horizon = 12000.0;        // accumulation span after the transient
  double renorm_interval = 1.0;    // tangent renormalization period
  double dt = 0.0;                 // 0 -> default 1e-3 * 2*pi/omega0
};

struct LyapunovEstimate {
  double lambda = 0.0;              // per unit time (omega0-scaled, see note)
  std::vector<double> history;      // running estimate at each renormalization
  bool converged = false;
  // Convention: lambda is measured per unit of the equation-of-motion time
  // variable, in which the linear damped oscillator has lambda = -gamma/2.
  static constexpr const char* unit_note = "per 1/omega0 time unit";
};

/// Maximal Lyapunov exponent by the tangent-space (variational) method with
/// periodic renormalization. converged requires the relative spread of the
/// running estimate over the final 10% of the history to be below 5%.
LyapunovEstimate max_lyapunov(const DuffingParams& params, OscState init,
                              const LyapunovSettings& settings);

enum class Regime { Periodic, SoftChaos, HardChaos };

struct RegimeThresholds {
  double lambda0 = 1e-3;  // chaos threshold on lambda
  double m_hard = 0.05;   // hard chaos when M falls below this
};

/// Classifies from a converged Lyapunov estimate and a correction factor M.
/// Throws std::invalid_argument on an unconverged estimate or M outside (0,1].
Regime classify_regime(const LyapunovEstimate& estimate, double M,
                       const RegimeThresholds& thresholds = {});

const char* to_string(Regime r);

}  // namespace qcdma::chaos
