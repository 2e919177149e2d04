#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qcdma/duffing.hpp"

namespace qcdma::fock {

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Multimode state vector in a per-mode truncated Fock basis.
/// Index layout: idx = sum_k n_k * dim^k (mode 0 varies fastest).
struct StateVector {
  int n_modes = 0;
  int dim = 0;
  Eigen::VectorXcd amp;

  static StateVector vacuum(int n_modes, int dim);
  /// Product state from per-mode amplitude vectors (each of length dim).
  static StateVector product(std::span<const Eigen::VectorXcd> modes);

  double norm() const { return amp.norm(); }
  /// Population of the top Fock level of a mode (truncation leakage probe).
  double top_level_population(int mode) const;
};

struct DensityMatrix {
  Eigen::MatrixXcd rho;

  int dim() const { return static_cast<int>(rho.rows()); }
  double trace() const { return rho.trace().real(); }
  double hermiticity_residual() const;
  double min_eigenvalue() const;
};

struct QubitSpec {
  double p = 0.5;  // weight on the 0-photon level, in [0, 1]
};

struct SimConfig {
  int dim = 8;                     // reported truncation
  int n_samples = 400;             // phase samples for the Monte-Carlo average
  double decorrelation_gap = 5.0;  // drive periods between samples
  std::uint64_t seed = 1;
  double drive_period = 2.0 * std::numbers::pi / 0.9;  // time units
  int working_dim = 0;             // internal truncation; 0 = auto
  double leak_tol = 1e-2;          // error threshold on top-level population
  bool paper_asymmetry = false;    // Eq.-(3) literal a4 amplifier term
  bool detrend_delta = true;       // remove the mean frequency offset

  void validate() const;
  int effective_working_dim() const;
};

/// sqrt(p)|0> + sqrt(1-p)|1> in a dim-level mode.
Eigen::VectorXcd encode_qubit(const QubitSpec& q, int dim);

/// Coherent state truncated to dim levels (renormalized).
Eigen::VectorXcd coherent_state(std::complex<double> alpha, int dim);

// -- gates ------------------------------------------------------------------

/// exp(-i theta n) on one mode.
void apply_phase(StateVector& psi, int mode, double theta);

/// Two-mode mixer with Heisenberg action a_i -> cos(t) a_i + sin(t) a_j,
/// a_j -> sin(t) a_i - cos(t) a_j; t = pi/4 is the 50:50 beamsplitter.
void apply_mixer(StateVector& psi, int i, int j, double mix_angle);
inline void apply_beamsplitter(StateVector& psi, int i, int j) {
  apply_mixer(psi, i, j, std::numbers::pi / 4.0);
}

/// Two-mode squeezer exp[r (a_i† a_j† - a_i a_j)]:
/// a_i -> cosh(r) a_i + sinh(r) a_j†.
void apply_two_mode_squeeze(StateVector& psi, int i, int j, double r);

/// Reduced state of one mode, reported at out_dim levels (top-left block of
/// the working-dimension reduced state; out_dim = 0 keeps the working dim).
DensityMatrix partial_trace_mode(const StateVector& psi, int mode, int out_dim = 0);

// -- network simulation -------------------------------------------------------

/// One pass of (q1, q2, vacuum, vacuum) through the exact network at fixed
/// phases: encode phases, 50:50 BS, two-mode squeezer with cosh r = 2,
/// 50:50 BS, decode phases; returns the received mode states (rho3, rho4)
/// at cfg.dim levels. Throws TruncationError when the top working level
/// holds more than cfg.leak_tol population.
std::pair<DensityMatrix, DensityMatrix> run_single_shot(
    double theta1, double theta2, const QubitSpec& q1, const QubitSpec& q2,
    const SimConfig& cfg);

/// Empirical channel coefficients estimated from decorrelated trajectory
/// samples: cbar_i = mean_k exp(+i theta_i(t_k)) (after optional detrending).
struct PhaseAverages {
  std::complex<double> c1{1.0, 0.0};
  std::complex<double> c2{1.0, 0.0};
  std::complex<double> cross_direct{1.0, 0.0};  // mean exp(i(theta1-theta2)), diagnostic
  int n_samples = 0;
};

PhaseAverages compute_phase_averages(const chaos::Trajectory& a,
                                     const chaos::Trajectory& b,
                                     const SimConfig& cfg);

/// Phase-averaged (reduced) channel for one receiver, the amplitude-level
/// average of the exact network: output mode operator
///   A = a_own + cbar_own conj(cbar_other) a_other + sqrt(3/2) cbar_own L†
///       + (vacuum completion),
/// dilated exactly on 4 modes. Reduces to the fixed-phase network when
/// |cbar| = 1.
DensityMatrix reduced_channel_output(std::complex<double> cbar_own,
                                     std::complex<double> cbar_other,
                                     const QubitSpec& q_own,
                                     const QubitSpec& q_other,
                                     const SimConfig& cfg,
                                     bool amp_uses_other = false);

enum class AveragingModel { ReducedChannel, LiteralMixture };

/// Transmission through the chaotically phase-shifted network, averaged over
/// decorrelated phase samples of the two sender trajectories. The default
/// model applies the average at the amplitude level (the narrowband receiver
/// picture behind the reduced channel); LiteralMixture averages the
/// fixed-phase density matrices instead.
std::pair<DensityMatrix, DensityMatrix> monte_carlo_transmission(
    const chaos::Trajectory& traj_a, const chaos::Trajectory& traj_b,
    const QubitSpec& q1, const QubitSpec& q2, const SimConfig& cfg,
    AveragingModel model = AveragingModel::ReducedChannel);

/// Two-level receiver absorption: |0> -> ground, any n >= 1 -> excited,
/// 0-1 coherence preserved (Kraus {|0><0| + |1><1|} U {|1><n|, n >= 2}).
DensityMatrix receive_qubit(const DensityMatrix& mode_state);

/// <phi| rho |phi> with |phi> = sqrt(p)|0> + sqrt(1-p)|1>.
double fidelity(const DensityMatrix& rho, const QubitSpec& q);

/// First-order analytic prediction from the averaged channel: 1 - M.
double predicted_fidelity(double M, const QubitSpec& q1, const QubitSpec& q2);

// -- mode moments (oracle hooks) ----------------------------------------------

std::complex<double> mean_amplitude(const DensityMatrix& rho);        // <a>
std::complex<double> mean_amplitude_squared(const DensityMatrix& rho);  // <a a>
double mean_photon_number(const DensityMatrix& rho);                  // <a† a>

}  // namespace qcdma::fock
