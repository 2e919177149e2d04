#include "qcdma/fock.hpp"

#include <algorithm>
#include <cmath>

namespace qcdma::fock {

namespace {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Odometer over the occupation numbers of all modes except i and j; calls
// f(base_offset) for every spectator configuration.
template <typename F>
void for_each_spectator(int n_modes, int dim, int i, int j, F&& f) {
  std::vector<int> other;
  for (int m = 0; m < n_modes; ++m)
    if (m != i && m != j) other.push_back(m);
  std::vector<std::int64_t> stride(static_cast<std::size_t>(n_modes));
  for (int m = 0; m < n_modes; ++m) stride[static_cast<std::size_t>(m)] = ipow(dim, m);

  std::vector<int> count(other.size(), 0);
  while (true) {
    std::int64_t base = 0;
    for (std::size_t k = 0; k < other.size(); ++k)
      base += static_cast<std::int64_t>(count[k]) * stride[static_cast<std::size_t>(other[k])];
    f(base);
    std::size_t k = 0;
    for (; k < other.size(); ++k) {
      if (++count[k] < dim) break;
      count[k] = 0;
    }
    if (k == other.size()) break;
  }
}

// A two-mode gate stored as dense unitaries over conserved sectors.
struct PairGate {
  struct Sector {
    std::vector<std::pair<int, int>> states;  // (n_i, n_j)
    MatrixXcd u;
  };
  std::vector<Sector> sectors;
};

// Number-conserving mixer on a pair of modes. Single-particle map
// W(t) = [[cos t, sin t], [sin t, -cos t]] realized as exp(-i H) with
// H = (pi/2)(I - W) lifted to the Fock sectors n_i + n_j = s.
PairGate make_mixer_gate(int dim, double mix_angle) {
  const double c = std::cos(mix_angle), s = std::sin(mix_angle);
  const double half_pi = std::numbers::pi / 2.0;
  const double h00 = half_pi * (1.0 - c);
  const double h11 = half_pi * (1.0 + c);
  const double h01 = -half_pi * s;

  PairGate gate;
  for (int total = 0; total <= 2 * (dim - 1); ++total) {
    PairGate::Sector sector;
    for (int ni = std::max(0, total - (dim - 1)); ni <= std::min(dim - 1, total); ++ni)
      sector.states.emplace_back(ni, total - ni);
    const int n = static_cast<int>(sector.states.size());
    MatrixXcd h = MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      const auto [ni, nj] = sector.states[static_cast<std::size_t>(a)];
      h(a, a) = h00 * ni + h11 * nj;
      // a_i† a_j : (ni, nj) -> (ni+1, nj-1), amplitude sqrt((ni+1) nj)
      if (nj > 0 && ni + 1 < dim) {
        const double amp = std::sqrt(static_cast<double>((ni + 1) * nj));
        h(a + 1, a) += h01 * amp;  // states are ordered by ni
        h(a, a + 1) += h01 * amp;  // hermitian partner (a_j† a_i)
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    const VectorXcd phases =
        (Complex(0.0, -1.0) * es.eigenvalues().cast<Complex>()).array().exp();
    sector.u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    gate.sectors.push_back(std::move(sector));
  }
  return gate;
}

// Two-mode squeezer exp[r(a_i† a_j† - a_i a_j)] over the difference-conserving
// stripes n_i - n_j = d; the generator i(a†a† - aa) is Hermitian there.
PairGate make_tms_gate(int dim, double r) {
  PairGate gate;
  for (int d = -(dim - 1); d <= dim - 1; ++d) {
    PairGate::Sector sector;
    for (int nj = std::max(0, -d); nj <= dim - 1 - std::max(0, d); ++nj)
      sector.states.emplace_back(nj + d, nj);
    const int n = static_cast<int>(sector.states.size());
    MatrixXcd h = MatrixXcd::Zero(n, n);
    for (int a = 0; a + 1 < n; ++a) {
      const auto [ni, nj] = sector.states[static_cast<std::size_t>(a)];
      // a_i† a_j† : (ni, nj) -> (ni+1, nj+1), amplitude sqrt((ni+1)(nj+1))
      const double amp = std::sqrt(static_cast<double>((ni + 1) * (nj + 1)));
      h(a + 1, a) = Complex(0.0, 1.0) * amp;
      h(a, a + 1) = Complex(0.0, -1.0) * amp;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    const VectorXcd phases =
        (Complex(0.0, -r) * es.eigenvalues().cast<Complex>()).array().exp();
    sector.u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    gate.sectors.push_back(std::move(sector));
  }
  return gate;
}

void apply_pair_gate(StateVector& psi, int i, int j, const PairGate& gate) {
  if (i == j || i < 0 || j < 0 || i >= psi.n_modes || j >= psi.n_modes)
    throw std::invalid_argument("apply_pair_gate: bad mode indices");
  const int dim = psi.dim;
  const std::int64_t si = ipow(dim, i), sj = ipow(dim, j);

  std::vector<Complex> scratch(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  for_each_spectator(psi.n_modes, dim, i, j, [&](std::int64_t base) {
    for (const auto& sector : gate.sectors) {
      const int n = static_cast<int>(sector.states.size());
      for (int a = 0; a < n; ++a) {
        const auto [ni, nj] = sector.states[static_cast<std::size_t>(a)];
        scratch[static_cast<std::size_t>(a)] = psi.amp[base + ni * si + nj * sj];
      }
      for (int a = 0; a < n; ++a) {
        Complex acc = 0.0;
        for (int b = 0; b < n; ++b) acc += sector.u(a, b) * scratch[static_cast<std::size_t>(b)];
        const auto [ni, nj] = sector.states[static_cast<std::size_t>(a)];
        psi.amp[base + ni * si + nj * sj] = acc;
      }
    }
  });
}

}  // namespace

StateVector StateVector::vacuum(int n_modes, int dim) {
  StateVector s;
  s.n_modes = n_modes;
  s.dim = dim;
  s.amp = VectorXcd::Zero(ipow(dim, n_modes));
  s.amp[0] = 1.0;
  return s;
}

StateVector StateVector::product(std::span<const VectorXcd> modes) {
  if (modes.empty()) throw std::invalid_argument("StateVector::product: no modes");
  const int dim = static_cast<int>(modes[0].size());
  for (const auto& m : modes)
    if (static_cast<int>(m.size()) != dim)
      throw std::invalid_argument("StateVector::product: inconsistent mode dimensions");
  StateVector s;
  s.n_modes = static_cast<int>(modes.size());
  s.dim = dim;
  s.amp = modes[0];
  for (std::size_t k = 1; k < modes.size(); ++k) {
    // amp_new[idx + dim^k * n] = amp_old[idx] * modes[k][n]
    VectorXcd next(s.amp.size() * dim);
    for (int n = 0; n < dim; ++n)
      next.segment(static_cast<std::int64_t>(n) * s.amp.size(), s.amp.size()) =
          modes[k][n] * s.amp;
    s.amp = std::move(next);
  }
  return s;
}

double StateVector::top_level_population(int mode) const {
  const std::int64_t stride = ipow(dim, mode);
  const std::int64_t block = stride * dim;
  double pop = 0.0;
  for (std::int64_t idx = 0; idx < amp.size(); ++idx) {
    if ((idx % block) / stride == dim - 1) pop += std::norm(amp[idx]);
  }
  return pop;
}

double DensityMatrix::hermiticity_residual() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es((rho + rho.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff();
}

void SimConfig::validate() const {
  if (dim < 3) throw std::invalid_argument("SimConfig: dim must be >= 3");
  if (n_samples < 1) throw std::invalid_argument("SimConfig: n_samples must be >= 1");
  if (!(decorrelation_gap > 0.0))
    throw std::invalid_argument("SimConfig: decorrelation_gap must be > 0");
  if (!(drive_period > 0.0)) throw std::invalid_argument("SimConfig: drive_period must be > 0");
  if (!(leak_tol > 0.0)) throw std::invalid_argument("SimConfig: leak_tol must be > 0");
}

int SimConfig::effective_working_dim() const {
  return working_dim > 0 ? std::max(working_dim, dim) : std::max(dim + 12, 20);
}

Eigen::VectorXcd encode_qubit(const QubitSpec& q, int dim) {
  if (!(q.p >= 0.0 && q.p <= 1.0))
    throw std::invalid_argument("encode_qubit: p must lie in [0, 1]");
  if (dim < 2) throw std::invalid_argument("encode_qubit: dim must be >= 2");
  VectorXcd v = VectorXcd::Zero(dim);
  v[0] = std::sqrt(q.p);
  v[1] = std::sqrt(1.0 - q.p);
  return v;
}

Eigen::VectorXcd coherent_state(Complex alpha, int dim) {
  VectorXcd v(dim);
  v[0] = 1.0;
  for (int n = 1; n < dim; ++n) v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  v *= std::exp(-0.5 * std::norm(alpha));
  v.normalize();
  return v;
}

void apply_phase(StateVector& psi, int mode, double theta) {
  if (mode < 0 || mode >= psi.n_modes)
    throw std::invalid_argument("apply_phase: bad mode index");
  const std::int64_t stride = ipow(psi.dim, mode);
  const std::int64_t block = stride * psi.dim;
  std::vector<Complex> phase(static_cast<std::size_t>(psi.dim));
  for (int n = 0; n < psi.dim; ++n)
    phase[static_cast<std::size_t>(n)] = std::exp(Complex(0.0, -theta * n));
  for (std::int64_t idx = 0; idx < psi.amp.size(); ++idx)
    psi.amp[idx] *= phase[static_cast<std::size_t>((idx % block) / stride)];
}

void apply_mixer(StateVector& psi, int i, int j, double mix_angle) {
  apply_pair_gate(psi, i, j, make_mixer_gate(psi.dim, mix_angle));
}

void apply_two_mode_squeeze(StateVector& psi, int i, int j, double r) {
  apply_pair_gate(psi, i, j, make_tms_gate(psi.dim, r));
}

DensityMatrix partial_trace_mode(const StateVector& psi, int mode, int out_dim) {
  if (mode < 0 || mode >= psi.n_modes)
    throw std::invalid_argument("partial_trace_mode: bad mode index");
  const int dim = psi.dim;
  const std::int64_t stride = ipow(dim, mode);
  const std::int64_t block = stride * dim;

  MatrixXcd rho = MatrixXcd::Zero(dim, dim);
  // rho(m, n) = sum_rest psi[m, rest] conj(psi[n, rest])
  for (std::int64_t outer = 0; outer < psi.amp.size(); outer += block) {
    for (std::int64_t inner = 0; inner < stride; ++inner) {
      const std::int64_t base = outer + inner;
      for (int m = 0; m < dim; ++m) {
        const Complex am = psi.amp[base + m * stride];
        if (am == 0.0) continue;
        for (int n = 0; n < dim; ++n)
          rho(m, n) += am * std::conj(psi.amp[base + n * stride]);
      }
    }
  }
  DensityMatrix out;
  if (out_dim > 0 && out_dim < dim)
    out.rho = rho.topLeftCorner(out_dim, out_dim);
  else
    out.rho = std::move(rho);
  return out;
}

std::pair<DensityMatrix, DensityMatrix> run_single_shot(
    double theta1, double theta2, const QubitSpec& q1, const QubitSpec& q2,
    const SimConfig& cfg) {
  cfg.validate();
  const int wd = cfg.effective_working_dim();

  const VectorXcd modes[4] = {encode_qubit(q1, wd), encode_qubit(q2, wd),
                              VectorXcd::Unit(wd, 0), VectorXcd::Unit(wd, 0)};
  StateVector psi = StateVector::product(modes);

  apply_phase(psi, 0, theta1);
  apply_phase(psi, 1, theta2);
  apply_beamsplitter(psi, 0, 1);
  apply_two_mode_squeeze(psi, 0, 2, std::acosh(2.0));  // gain G = 4
  apply_beamsplitter(psi, 0, 3);
  apply_phase(psi, 0, -theta1);  // decode: exp(+i theta n)
  apply_phase(psi, 3, -theta2);

  double leak = 0.0;
  for (int m = 0; m < 4; ++m) leak = std::max(leak, psi.top_level_population(m));
  if (leak > cfg.leak_tol)
    throw TruncationError("run_single_shot: truncation leakage " + std::to_string(leak));

  return {partial_trace_mode(psi, 0, cfg.dim), partial_trace_mode(psi, 3, cfg.dim)};
}

PhaseAverages compute_phase_averages(const chaos::Trajectory& a,
                                     const chaos::Trajectory& b,
                                     const SimConfig& cfg) {
  cfg.validate();
  if (a.size() != b.size() || a.dt != b.dt)
    throw std::invalid_argument("compute_phase_averages: trajectory grids differ");
  const double gap_time = cfg.decorrelation_gap * cfg.drive_period;
  const auto gap_steps = static_cast<std::size_t>(std::llround(gap_time / a.dt));
  if (gap_steps == 0) throw std::invalid_argument("compute_phase_averages: gap below dt");
  const std::size_t needed = gap_steps * static_cast<std::size_t>(cfg.n_samples - 1);
  if (needed >= a.size())
    throw std::invalid_argument("compute_phase_averages: trajectory shorter than the sampling span");

  // Optional detrend: remove the mean frequency offset over the sampled span
  // (the receiver tracks the mean shift; only fluctuations dephase).
  double slope_a = 0.0, slope_b = 0.0;
  if (cfg.detrend_delta) {
    const double span = static_cast<double>(needed) * a.dt;
    if (span > 0.0) {
      slope_a = (a.theta[needed] - a.theta[0]) / span;
      slope_b = (b.theta[needed] - b.theta[0]) / span;
    }
  }

  PhaseAverages pa;
  Complex s1 = 0.0, s2 = 0.0, sx = 0.0;
  for (int k = 0; k < cfg.n_samples; ++k) {
    const std::size_t idx = static_cast<std::size_t>(k) * gap_steps;
    const double t = a.t[idx];
    const double th1 = a.theta[idx] - slope_a * t;
    const double th2 = b.theta[idx] - slope_b * t;
    s1 += std::exp(Complex(0.0, th1));
    s2 += std::exp(Complex(0.0, th2));
    sx += std::exp(Complex(0.0, th1 - th2));
  }
  const double n = static_cast<double>(cfg.n_samples);
  pa.c1 = s1 / n;
  pa.c2 = s2 / n;
  pa.cross_direct = sx / n;
  pa.n_samples = cfg.n_samples;
  return pa;
}

DensityMatrix reduced_channel_output(Complex cbar_own, Complex cbar_other,
                                     const QubitSpec& q_own, const QubitSpec& q_other,
                                     const SimConfig& cfg, bool amp_uses_other) {
  cfg.validate();
  const double m_own = std::min(1.0, std::abs(cbar_own));
  const double m_other = std::min(1.0, std::abs(cbar_other));
  const double arg_own = std::arg(cbar_own);
  const double arg_other = std::arg(cbar_other);

  // Target output-mode operator (commutator-exact):
  //   A = a0 + x a1 + n L† + w W,  x = m_own m_other e^{i(arg_own-arg_other)},
  //   n = sqrt(3/2) m_amp,  w = sqrt(n^2 - x^2)  (vacuum completion).
  const double m_amp = amp_uses_other ? m_other : m_own;
  const double n_coef = std::sqrt(1.5) * m_amp;
  const double x_coef = m_own * m_other;
  if (n_coef < x_coef - 1e-12)
    throw std::invalid_argument("reduced_channel_output: amplifier weight below crosstalk");

  const int wd = cfg.effective_working_dim();
  const VectorXcd modes[4] = {encode_qubit(q_own, wd), encode_qubit(q_other, wd),
                              VectorXcd::Unit(wd, 0), VectorXcd::Unit(wd, 0)};
  StateVector psi = StateVector::product(modes);

  // Dilation: attenuate the crosstalk into W, fold both into the signal wire,
  // then squeeze against L. Heisenberg algebra fixed by the identities
  //   tan(psi) = n,  cos(tau) = x / n,  cosh(r) = 1 / cos(psi).
  apply_phase(psi, 1, arg_other - arg_own);
  if (n_coef > 1e-15) {
    const double tau = std::acos(std::clamp(x_coef / n_coef, -1.0, 1.0));
    const double psi_angle = std::atan(n_coef);
    apply_mixer(psi, 1, 3, tau);
    apply_mixer(psi, 0, 1, psi_angle);
    apply_two_mode_squeeze(psi, 0, 2, std::acosh(1.0 / std::cos(psi_angle)));
  }

  double leak = 0.0;
  for (int m = 0; m < 4; ++m) leak = std::max(leak, psi.top_level_population(m));
  if (leak > cfg.leak_tol)
    throw TruncationError("reduced_channel_output: truncation leakage " + std::to_string(leak));

  return partial_trace_mode(psi, 0, cfg.dim);
}

std::pair<DensityMatrix, DensityMatrix> monte_carlo_transmission(
    const chaos::Trajectory& traj_a, const chaos::Trajectory& traj_b,
    const QubitSpec& q1, const QubitSpec& q2, const SimConfig& cfg,
    AveragingModel model) {
  const PhaseAverages pa = compute_phase_averages(traj_a, traj_b, cfg);

  if (model == AveragingModel::ReducedChannel) {
    DensityMatrix rho3 = reduced_channel_output(pa.c1, pa.c2, q1, q2, cfg,
                                                /*amp_uses_other=*/false);
    DensityMatrix rho4 = reduced_channel_output(pa.c2, pa.c1, q2, q1, cfg,
                                                cfg.paper_asymmetry);
    return {std::move(rho3), std::move(rho4)};
  }

  // Literal mixture: uniform average of fixed-phase single shots.
  const double gap_time = cfg.decorrelation_gap * cfg.drive_period;
  const auto gap_steps = static_cast<std::size_t>(std::llround(gap_time / traj_a.dt));
  double slope_a = 0.0, slope_b = 0.0;
  if (cfg.detrend_delta) {
    const std::size_t span_idx = gap_steps * static_cast<std::size_t>(cfg.n_samples - 1);
    const double span = static_cast<double>(span_idx) * traj_a.dt;
    if (span > 0.0) {
      slope_a = (traj_a.theta[span_idx] - traj_a.theta[0]) / span;
      slope_b = (traj_b.theta[span_idx] - traj_b.theta[0]) / span;
    }
  }
  DensityMatrix rho3, rho4;
  rho3.rho = MatrixXcd::Zero(cfg.dim, cfg.dim);
  rho4.rho = MatrixXcd::Zero(cfg.dim, cfg.dim);
  for (int k = 0; k < cfg.n_samples; ++k) {
    const std::size_t idx = static_cast<std::size_t>(k) * gap_steps;
    const double t = traj_a.t[idx];
    auto [r3, r4] = run_single_shot(traj_a.theta[idx] - slope_a * t,
                                    traj_b.theta[idx] - slope_b * t, q1, q2, cfg);
    rho3.rho += r3.rho;
    rho4.rho += r4.rho;
  }
  rho3.rho /= static_cast<double>(cfg.n_samples);
  rho4.rho /= static_cast<double>(cfg.n_samples);
  return {std::move(rho3), std::move(rho4)};
}

DensityMatrix receive_qubit(const DensityMatrix& mode_state) {
  const int d = mode_state.dim();
  if (d < 2) throw std::invalid_argument("receive_qubit: need at least two levels");
  DensityMatrix out;
  out.rho = MatrixXcd::Zero(d, d);
  out.rho(0, 0) = mode_state.rho(0, 0);
  out.rho(0, 1) = mode_state.rho(0, 1);
  out.rho(1, 0) = mode_state.rho(1, 0);
  Complex excited = 0.0;
  for (int n = 1; n < d; ++n) excited += mode_state.rho(n, n);
  out.rho(1, 1) = excited;
  return out;
}

double fidelity(const DensityMatrix& rho, const QubitSpec& q) {
  if (rho.dim() < 2) throw std::invalid_argument("fidelity: state dimension below 2");
  if (!(q.p >= 0.0 && q.p <= 1.0)) throw std::invalid_argument("fidelity: p outside [0, 1]");
  const double a0 = std::sqrt(q.p), a1 = std::sqrt(1.0 - q.p);
  const Complex f = a0 * a0 * rho.rho(0, 0) + a1 * a1 * rho.rho(1, 1) +
                    a0 * a1 * (rho.rho(0, 1) + rho.rho(1, 0));
  return f.real();
}

double predicted_fidelity(double M, const QubitSpec&, const QubitSpec&) {
  if (!(M > 0.0 && M <= 1.0))
    throw std::invalid_argument("predicted_fidelity: M must lie in (0, 1]");
  return 1.0 - M;
}

std::complex<double> mean_amplitude(const DensityMatrix& rho) {
  Complex acc = 0.0;
  for (int n = 1; n < rho.dim(); ++n)
    acc += std::sqrt(static_cast<double>(n)) * rho.rho(n, n - 1);
  return acc;
}

std::complex<double> mean_amplitude_squared(const DensityMatrix& rho) {
  Complex acc = 0.0;
  for (int n = 2; n < rho.dim(); ++n)
    acc += std::sqrt(static_cast<double>(n * (n - 1))) * rho.rho(n, n - 2);
  return acc;
}

double mean_photon_number(const DensityMatrix& rho) {
  double acc = 0.0;
  for (int n = 1; n < rho.dim(); ++n) acc += n * rho.rho(n, n).real();
  return acc;
}

}  // namespace qcdma::fock
