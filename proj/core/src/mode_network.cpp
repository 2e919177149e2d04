#include "qcdma/mode_network.hpp"

#include <cmath>
#include <stdexcept>

namespace qcdma::network {

namespace {

using Complex = std::complex<double>;

void check_index(int n, int i, const char* who) {
  if (i < 0 || i >= n) throw std::out_of_range(std::string(who) + ": mode index out of range");
}

std::vector<std::string> default_labels(int n) {
  std::vector<std::string> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = "a" + std::to_string(i + 1);
  return labels;
}

}  // namespace

ModeTransform identity(int n_modes) {
  ModeTransform t;
  t.U = Eigen::MatrixXcd::Identity(n_modes, n_modes);
  t.V = Eigen::MatrixXcd::Zero(n_modes, n_modes);
  t.labels = default_labels(n_modes);
  return t;
}

ModeTransform mixer(int n_modes, int i, int j, double mix_angle) {
  check_index(n_modes, i, "mixer");
  check_index(n_modes, j, "mixer");
  if (i == j) throw std::invalid_argument("mixer: modes must differ");
  ModeTransform t = identity(n_modes);
  const double c = std::cos(mix_angle), s = std::sin(mix_angle);
  t.U(i, i) = c;
  t.U(i, j) = s;
  t.U(j, i) = s;
  t.U(j, j) = -c;
  return t;
}

ModeTransform beamsplitter(int n_modes, int i, int j) {
  return mixer(n_modes, i, j, std::atan(1.0));  // pi/4
}

ModeTransform amplifier(int n_modes, int signal_idx, int ancilla_idx, double gain) {
  check_index(n_modes, signal_idx, "amplifier");
  check_index(n_modes, ancilla_idx, "amplifier");
  if (signal_idx == ancilla_idx) throw std::invalid_argument("amplifier: modes must differ");
  if (gain < 1.0) throw std::invalid_argument("amplifier: gain must be >= 1");
  ModeTransform t = identity(n_modes);
  const double g = std::sqrt(gain), gm = std::sqrt(gain - 1.0);
  t.U(signal_idx, signal_idx) = g;
  t.V(signal_idx, ancilla_idx) = gm;
  t.U(ancilla_idx, ancilla_idx) = g;
  t.V(ancilla_idx, signal_idx) = gm;
  return t;
}

ModeTransform phase_shift(int n_modes, int i, double theta, bool decode) {
  check_index(n_modes, i, "phase_shift");
  ModeTransform t = identity(n_modes);
  const double sign = decode ? +1.0 : -1.0;
  t.U(i, i) = std::exp(Complex(0.0, sign * theta));
  return t;
}

ModeTransform compose(std::span<const ModeTransform> transforms) {
  if (transforms.empty()) throw std::invalid_argument("compose: empty chain");
  ModeTransform total = transforms.front();
  for (std::size_t k = 1; k < transforms.size(); ++k) {
    const ModeTransform& next = transforms[k];
    if (next.n_modes() != total.n_modes())
      throw std::invalid_argument("compose: mode count mismatch");
    // Later stage S applied after accumulated T:
    //   U = U_S U_T + V_S conj(V_T),  V = U_S V_T + V_S conj(U_T).
    Eigen::MatrixXcd u = next.U * total.U + next.V * total.V.conjugate();
    Eigen::MatrixXcd v = next.U * total.V + next.V * total.U.conjugate();
    total.U = std::move(u);
    total.V = std::move(v);
  }
  return total;
}

double check_bogoliubov(const ModeTransform& t) {
  const Eigen::MatrixXcd res = t.U * t.U.adjoint() - t.V * t.V.adjoint() -
                               Eigen::MatrixXcd::Identity(t.n_modes(), t.n_modes());
  return res.cwiseAbs().maxCoeff();
}

ModeTransform full_network_transform(double theta1, double theta2) {
  // Modes: 0 = a1, 1 = a2, 2 = a_LA, 3 = a_BS. Encode phases, BS1 on (0,1),
  // amplifier G = 4 on (0,2), BS2 on (0,3), decode phases on the receiver
  // wires 0 and 3.
  const int n = 4;
  const ModeTransform stages[] = {
      phase_shift(n, 0, theta1),
      phase_shift(n, 1, theta2),
      beamsplitter(n, 0, 1),
      amplifier(n, 0, 2, 4.0),
      beamsplitter(n, 0, 3),
      phase_shift(n, 0, theta1, /*decode=*/true),
      phase_shift(n, 3, theta2, /*decode=*/true),
  };
  ModeTransform t = compose(stages);
  t.labels = {"a3", "a6", "a8", "a4"};
  return t;
}

PairCoefficients full_network(double theta1, double theta2) {
  const ModeTransform t = full_network_transform(theta1, theta2);
  PairCoefficients pc;
  pc.out3 = {t.U(0, 0), t.U(0, 1), t.V(0, 2), t.U(0, 3)};
  pc.out4 = {t.U(3, 1), t.U(3, 0), t.V(3, 2), t.U(3, 3)};
  return pc;
}

PairCoefficients averaged_network(double M1, double M2, bool paper_asymmetry) {
  if (!(M1 > 0.0 && M1 <= 1.0 && M2 > 0.0 && M2 <= 1.0))
    throw std::invalid_argument("averaged_network: M must lie in (0, 1]");
  PairCoefficients pc;
  pc.out3 = {1.0, std::sqrt(M1 * M2), std::sqrt(1.5 * M1), std::sqrt(0.5 * M1)};
  const double amp4 = paper_asymmetry ? std::sqrt(1.5 * M1) : std::sqrt(1.5 * M2);
  pc.out4 = {1.0, std::sqrt(M1 * M2), amp4, -std::sqrt(0.5 * M2)};
  return pc;
}

}  // namespace qcdma::network
