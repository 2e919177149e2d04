#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace qcdma::network {

/// Heisenberg-picture linear mode map a_i -> sum_j U[i][j] a_j + V[i][j] a_j†.
/// Physical (unitary-induced) maps satisfy U U† - V V† = I.
struct ModeTransform {
  Eigen::MatrixXcd U;
  Eigen::MatrixXcd V;
  std::vector<std::string> labels;

  int n_modes() const { return static_cast<int>(U.rows()); }
};

ModeTransform identity(int n_modes);

/// 50:50 beamsplitter: a_i -> (a_i + a_j)/sqrt(2), a_j -> (a_i - a_j)/sqrt(2).
/// The matrix is involutive.
ModeTransform beamsplitter(int n_modes, int i, int j);

/// Variable mixer: a_i -> cos(t) a_i + sin(t) a_j, a_j -> sin(t) a_i - cos(t) a_j
/// (reduces to the 50:50 beamsplitter at t = pi/4).
ModeTransform mixer(int n_modes, int i, int j, double mix_angle);

/// Phase-insensitive amplifier of gain G on (signal, ancilla):
/// a_s -> sqrt(G) a_s + sqrt(G-1) a_anc†, a_anc -> sqrt(G-1) a_s† + sqrt(G) a_anc.
ModeTransform amplifier(int n_modes, int signal_idx, int ancilla_idx, double gain);

/// Chaotic phase shifter: a_i -> exp(-i theta) a_i (encode) or exp(+i theta)
/// (decode = true).
ModeTransform phase_shift(int n_modes, int i, double theta, bool decode = false);

/// Composition in application order: transforms.front() acts first.
ModeTransform compose(std::span<const ModeTransform> transforms);

/// max-norm of U U† - V V† - I.
double check_bogoliubov(const ModeTransform& t);

/// Coefficients of one output mode of the two-pair network in the basis
/// (own signal, other pair's signal, amplifier ancilla a_LA†, splitter vacuum a_BS).
struct NetworkCoefficients {
  std::complex<double> c_sig;
  std::complex<double> c_cross;
  std::complex<double> c_amp;
  std::complex<double> c_bs;
};

struct PairCoefficients {
  NetworkCoefficients out3;
  NetworkCoefficients out4;
};

/// Exact network at fixed phases:
///   a3 = a1 + a2 e^{i(t1-t2)} + (sqrt6/2) e^{i t1} a_LA† + (1/sqrt2) e^{i t1} a_BS
///   a4 = a2 + a1 e^{i(t2-t1)} + (sqrt6/2) e^{i t2} a_LA† - (1/sqrt2) e^{i t2} a_BS
PairCoefficients full_network(double theta1, double theta2);

/// The same network as a 4-mode ModeTransform on (a1, a2, a_LA, a_BS);
/// rows 0 and 3 carry the a3 and a4 coefficients.
ModeTransform full_network_transform(double theta1, double theta2);

/// Phase-averaged (reduced) channel coefficients:
///   a3 = a1 + sqrt(M1 M2) a2 + sqrt(3 M1/2) a_LA† + sqrt(M1/2) a_BS
/// and the a4 counterpart with M2 in place of M1. With paper_asymmetry the
/// a4 amplifier term keeps the printed sqrt(3 M1/2).
PairCoefficients averaged_network(double M1, double M2, bool paper_asymmetry = false);

}  // namespace qcdma::network
