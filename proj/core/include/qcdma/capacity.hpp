#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qcdma::capacity {

enum class ChannelKind { Single, Fdma, Cdma };

struct ChannelModel {
  ChannelKind kind = ChannelKind::Single;
  double eta = 1.0;       // transmissivity at the center frequency, [0, 1]
  double n_mean = 1.0;    // mean photon number per use (epsilon/omega)
  int n_pairs = 1;        // user-pair count N
  double M = 0.01;        // correction factor (CDMA)
  double bw_ratio = 0.2;  // relative band full width (FDMA)
  double gain = 4.0;      // amplifier gain entering the CDMA noise floor
  bool split_energy = true;  // divide n_mean across pairs

  // Individually switchable terms of the CDMA effective noise.
  bool cdma_crosstalk_term = true;  // (N-1) M n_pair
  bool cdma_amp_term = true;        // (3M/2)(G-1)
  bool cdma_loss_term = true;       // M (1-eta) n_pair

  void validate() const;
};

struct RateResult {
  double classical = 0.0;  // bits per channel use per pair
  double quantum = 0.0;    // qubits per channel use per pair
  double classical_aggregate = 0.0;
  double quantum_aggregate = 0.0;
};

/// Entropy of a thermal state with mean photon number x, in bits:
/// g(x) = (x+1) log2(x+1) - x log2 x, g(0) = 0.
double thermal_entropy(double x);

/// Energy-constrained pure-loss channel: classical g(eta n), quantum
/// max(0, g(eta n) - g((1-eta) n)).
RateResult single_pair_rates(double eta, double n_mean);

/// Largest N the FDMA band accommodates at one-full-width spacing.
int fdma_max_pairs(double bw_ratio);

/// Users equally spaced at one profile width across the band; user k sees
/// eta_k = eta / (1 + (2 off_k / bw)^2); per-pair rates averaged over users.
/// Throws std::invalid_argument when N exceeds fdma_max_pairs.
RateResult fdma_rates(const ChannelModel& model);

/// Unit-transmissivity channel with additive thermal noise assembled from
/// Eq.-(3)-structured terms; Holevo rate in closed form, coherent information
/// via the exact two-mode Gaussian dilation of the noise.
RateResult cdma_rates(const ChannelModel& model);

/// Effective additive noise photon number of the CDMA model.
double cdma_noise_photons(const ChannelModel& model);

struct RatePoint {
  ChannelKind kind;
  int n_pairs;
  double eta;
  double classical;
  double quantum;
};

struct SweepConfig {
  std::vector<int> n_grid = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> eta_grid;  // empty -> {0, 0.05, ..., 1}
  double n_mean = 1.0;
  double M = 0.01;
  double bw_ratio = 0.2;
};

/// Cartesian sweep over (kind, N, eta); FDMA rows are emitted only within its
/// band capacity.
std::vector<RatePoint> rate_sweep(const SweepConfig& config);

const char* to_string(ChannelKind k);

}  // namespace qcdma::capacity
