#include "qcdma/capacity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace qcdma::capacity {

namespace {

// Entropy of the two-mode environment of the unit-gain additive-noise channel
// (loss 1/(1+n) followed by amplification 1+n), for a thermal input with mean
// photon number n_mean. Computed from the symplectic eigenvalues of the
// environment covariance block; vacuum variance convention 1/2.
double environment_entropy(double n_noise, double n_mean) {
  if (n_noise <= 0.0) return 0.0;
  const double T = 1.0 / (1.0 + n_noise);
  const double G = 1.0 + n_noise;

  using Eigen::MatrixXd;
  // Modes (a, v, l), quadrature order (x_a, p_a, x_v, p_v, x_l, p_l).
  MatrixXd sigma = MatrixXd::Identity(6, 6) * 0.5;
  sigma(0, 0) = sigma(1, 1) = n_mean + 0.5;

  MatrixXd S = MatrixXd::Identity(6, 6);
  const double st = std::sqrt(T), rt = std::sqrt(1.0 - T);
  // Beamsplitter (a, v): a' = st a + rt v, v' = rt a - st v.
  S(0, 0) = st; S(0, 2) = rt; S(2, 0) = rt; S(2, 2) = -st;
  S(1, 1) = st; S(1, 3) = rt; S(3, 1) = rt; S(3, 3) = -st;
  sigma = S * sigma * S.transpose();

  const double ch = std::sqrt(G), sh = std::sqrt(G - 1.0);
  MatrixXd S2 = MatrixXd::Identity(6, 6);
  // Two-mode squeezer (a, l): x_a' = ch x_a + sh x_l, p_a' = ch p_a - sh p_l.
  S2(0, 0) = ch; S2(0, 4) = sh;
  S2(1, 1) = ch; S2(1, 5) = -sh;
  S2(4, 0) = sh; S2(4, 4) = ch;
  S2(5, 1) = -sh; S2(5, 5) = ch;
  sigma = S2 * sigma * S2.transpose();

  // Environment block (v, l).
  const MatrixXd env = sigma.block(2, 2, 4, 4);
  MatrixXd omega = MatrixXd::Zero(4, 4);
  omega(0, 1) = 1.0; omega(1, 0) = -1.0;
  omega(2, 3) = 1.0; omega(3, 2) = -1.0;

  const MatrixXd m = omega * env;
  const Eigen::VectorXcd ev = m.eigenvalues();
  // Eigenvalues come in +-i nu pairs; collect distinct nus.
  std::vector<double> nus;
  for (int k = 0; k < ev.size(); ++k) {
    const double nu = std::abs(ev[k].imag());
    bool seen = false;
    for (double have : nus)
      if (std::abs(have - nu) < 1e-9 * std::max(1.0, nu)) { seen = true; break; }
    if (!seen) nus.push_back(nu);
  }
  double entropy = 0.0;
  for (double nu : nus) entropy += thermal_entropy(std::max(0.0, nu - 0.5));
  return entropy;
}

}  // namespace

void ChannelModel::validate() const {
  auto bad = [](const char* what) { throw std::invalid_argument(std::string("ChannelModel: ") + what); };
  if (!(eta >= 0.0 && eta <= 1.0)) bad("eta must lie in [0, 1]");
  if (n_mean < 0.0) bad("n_mean must be >= 0");
  if (n_pairs < 1) bad("N must be >= 1");
  if (!(M > 0.0 && M <= 1.0)) bad("M must lie in (0, 1]");
  if (!(bw_ratio > 0.0)) bad("bw_ratio must be > 0");
  if (gain < 1.0) bad("gain must be >= 1");
}

double thermal_entropy(double x) {
  if (x < 0.0) throw std::invalid_argument("thermal_entropy: negative argument");
  if (x == 0.0) return 0.0;
  return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

RateResult single_pair_rates(double eta, double n_mean) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("single_pair_rates: eta must lie in [0, 1]");
  if (n_mean < 0.0) throw std::invalid_argument("single_pair_rates: n_mean must be >= 0");
  RateResult r;
  r.classical = thermal_entropy(eta * n_mean);
  r.quantum = std::max(0.0, thermal_entropy(eta * n_mean) - thermal_entropy((1.0 - eta) * n_mean));
  r.classical_aggregate = r.classical;
  r.quantum_aggregate = r.quantum;
  return r;
}

int fdma_max_pairs(double bw_ratio) {
  if (!(bw_ratio > 0.0)) throw std::invalid_argument("fdma_max_pairs: bw_ratio must be > 0");
  // Users at one-full-width spacing must stay inside the unit relative band.
  return static_cast<int>(std::floor(1.0 / bw_ratio)) + 1;
}

RateResult fdma_rates(const ChannelModel& model) {
  model.validate();
  const int n = model.n_pairs;
  if (n > fdma_max_pairs(model.bw_ratio))
    throw std::invalid_argument("fdma_rates: N exceeds the band capacity at minimum spacing");

  const double per_pair_energy = model.split_energy ? model.n_mean / n : model.n_mean;
  RateResult sum;
  for (int k = 0; k < n; ++k) {
    const double offset = (static_cast<double>(k) - 0.5 * (n - 1)) * model.bw_ratio;
    const double profile = 1.0 / (1.0 + std::pow(2.0 * offset / model.bw_ratio, 2));
    const RateResult r = single_pair_rates(model.eta * profile, per_pair_energy);
    sum.classical += r.classical;
    sum.quantum += r.quantum;
  }
  RateResult out;
  out.classical = sum.classical / n;
  out.quantum = sum.quantum / n;
  out.classical_aggregate = sum.classical;
  out.quantum_aggregate = sum.quantum;
  return out;
}

double cdma_noise_photons(const ChannelModel& model) {
  const double n_pair = model.split_energy ? model.n_mean / model.n_pairs : model.n_mean;
  double noise = 0.0;
  if (model.cdma_crosstalk_term)
    noise += static_cast<double>(model.n_pairs - 1) * model.M * n_pair;
  if (model.cdma_amp_term) noise += 1.5 * model.M * (model.gain - 1.0);
  if (model.cdma_loss_term) noise += model.M * (1.0 - model.eta) * n_pair;
  return noise;
}

RateResult cdma_rates(const ChannelModel& model) {
  model.validate();
  const double n_pair = model.split_energy ? model.n_mean / model.n_pairs : model.n_mean;
  const double noise = cdma_noise_photons(model);

  RateResult r;
  r.classical = thermal_entropy(n_pair + noise) - thermal_entropy(noise);
  r.quantum = std::max(0.0, thermal_entropy(n_pair + noise) - environment_entropy(noise, n_pair));
  r.classical_aggregate = r.classical * model.n_pairs;
  r.quantum_aggregate = r.quantum * model.n_pairs;
  return r;
}

std::vector<RatePoint> rate_sweep(const SweepConfig& config) {
  std::vector<double> etas = config.eta_grid;
  if (etas.empty())
    for (int k = 0; k <= 20; ++k) etas.push_back(0.05 * k);

  std::vector<RatePoint> points;
  for (double eta : etas) {
    const RateResult s = single_pair_rates(eta, config.n_mean);
    points.push_back({ChannelKind::Single, 1, eta, s.classical, s.quantum});
  }
  for (int n : config.n_grid) {
    for (double eta : etas) {
      ChannelModel m;
      m.eta = eta;
      m.n_mean = config.n_mean;
      m.n_pairs = n;
      m.M = config.M;
      m.bw_ratio = config.bw_ratio;
      if (n <= fdma_max_pairs(config.bw_ratio)) {
        m.kind = ChannelKind::Fdma;
        const RateResult f = fdma_rates(m);
        points.push_back({ChannelKind::Fdma, n, eta, f.classical, f.quantum});
      }
      m.kind = ChannelKind::Cdma;
      const RateResult c = cdma_rates(m);
      points.push_back({ChannelKind::Cdma, n, eta, c.classical, c.quantum});
    }
  }
  return points;
}

const char* to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::Single: return "single";
    case ChannelKind::Fdma: return "fdma";
    case ChannelKind::Cdma: return "cdma";
  }
  return "unknown";
}

}  // namespace qcdma::capacity
