#include "qcdma/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace qcdma::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW planning is not thread-safe; executions on distinct plans are.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan p) const {
    std::lock_guard lock(fftw_mutex());
    fftw_destroy_plan(p);
  }
};

// Real-to-complex FFT of `in` (length n); returns n/2+1 complex bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& in) {
  const std::size_t n = in.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  double* buf_in = fftw_alloc_real(n);
  auto* buf_out = reinterpret_cast<fftw_complex*>(fftw_alloc_complex(n / 2 + 1));
  std::copy(in.begin(), in.end(), buf_in);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_mutex());
    // FFTW_ESTIMATE: deterministic plan selection, independent of timing.
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf_in, buf_out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = {buf_out[k][0], buf_out[k][1]};
  {
    std::lock_guard lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf_in);
  fftw_free(buf_out);
  return out;
}

}  // namespace

PowerSpectrum estimate_psd(std::span<const double> series, double dt,
                           int segments, Window window) {
  if (!(dt > 0.0)) throw std::invalid_argument("estimate_psd: dt must be > 0");
  if (segments < 1) throw std::invalid_argument("estimate_psd: segments must be >= 1");
  if (series.size() < static_cast<std::size_t>(2 * segments))
    throw std::invalid_argument("estimate_psd: series too short for segmentation");

  // 50% overlap: `segments` half-overlapping segments need (segments+1)/2
  // full lengths of data.
  const std::size_t seg_len = 2 * series.size() / (static_cast<std::size_t>(segments) + 1);
  if (seg_len < 4) throw std::invalid_argument("estimate_psd: series too short");
  const std::size_t hop = seg_len / 2;

  std::vector<double> taper(seg_len, 1.0);
  if (window == Window::Hann) {
    for (std::size_t i = 0; i < seg_len; ++i)
      taper[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                       static_cast<double>(seg_len)));
  }
  double win_power = 0.0;  // mean square of the taper
  for (double w : taper) win_power += w * w;
  win_power /= static_cast<double>(seg_len);

  const std::size_t n_bins = seg_len / 2 + 1;
  std::vector<double> acc(n_bins, 0.0);
  std::size_t n_segs = 0;
  std::vector<double> buf(seg_len);
  for (std::size_t start = 0; start + seg_len <= series.size(); start += hop) {
    for (std::size_t i = 0; i < seg_len; ++i) buf[i] = series[start + i] * taper[i];
    const auto spec = rfft(buf);
    for (std::size_t k = 0; k < n_bins; ++k) acc[k] += std::norm(spec[k]);
    ++n_segs;
  }

  // Periodogram -> one-sided density per Hz: 2|X|^2 dt / (N W), halved at DC
  // and Nyquist; then rescaled to our angular-frequency convention
  // S(w) = P_hz(f) / (2 pi^2).
  PowerSpectrum ps;
  ps.omega.resize(n_bins);
  ps.density.resize(n_bins);
  const double df = 1.0 / (static_cast<double>(seg_len) * dt);
  const double hz_scale =
      dt / (static_cast<double>(seg_len) * win_power * static_cast<double>(n_segs));
  for (std::size_t k = 0; k < n_bins; ++k) {
    const bool edge = (k == 0) || (k == n_bins - 1 && seg_len % 2 == 0);
    const double one_sided = (edge ? 1.0 : 2.0) * hz_scale * acc[k];
    ps.omega[k] = 2.0 * kPi * df * static_cast<double>(k);
    ps.density[k] = one_sided / (2.0 * kPi * kPi);
  }
  return ps;
}

CorrectionFactor correction_factor(const PowerSpectrum& spectrum,
                                   double omega_lo, double omega_hi) {
  if (spectrum.omega.size() != spectrum.density.size() || spectrum.omega.size() < 2)
    throw std::invalid_argument("correction_factor: malformed spectrum");
  if (!(omega_lo > 0.0) || !(omega_hi > omega_lo))
    throw std::invalid_argument("correction_factor: need 0 < omega_lo < omega_hi");
  if (omega_lo > spectrum.omega.back() || omega_hi < spectrum.omega[1])
    throw std::invalid_argument("correction_factor: band outside the spectrum grid");

  // Trapezoid over whole grid cells inside [lo, hi]; the DC node is never
  // used. Whole-cell clamping makes the band multiplicative across a split at
  // any grid point.
  double integral = 0.0;
  bool any = false;
  const double eps = 1e-12 * spectrum.omega.back();
  for (std::size_t k = 1; k + 1 < spectrum.omega.size(); ++k) {
    const double w0 = spectrum.omega[k];
    const double w1 = spectrum.omega[k + 1];
    if (w0 < omega_lo - eps || w1 > omega_hi + eps) continue;
    const double f0 = spectrum.density[k] / (w0 * w0);
    const double f1 = spectrum.density[k + 1] / (w1 * w1);
    integral += 0.5 * (f0 + f1) * (w1 - w0);
    any = true;
  }
  if (!any) throw std::invalid_argument("correction_factor: band contains no grid cell");

  CorrectionFactor cf;
  cf.omega_lo = omega_lo;
  cf.omega_hi = omega_hi;
  cf.M = std::exp(-kPi * integral);
  return cf;
}

std::pair<double, double> default_band(const PowerSpectrum& spectrum, double rel_threshold) {
  if (spectrum.density.size() < 2)
    throw std::invalid_argument("default_band: malformed spectrum");
  const double peak = *std::max_element(spectrum.density.begin(), spectrum.density.end());
  if (peak <= 0.0) return {spectrum.omega[1], spectrum.omega.back()};
  const double thr = rel_threshold * peak;
  std::size_t lo = 1, hi = spectrum.density.size() - 1;
  while (lo < spectrum.density.size() - 1 && spectrum.density[lo] <= thr) ++lo;
  while (hi > lo && spectrum.density[hi] <= thr) --hi;
  return {spectrum.omega[lo], spectrum.omega[hi]};
}

std::vector<double> accumulate_phase(std::span<const double> delta, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("accumulate_phase: dt must be > 0");
  std::vector<double> theta(delta.size(), 0.0);
  for (std::size_t i = 1; i < delta.size(); ++i)
    theta[i] = theta[i - 1] + 0.5 * dt * (delta[i - 1] + delta[i]);
  return theta;
}

std::complex<double> empirical_phase_average(std::span<const double> theta) {
  if (theta.empty()) throw std::invalid_argument("empirical_phase_average: empty input");
  double re = 0.0, im = 0.0;
  for (double th : theta) {
    re += std::cos(th);
    im -= std::sin(th);
  }
  const double n = static_cast<double>(theta.size());
  return {re / n, im / n};
}

double bessel_product_average(std::span<const Tone> tones) {
  double prod = 1.0;
  for (const Tone& tone : tones) {
    if (!(tone.omega > 0.0))
      throw std::invalid_argument("bessel_product_average: tone frequency must be > 0");
    prod *= std::cyl_bessel_j(0, tone.amplitude / tone.omega);
  }
  return prod;
}

std::vector<double> synthesize_tones(std::span<const Tone> tones, double dt,
                                     std::size_t n_samples) {
  std::vector<double> out(n_samples, 0.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = static_cast<double>(i) * dt;
    double v = 0.0;
    for (const Tone& tone : tones) v += tone.amplitude * std::cos(tone.omega * t + tone.phase);
    out[i] = v;
  }
  return out;
}

}  // namespace qcdma::spectral
