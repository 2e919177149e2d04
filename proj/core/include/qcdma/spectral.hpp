#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace qcdma::spectral {

/// One-sided power spectral density over angular frequency.
///
/// Normalization: <delta^2> = pi * integral S(w) dw, so a single tone
/// A cos(w1 t + phi) carries a banded integral of A^2 / (2 pi) around w1.
/// This is the unique convention under which the correction factor
/// M = exp(-pi int S/w^2 dw) and its square root as a phase average are
/// simultaneously consistent.
struct PowerSpectrum {
  std::vector<double> omega;    // bin centers, ascending, omega[0] = 0
  std::vector<double> density;  // S(omega) >= 0
  static constexpr const char* norm_note = "one-sided; <delta^2> = pi*int S dw";
};

struct Tone {
  double amplitude = 0.0;  // A >= 0
  double omega = 1.0;      // > 0
  double phase = 0.0;
};

struct CorrectionFactor {
  double M = 1.0;  // in (0, 1]
  double omega_lo = 0.0;
  double omega_hi = 0.0;
};

enum class Window { Hann, Rect };

/// Averaged periodogram (Welch, 50% overlap) with the normalization above.
/// `segments` is the number of half-overlapping segments the series is split
/// into; the segment length is rounded down to a power of two. Throws
/// std::invalid_argument when the series is too short for the requested
/// segmentation.
PowerSpectrum estimate_psd(std::span<const double> series, double dt,
                           int segments = 8, Window window = Window::Hann);

/// M = exp(-pi * int_lo^hi S(w)/w^2 dw), trapezoidal on the PSD grid.
/// Band edges are clamped to grid nodes; [omega_lo, omega_hi] must intersect
/// the grid away from the DC bin.
CorrectionFactor correction_factor(const PowerSpectrum& spectrum,
                                   double omega_lo, double omega_hi);

/// Default integration band: the smallest and largest positive-frequency grid
/// points where S exceeds rel_threshold * max(S). For broadband (chaotic)
/// spectra the lower edge is the first positive bin, i.e. 2*pi / T_segment.
std::pair<double, double> default_band(const PowerSpectrum& spectrum,
                                       double rel_threshold = 1e-6);

/// Trapezoidal cumulative integral of delta; theta[0] = 0.
std::vector<double> accumulate_phase(std::span<const double> delta, double dt);

/// Arithmetic mean of exp(-i theta(t)) over the samples.
std::complex<double> empirical_phase_average(std::span<const double> theta);

/// Product of J0(A_a / w_a) over the tones (Fourier-Bessel average).
/// Throws std::invalid_argument on a non-positive tone frequency.
double bessel_product_average(std::span<const Tone> tones);

/// Sampled quasiperiodic signal sum_a A_a cos(w_a t + phi_a); test helper for
/// the oracle chain but also used by scenario synthesis.
std::vector<double> synthesize_tones(std::span<const Tone> tones, double dt,
                                     std::size_t n_samples);

}  // namespace qcdma::spectral
