#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace har::dsp {

using Complex = std::complex<double>;

enum class WindowKind { rectangular, hamming };

std::string to_string(WindowKind kind);
WindowKind window_kind_from_string(const std::string& name);

/// Welch segmentation parameters. `segment_len` is the per-segment
/// observation count O; successive segments start `segment_len - overlap`
/// samples apart.
struct WelchConfig {
  std::size_t segment_len = 64;
  std::size_t overlap = 32;
  WindowKind window = WindowKind::hamming;

  std::size_t step() const { return segment_len - overlap; }
  std::size_t bins() const { return segment_len / 2 + 1; }
  /// Throws ShapeError unless the config is usable on signals of `signal_len`.
  void validate(std::size_t signal_len) const;

  bool operator==(const WelchConfig&) const = default;
};

struct PsdEstimate {
  std::vector<double> values;  // one-sided, segment_len/2 + 1 bins
  double bin_width_hz = 0.0;
  std::size_t segment_len = 0;
  std::size_t segment_count = 0;
};

bool is_power_of_two(std::size_t n);

/// Forward DFT X(k) = sum_n x_n exp(-i 2 pi k n / N), unnormalized.
/// Iterative radix-2 with a precomputed twiddle table; N must be a power of
/// two >= 2 and every sample finite.
std::vector<Complex> fft_real(std::span<const double> signal);

/// |X(k)| for k = 0..N/2 of an even-length spectrum.
std::vector<double> magnitude_onesided(std::span<const Complex> spectrum);

/// Temporal taper u(t), t = 0..O-1. Hamming is 0.54 - 0.46 cos(2 pi t/(O-1)).
std::vector<double> make_window(WindowKind kind, std::size_t length);

/// Mean squared window value (1/O) sum u(t)^2.
double window_power(std::span<const double> window);

/// One-sided windowed periodogram |FFT(u * y)|^2 / (O P), interior bins doubled.
std::vector<double> windowed_periodogram(std::span<const double> segment,
                                         std::span<const double> window);

/// Average of windowed periodograms over overlapping segments. The trailing
/// partial segment is discarded.
PsdEstimate welch_psd(std::span<const double> signal, const WelchConfig& cfg,
                      double sample_rate_hz = 50.0);

/// Number of full segments welch_psd averages for a signal of `signal_len`.
std::size_t welch_segment_count(std::size_t signal_len, const WelchConfig& cfg);

}  // namespace har::dsp
