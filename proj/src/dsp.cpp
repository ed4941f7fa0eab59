#include "har/dsp.hpp"

#include "har/error.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace har::dsp {

namespace {

void require_finite(std::span<const double> x, const char* who) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw ShapeError(std::string(who) + ": non-finite sample at index " +
                       std::to_string(i));
    }
  }
}

// Radix-2 decimation-in-time plan: bit-reversal permutation plus the N/2
// twiddles exp(-i 2 pi k / N), each evaluated directly rather than by
// recurrence so error does not accumulate along the table.
class Radix2Plan {
 public:
  explicit Radix2Plan(std::size_t n) : n_(n), rev_(n), twiddle_(n / 2) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      rev_[i] = r;
    }
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = step * static_cast<double>(k);
      twiddle_[k] = Complex(std::cos(a), std::sin(a));
    }
  }

  std::vector<Complex> run(std::span<const double> x) const {
    std::vector<Complex> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[rev_[i]] = Complex(x[i], 0.0);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          const Complex t = twiddle_[j * stride] * out[start + j + half];
          const Complex u = out[start + j];
          out[start + j] = u + t;
          out[start + j + half] = u - t;
        }
      }
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<Complex> twiddle_;
};

const Radix2Plan& plan_for(std::size_t n) {
  // Plans are immutable once built; one cache per thread keeps this lock-free.
  thread_local std::map<std::size_t, Radix2Plan> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Radix2Plan(n)).first;
  return it->second;
}

}  // namespace

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::rectangular:
      return "rectangular";
    case WindowKind::hamming:
      return "hamming";
  }
  return "unknown";
}

WindowKind window_kind_from_string(const std::string& name) {
  if (name == "rectangular") return WindowKind::rectangular;
  if (name == "hamming") return WindowKind::hamming;
  throw std::invalid_argument("unknown window kind '" + name + "'");
}

void WelchConfig::validate(std::size_t signal_len) const {
  if (segment_len < 2 || segment_len % 2 != 0) {
    throw ShapeError("welch: segment length must be even and >= 2, got " +
                     std::to_string(segment_len));
  }
  if (!is_power_of_two(segment_len)) {
    throw ShapeError("welch: segment length must be a power of two, got " +
                     std::to_string(segment_len));
  }
  if (overlap >= segment_len) {
    throw ShapeError("welch: overlap " + std::to_string(overlap) +
                     " must be below segment length " +
                     std::to_string(segment_len));
  }
  if (segment_len > signal_len) {
    throw ShapeError("welch: segment length " + std::to_string(segment_len) +
                     " exceeds signal length " + std::to_string(signal_len));
  }
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<Complex> fft_real(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n < 2 || !is_power_of_two(n)) {
    throw ShapeError("fft_real: length must be a power of two >= 2, got " +
                     std::to_string(n));
  }
  require_finite(signal, "fft_real");
  return plan_for(n).run(signal);
}

std::vector<double> magnitude_onesided(std::span<const Complex> spectrum) {
  const std::size_t n = spectrum.size();
  if (n < 2 || n % 2 != 0) {
    throw ShapeError("magnitude_onesided: spectrum length must be even, got " +
                     std::to_string(n));
  }
  std::vector<double> mag(n / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(spectrum[k]);
  return mag;
}

std::vector<double> make_window(WindowKind kind, std::size_t length) {
  if (length < 2) {
    throw ShapeError("make_window: length must be >= 2, got " +
                     std::to_string(length));
  }
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::hamming) {
    const double denom = static_cast<double>(length - 1);
    for (std::size_t t = 0; t < length; ++t) {
      w[t] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi *
                                    static_cast<double>(t) / denom);
    }
  }
  return w;
}

double window_power(std::span<const double> window) {
  double sum = 0.0;
  for (double u : window) sum += u * u;
  return sum / static_cast<double>(window.size());
}

std::vector<double> windowed_periodogram(std::span<const double> segment,
                                         std::span<const double> window) {
  if (segment.size() != window.size()) {
    throw ShapeError("windowed_periodogram: segment length " +
                     std::to_string(segment.size()) + " != window length " +
                     std::to_string(window.size()));
  }
  const std::size_t o = segment.size();
  std::vector<double> tapered(o);
  for (std::size_t t = 0; t < o; ++t) tapered[t] = window[t] * segment[t];
  const auto spectrum = fft_real(tapered);

  const double scale = 1.0 / (static_cast<double>(o) * window_power(window));
  std::vector<double> out(o / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double p = std::norm(spectrum[k]) * scale;
    if (k != 0 && k != o / 2) p *= 2.0;
    out[k] = p;
  }
  return out;
}

std::size_t welch_segment_count(std::size_t signal_len, const WelchConfig& cfg) {
  cfg.validate(signal_len);
  return (signal_len - cfg.segment_len) / cfg.step() + 1;
}

PsdEstimate welch_psd(std::span<const double> signal, const WelchConfig& cfg,
                      double sample_rate_hz) {
  const std::size_t segments = welch_segment_count(signal.size(), cfg);
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("welch_psd: sample rate must be positive");
  }
  const auto window = make_window(cfg.window, cfg.segment_len);

  PsdEstimate est;
  est.values.assign(cfg.bins(), 0.0);
  est.segment_len = cfg.segment_len;
  est.segment_count = segments;
  est.bin_width_hz = sample_rate_hz / static_cast<double>(cfg.segment_len);

  for (std::size_t i = 0; i < segments; ++i) {
    const auto p = windowed_periodogram(
        signal.subspan(i * cfg.step(), cfg.segment_len), window);
    for (std::size_t k = 0; k < p.size(); ++k) est.values[k] += p[k];
  }
  const double inv = 1.0 / static_cast<double>(segments);
  for (double& v : est.values) v *= inv;
  return est;
}

}  // namespace har::dsp
