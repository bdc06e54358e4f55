#include "mvcca/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "mvcca/common.hpp"

namespace mvcca::dsp {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place.
void fft_radix2(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<double> direct_dft_magnitudes(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  const std::size_t bins = n / 2 + 1;
  std::vector<double> out(bins);
  for (std::size_t f = 0; f < bins; ++f) {
    double re = 0.0, im = 0.0;
    const double w = -2.0 * std::numbers::pi * static_cast<double>(f) /
                     static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = w * static_cast<double>(k);
      re += frame[k] * std::cos(phase);
      im += frame[k] * std::sin(phase);
    }
    out[f] = std::hypot(re, im);
  }
  return out;
}

}  // namespace

std::vector<double> hamming_window(std::size_t n) {
  if (n < 2) throw ArgumentError("hamming_window: n must be at least 2");
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                  static_cast<double>(n - 1));
  return w;
}

std::vector<double> fourier_magnitudes(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  if (n == 0) throw ArgumentError("fourier_magnitudes: empty frame");
  if (!is_power_of_two(n)) return direct_dft_magnitudes(frame);
  std::vector<std::complex<double>> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = frame[k];
  fft_radix2(x);
  std::vector<double> out(n / 2 + 1);
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = std::abs(x[f]);
  return out;
}

FeatureMatrix stft(const io::AudioClip& clip, const StftConfig& cfg) {
  if (clip.samples.empty()) throw ArgumentError("stft: empty clip");
  if (cfg.hop == 0 || cfg.hop > cfg.window_len)
    throw ArgumentError("stft: hop must satisfy 0 < hop <= window_len");
  const std::size_t n = cfg.window_len;
  const std::size_t len = clip.samples.size();
  const std::size_t pad = cfg.center_pad ? n / 2 : 0;

  std::size_t frames;
  if (cfg.center_pad) {
    frames = len / cfg.hop + 1;
  } else {
    if (len < n) throw ArgumentError("stft: clip shorter than one window and center padding is off");
    frames = (len - n) / cfg.hop + 1;
  }

  const std::vector<double> window = hamming_window(n);
  const std::size_t bins = n / 2 + 1;
  FeatureMatrix out;
  out.values = Matrix(bins, frames);
  out.kind = MatrixKind::spectrogram;

  std::vector<double> frame(n);
  for (std::size_t tau = 0; tau < frames; ++tau) {
    const std::size_t start = tau * cfg.hop;  // index into the padded signal
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t padded_idx = start + k;
      double sample = 0.0;
      if (padded_idx >= pad && padded_idx - pad < len)
        sample = clip.samples[padded_idx - pad];
      frame[k] = sample * window[k];
    }
    const std::vector<double> mags = fourier_magnitudes(frame);
    for (std::size_t f = 0; f < bins; ++f) out.values(f, tau) = mags[f];
  }
  return out;
}

}  // namespace mvcca::dsp
