#pragma once

#include <cstddef>
#include <vector>

#include "mvcca/matrix.hpp"
#include "mvcca/matrixio.hpp"

namespace mvcca::dsp {

// Analysis defaults correspond to a 32 ms window and 4 ms hop at 16 kHz.
struct StftConfig {
  std::size_t window_len = 512;
  std::size_t hop = 64;
  bool center_pad = true;
};

// Symmetric Hamming window: w[k] = 0.54 - 0.46 cos(2 pi k / (n - 1)).
std::vector<double> hamming_window(std::size_t n);

// One-sided DFT magnitudes of a real frame: bins 0 .. len/2. Uses a radix-2
// FFT for power-of-two lengths and a direct DFT otherwise.
std::vector<double> fourier_magnitudes(const std::vector<double>& frame);

// Magnitude spectrogram, rows = window_len/2 + 1 frequency bins. With center
// padding the signal is padded with window_len/2 zeros on each side and the
// frame count is floor(len/hop) + 1; without it, frames must fit entirely
// inside the signal.
FeatureMatrix stft(const io::AudioClip& clip, const StftConfig& cfg = {});

}  // namespace mvcca::dsp
