#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvcca/matrix.hpp"
#include "mvcca/matrixio.hpp"

namespace mvcca::synth {

// Synthetic corpus with a planted class cue that is correlated across
// signal_span-wide blocks and a rank-1 nuisance that is resampled per block,
// i.e. uncorrelated across blocks. Substitutes for real recordings in the
// experiment suites.
struct SynthConfig {
  std::size_t n_speakers_per_class = 50;
  std::size_t segments_per_speaker = 20;
  std::size_t feature_rows = 64;   // F
  std::size_t frames = 96;         // T
  std::size_t signal_span = 12;    // block width; must divide frames
  double signal_gain = 1.0;
  double nuisance_gain = 2.0;
  double noise_std = 0.5;
  std::uint64_t seed = 0;
};

struct SynthDataset {
  io::Manifest manifest;
  std::vector<std::vector<double>> templates;  // unit class templates v_0, v_1
  std::string directory;
  std::string manifest_path;
};

// One segment, without touching disk. speaker and segment index select the
// RNG substreams, so any slice of a dataset can be regenerated independently.
Matrix generate_segment(const SynthConfig& cfg, int label, std::size_t speaker_index,
                        std::size_t segment_index);

// Class templates: unit vectors, mutually orthogonal (|v_0 - v_1| = sqrt(2)).
std::vector<std::vector<double>> class_templates(const SynthConfig& cfg);

// Writes one FMX1 file per segment plus manifest.csv and the two class
// templates into out_dir.
SynthDataset generate_dataset(const SynthConfig& cfg, const std::string& out_dir);

}  // namespace mvcca::synth
