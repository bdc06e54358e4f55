#pragma once

#include <cstddef>
#include <vector>

#include "mvcca/matrix.hpp"
#include "mvcca/matrixio.hpp"

namespace mvcca::seg {

// Fixed-length segmentation with fractional overlap. segment_len is in
// samples for audio input and in frames for feature-matrix input.
struct SegmentSpec {
  std::size_t segment_len = 8000;   // 500 ms at 16 kHz
  double overlap_fraction = 0.5;

  std::size_t hop() const;
};

// Segments start at 0, hop, 2*hop, ...; each has exactly segment_len
// samples/frames; a trailing remainder shorter than segment_len is dropped.
// Inputs shorter than one segment yield an empty list and a warning.
std::vector<io::AudioClip> segment_utterance(const io::AudioClip& clip,
                                             const SegmentSpec& spec);
std::vector<FeatureMatrix> segment_utterance(const FeatureMatrix& frames,
                                             const SegmentSpec& spec);

// M equal-width column chunks of one segment, trailing remainder discarded.
struct ViewSet {
  std::vector<Matrix> views;        // M matrices, all F x floor(T/M)
  std::size_t m_chunks = 0;
  std::size_t discarded_frames = 0;

  std::size_t feature_rows() const { return views.empty() ? 0 : views.front().rows(); }
  std::size_t view_width() const { return views.empty() ? 0 : views.front().cols(); }
};

ViewSet chunk_views(const FeatureMatrix& segment, std::size_t m);

}  // namespace mvcca::seg
