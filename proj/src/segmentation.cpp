#include "mvcca/segmentation.hpp"

#include <cmath>
#include <string>

#include "mvcca/common.hpp"

namespace mvcca::seg {
namespace {

void check_spec(const SegmentSpec& spec) {
  if (spec.segment_len == 0) throw ArgumentError("segment spec: segment_len must be positive");
  if (spec.overlap_fraction < 0.0 || spec.overlap_fraction >= 1.0)
    throw ArgumentError("segment spec: overlap_fraction must lie in [0, 1)");
  if (spec.hop() == 0) throw ArgumentError("segment spec: hop underflows to zero");
}

std::vector<std::size_t> segment_starts(std::size_t length, const SegmentSpec& spec,
                                        const std::string& what) {
  check_spec(spec);
  std::vector<std::size_t> starts;
  if (length < spec.segment_len) {
    warn(what + " shorter than one segment (" + std::to_string(length) + " < " +
         std::to_string(spec.segment_len) + "); no segments produced");
    return starts;
  }
  for (std::size_t s = 0; s + spec.segment_len <= length; s += spec.hop())
    starts.push_back(s);
  return starts;
}

}  // namespace

std::size_t SegmentSpec::hop() const {
  const double raw = static_cast<double>(segment_len) * (1.0 - overlap_fraction);
  return static_cast<std::size_t>(std::llround(raw));
}

std::vector<io::AudioClip> segment_utterance(const io::AudioClip& clip,
                                             const SegmentSpec& spec) {
  std::vector<io::AudioClip> out;
  for (std::size_t s : segment_starts(clip.samples.size(), spec, "audio clip")) {
    io::AudioClip segment;
    segment.sample_rate = clip.sample_rate;
    segment.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(s),
                           clip.samples.begin() + static_cast<std::ptrdiff_t>(s + spec.segment_len));
    out.push_back(std::move(segment));
  }
  return out;
}

std::vector<FeatureMatrix> segment_utterance(const FeatureMatrix& frames,
                                             const SegmentSpec& spec) {
  validate(frames);
  std::vector<FeatureMatrix> out;
  std::size_t index = 0;
  for (std::size_t s : segment_starts(frames.cols(), spec, "feature matrix")) {
    FeatureMatrix segment;
    segment.values = frames.values.col_range(s, s + spec.segment_len);
    segment.kind = frames.kind;
    segment.source_id = frames.source_id + "#seg" + std::to_string(index++);
    out.push_back(std::move(segment));
  }
  return out;
}

ViewSet chunk_views(const FeatureMatrix& segment, std::size_t m) {
  validate(segment);
  const std::size_t t = segment.cols();
  if (m < 1 || m > t)
    throw ArgumentError("chunk_views: m must lie in [1, cols]; got m=" +
                        std::to_string(m) + " for " + std::to_string(t) + " columns");
  const std::size_t width = t / m;
  ViewSet out;
  out.m_chunks = m;
  out.discarded_frames = t - m * width;
  out.views.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    out.views.push_back(segment.values.col_range(i * width, (i + 1) * width));
  return out;
}

}  // namespace mvcca::seg
