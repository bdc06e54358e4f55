#include <doctest.h>

#include "mvcca/common.hpp"
#include "mvcca/rng.hpp"
#include "mvcca/segmentation.hpp"
#include "test_util.hpp"

using namespace mvcca;

namespace {

io::AudioClip ramp_clip(std::size_t n) {
  io::AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) clip.samples[i] = static_cast<double>(i) / 1e6;
  return clip;
}

FeatureMatrix frame_matrix(std::size_t rows, std::size_t cols) {
  FeatureMatrix m;
  m.values = Matrix(rows, cols);
  SplitRng rng(rows + 31 * cols);
  for (double& v : m.values.data()) v = rng.next_uniform(-2.0, 2.0);
  m.kind = MatrixKind::embedding;
  m.source_id = "utt";
  return m;
}

}  // namespace

TEST_CASE("12000 samples at 50% overlap give segments at 0 and 4000") {
  const auto segments = seg::segment_utterance(ramp_clip(12000), {8000, 0.5});
  REQUIRE(segments.size() == 2);
  CHECK(segments[0].samples.size() == 8000);
  CHECK(segments[1].samples.size() == 8000);
  CHECK(segments[0].samples[0] == ramp_clip(12000).samples[0]);
  CHECK(segments[1].samples[0] == ramp_clip(12000).samples[4000]);
}

TEST_CASE("exactly one segment at the boundary, none just below it") {
  CHECK(seg::segment_utterance(ramp_clip(8000), {8000, 0.5}).size() == 1);
  CHECK(seg::segment_utterance(ramp_clip(7999), {8000, 0.5}).empty());
}

TEST_CASE("segment starts form an arithmetic progression with the hop") {
  const seg::SegmentSpec spec{100, 0.25};
  CHECK(spec.hop() == 75);
  const auto segments = seg::segment_utterance(ramp_clip(1000), spec);
  for (std::size_t i = 0; i < segments.size(); ++i)
    CHECK(segments[i].samples[0] == doctest::Approx(static_cast<double>(i * 75) / 1e6));
  // Consecutive segments overlap by exactly overlap*len samples.
  for (std::size_t i = 0; i + 1 < segments.size(); ++i)
    for (std::size_t k = 0; k < 25; ++k)
      CHECK(segments[i].samples[75 + k] == segments[i + 1].samples[k]);
}

TEST_CASE("matrix segmentation slices frames") {
  const FeatureMatrix utt = frame_matrix(6, 250);
  const auto segments = seg::segment_utterance(utt, {96, 0.5});
  REQUIRE(segments.size() == 4);  // starts 0, 48, 96, 144; 154+96 > 250
  for (const auto& s : segments) {
    CHECK(s.rows() == 6);
    CHECK(s.cols() == 96);
  }
  for (std::size_t f = 0; f < 6; ++f)
    CHECK(segments[1].values(f, 0) == utt.values(f, 48));
}

TEST_CASE("chunk_views splits 126 frames into 8 views of 15, discarding 6") {
  const FeatureMatrix segment = frame_matrix(257, 126);
  const seg::ViewSet views = seg::chunk_views(segment, 8);
  CHECK(views.m_chunks == 8);
  CHECK(views.discarded_frames == 6);
  REQUIRE(views.views.size() == 8);
  for (const Matrix& v : views.views) {
    CHECK(v.rows() == 257);
    CHECK(v.cols() == 15);
  }
}

TEST_CASE("chunk_views with m=1 is the identity and m=cols gives unit width") {
  const FeatureMatrix segment = frame_matrix(1024, 24);
  const seg::ViewSet one = seg::chunk_views(segment, 1);
  CHECK(one.views.size() == 1);
  CHECK(one.discarded_frames == 0);
  CHECK(one.views[0] == segment.values);

  const seg::ViewSet w2v2 = seg::chunk_views(segment, 24);
  CHECK(w2v2.views.size() == 24);
  CHECK(w2v2.discarded_frames == 0);
  for (const Matrix& v : w2v2.views) CHECK(v.cols() == 1);
}

TEST_CASE("concatenating the views reproduces the leading columns exactly") {
  const FeatureMatrix segment = frame_matrix(9, 50);
  const seg::ViewSet views = seg::chunk_views(segment, 7);  // width 7, 1 dropped
  CHECK(views.discarded_frames == 1);
  std::size_t col = 0;
  for (const Matrix& v : views.views)
    for (std::size_t c = 0; c < v.cols(); ++c, ++col)
      for (std::size_t f = 0; f < segment.rows(); ++f)
        CHECK(v(f, c) == segment.values(f, col));
  CHECK(col == 49);
}

TEST_CASE("chunk_views argument errors") {
  const FeatureMatrix segment = frame_matrix(4, 10);
  CHECK_THROWS_AS(seg::chunk_views(segment, 0), ArgumentError);
  CHECK_THROWS_AS(seg::chunk_views(segment, 11), ArgumentError);
}
