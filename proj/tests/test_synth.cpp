#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "mvcca/common.hpp"
#include "mvcca/decomp.hpp"
#include "mvcca/rng.hpp"
#include "mvcca/segmentation.hpp"
#include "mvcca/synth.hpp"
#include "test_util.hpp"

using namespace mvcca;

namespace {

synth::SynthConfig tiny_config() {
  synth::SynthConfig cfg;
  cfg.n_speakers_per_class = 3;
  cfg.segments_per_speaker = 2;
  cfg.feature_rows = 16;
  cfg.frames = 32;
  cfg.signal_span = 4;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("class templates are unit norm and orthogonal") {
  const auto templates = synth::class_templates(tiny_config());
  REQUIRE(templates.size() == 2);
  double n0 = 0.0, n1 = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < templates[0].size(); ++i) {
    n0 += templates[0][i] * templates[0][i];
    n1 += templates[1][i] * templates[1][i];
    dot += templates[0][i] * templates[1][i];
  }
  CHECK(n0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(n1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(dot) < 1e-12);
}

TEST_CASE("noiseless segments are scalar multiples of the template per chunk") {
  synth::SynthConfig cfg = tiny_config();
  cfg.nuisance_gain = 0.0;
  cfg.noise_std = 0.0;
  const auto templates = synth::class_templates(cfg);
  const Matrix segment = synth::generate_segment(cfg, 1, 0, 0);

  for (std::size_t c = 0; c < cfg.frames; ++c) {
    // Column = jitter * v_1 for some positive scalar shared by the column.
    const double scale = segment(0, c) / templates[1][0];
    for (std::size_t f = 0; f < cfg.feature_rows; ++f)
      CHECK(segment(f, c) == doctest::Approx(scale * templates[1][f]).epsilon(1e-12));
  }

  // MCCA with one view per block recovers the template direction.
  FeatureMatrix fm;
  fm.values = segment;
  fm.kind = MatrixKind::embedding;
  const std::size_t m = cfg.frames / cfg.signal_span;
  const FeatureMatrix reduced = decomp::mcca_reduce(fm, m, 1, 1e-4);
  double alignment = 0.0;
  for (std::size_t f = 0; f < cfg.feature_rows; ++f)
    alignment += reduced.values(f, 0) * templates[1][f];
  CHECK(std::fabs(alignment) >= 0.999);
}

TEST_CASE("speaker jitter stays within the configured range") {
  synth::SynthConfig cfg = tiny_config();
  cfg.nuisance_gain = 0.0;
  cfg.noise_std = 0.0;
  const auto templates = synth::class_templates(cfg);
  // Pick the template entry of largest magnitude to read the scale off.
  std::size_t pivot = 0;
  for (std::size_t f = 1; f < cfg.feature_rows; ++f)
    if (std::fabs(templates[0][f]) > std::fabs(templates[0][pivot])) pivot = f;
  for (std::size_t s = 0; s < cfg.n_speakers_per_class; ++s) {
    const Matrix segment = synth::generate_segment(cfg, 0, s, 0);
    const double jitter = segment(pivot, 0) / templates[0][pivot];
    CHECK(jitter >= 0.8);
    CHECK(jitter <= 1.2);
  }
}

TEST_CASE("nuisance blocks are uncorrelated across block pairs") {
  synth::SynthConfig cfg;
  cfg.n_speakers_per_class = 2;
  cfg.segments_per_speaker = 40;
  cfg.feature_rows = 64;
  cfg.frames = 96;
  cfg.signal_span = 12;
  cfg.signal_gain = 0.0;
  cfg.noise_std = 0.0;
  cfg.seed = 6;

  SplitRng pick(7);
  double total = 0.0;
  const std::size_t blocks = cfg.frames / cfg.signal_span;
  const std::size_t pairs = 1000;
  for (std::size_t trial = 0; trial < pairs; ++trial) {
    const int label = static_cast<int>(pick.next_below(2));
    const std::size_t speaker = pick.next_below(cfg.n_speakers_per_class);
    const std::size_t segment_idx = pick.next_below(cfg.segments_per_speaker);
    const Matrix segment = synth::generate_segment(cfg, label, speaker, segment_idx);
    const std::size_t b1 = pick.next_below(blocks);
    std::size_t b2 = pick.next_below(blocks - 1);
    if (b2 >= b1) ++b2;

    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t f = 0; f < cfg.feature_rows; ++f)
      for (std::size_t k = 0; k < cfg.signal_span; ++k) {
        const double a = segment(f, b1 * cfg.signal_span + k);
        const double b = segment(f, b2 * cfg.signal_span + k);
        dot += a * b;
        n1 += a * a;
        n2 += b * b;
      }
    total += std::fabs(dot) / std::sqrt(n1 * n2);
  }
  CHECK(total / static_cast<double>(pairs) <= 0.1);
}

TEST_CASE("generate_dataset writes a balanced, readable corpus") {
  testutil::TempDir dir("synth");
  const synth::SynthConfig cfg = tiny_config();
  const auto dataset = synth::generate_dataset(cfg, dir.str());

  CHECK(dataset.manifest.entries.size() == 2 * 3 * 2);
  std::map<std::string, std::size_t> per_speaker;
  std::size_t per_class[2] = {0, 0};
  for (const auto& e : dataset.manifest.entries) {
    per_speaker[e.speaker_id]++;
    per_class[static_cast<int>(e.label)]++;
  }
  CHECK(per_speaker.size() == 6);
  for (const auto& [speaker, count] : per_speaker) CHECK(count == 2);
  CHECK(per_class[0] == per_class[1]);

  // Files exist and parse; segment content matches the in-memory generator.
  const io::Manifest manifest = io::read_manifest(dataset.manifest_path);
  const FeatureMatrix first = io::read_fmx(manifest.entries.front().path);
  CHECK(first.rows() == cfg.feature_rows);
  CHECK(first.cols() == cfg.frames);
  CHECK(first.values == synth::generate_segment(cfg, 0, 0, 0));
}

TEST_CASE("identical seeds give byte-identical datasets") {
  testutil::TempDir a("synthA"), b("synthB");
  const synth::SynthConfig cfg = tiny_config();
  synth::generate_dataset(cfg, a.str());
  synth::generate_dataset(cfg, b.str());
  for (const auto& entry : std::filesystem::directory_iterator(a.str())) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.csv") continue;  // paths differ by directory
    CHECK(testutil::slurp(entry.path().string()) ==
          testutil::slurp(b.str() + "/" + name));
  }
}

TEST_CASE("synth config validation") {
  synth::SynthConfig cfg = tiny_config();
  cfg.signal_span = 5;  // does not divide 32
  testutil::TempDir dir("synthbad");
  CHECK_THROWS_AS(synth::generate_dataset(cfg, dir.str()), ArgumentError);
  cfg = tiny_config();
  cfg.noise_std = -1.0;
  CHECK_THROWS_AS(synth::generate_dataset(cfg, dir.str()), ArgumentError);
}
