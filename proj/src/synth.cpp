#include "mvcca/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mvcca/common.hpp"
#include "mvcca/rng.hpp"

namespace mvcca::synth {
namespace {

void check_config(const SynthConfig& cfg) {
  if (cfg.n_speakers_per_class < 1 || cfg.segments_per_speaker < 1 ||
      cfg.feature_rows < 1 || cfg.frames < 1 || cfg.signal_span < 1)
    throw ArgumentError("synth: all counts must be at least 1");
  if (cfg.signal_gain < 0.0 || cfg.nuisance_gain < 0.0 || cfg.noise_std < 0.0)
    throw ArgumentError("synth: gains and noise std must be non-negative");
  if (cfg.frames % cfg.signal_span != 0)
    throw ArgumentError("synth: signal_span must divide the frame count");
}

std::vector<double> unit_gaussian_vector(SplitRng rng, std::size_t n) {
  std::vector<double> v(n);
  double norm_sq = 0.0;
  for (double& x : v) {
    x = rng.next_gaussian();
    norm_sq += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

std::string speaker_name(int label, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%03zu", label == 0 ? "nt" : "pd", index);
  return buf;
}

}  // namespace

std::vector<std::vector<double>> class_templates(const SynthConfig& cfg) {
  check_config(cfg);
  const SplitRng root = SplitRng(cfg.seed).substream("template");
  std::vector<double> v0 = unit_gaussian_vector(root.substream(std::uint64_t{0}),
                                                cfg.feature_rows);
  std::vector<double> v1 = unit_gaussian_vector(root.substream(std::uint64_t{1}),
                                                cfg.feature_rows);
  // Orthogonalize the second template against the first so the class
  // separation |v_0 - v_1| is pinned at sqrt(2).
  double dot = 0.0;
  for (std::size_t i = 0; i < v0.size(); ++i) dot += v0[i] * v1[i];
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    v1[i] -= dot * v0[i];
    norm_sq += v1[i] * v1[i];
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v1) x *= inv;
  return {v0, v1};
}

Matrix generate_segment(const SynthConfig& cfg, int label, std::size_t speaker_index,
                        std::size_t segment_index) {
  check_config(cfg);
  const auto templates = class_templates(cfg);
  const std::vector<double>& v = templates[static_cast<std::size_t>(label)];

  const SplitRng speaker_rng = SplitRng(cfg.seed)
                                   .substream("speaker")
                                   .substream(static_cast<std::uint64_t>(label))
                                   .substream(speaker_index);
  const double jitter = speaker_rng.substream("jitter").next_uniform(0.8, 1.2);

  const SplitRng segment_rng = speaker_rng.substream("segment").substream(segment_index);
  const std::size_t blocks = cfg.frames / cfg.signal_span;

  Matrix out(cfg.feature_rows, cfg.frames);
  const double signal_scale = cfg.signal_gain * jitter;
  // Per unit gain one nuisance block carries the same expected energy as the
  // whole-segment signal (T), so the default nuisance_gain > signal_gain puts
  // the dominant per-segment directions on the nuisance.
  const double weight_scale = cfg.nuisance_gain * std::sqrt(static_cast<double>(blocks));
  for (std::size_t b = 0; b < blocks; ++b) {
    const SplitRng block_rng = segment_rng.substream("block").substream(b);
    const std::vector<double> direction =
        unit_gaussian_vector(block_rng.substream("nuisance-direction"), cfg.feature_rows);
    SplitRng weight_rng = block_rng.substream("nuisance-weights");
    for (std::size_t k = 0; k < cfg.signal_span; ++k) {
      const std::size_t col = b * cfg.signal_span + k;
      const double w = weight_scale * weight_rng.next_gaussian();
      for (std::size_t f = 0; f < cfg.feature_rows; ++f)
        out(f, col) = signal_scale * v[f] + w * direction[f];
    }
  }
  if (cfg.noise_std > 0.0) {
    SplitRng noise_rng = segment_rng.substream("noise");
    for (double& x : out.data()) x += cfg.noise_std * noise_rng.next_gaussian();
  }
  return out;
}

SynthDataset generate_dataset(const SynthConfig& cfg, const std::string& out_dir) {
  check_config(cfg);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  SynthDataset dataset;
  dataset.directory = out_dir;
  dataset.templates = class_templates(cfg);

  for (int label = 0; label < 2; ++label) {
    FeatureMatrix tmpl;
    tmpl.values = Matrix(cfg.feature_rows, 1);
    for (std::size_t f = 0; f < cfg.feature_rows; ++f)
      tmpl.values(f, 0) = dataset.templates[static_cast<std::size_t>(label)][f];
    tmpl.kind = MatrixKind::embedding;
    tmpl.source_id = std::string("template-") + io::label_name(static_cast<io::Label>(label));
    io::write_fmx(tmpl, (dir / ("template_" + io::label_name(static_cast<io::Label>(label)) +
                                ".fmx")).string());
  }

  for (int label = 0; label < 2; ++label) {
    for (std::size_t s = 0; s < cfg.n_speakers_per_class; ++s) {
      const std::string speaker = speaker_name(label, s);
      for (std::size_t j = 0; j < cfg.segments_per_speaker; ++j) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_seg%03zu.fmx", speaker.c_str(), j);
        FeatureMatrix segment;
        segment.values = generate_segment(cfg, label, s, j);
        segment.kind = MatrixKind::embedding;
        segment.source_id = name;
        io::write_fmx(segment, (dir / name).string());
        dataset.manifest.entries.push_back(
            {speaker, static_cast<io::Label>(label), name});
      }
    }
  }

  dataset.manifest_path = (dir / "manifest.csv").string();
  io::write_manifest(dataset.manifest, dataset.manifest_path);
  // Re-read so entry paths are resolved absolute, like any other manifest.
  dataset.manifest = io::read_manifest(dataset.manifest_path);
  return dataset;
}

}  // namespace mvcca::synth
