#include "cli_app.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvcca/classify.hpp"
#include "mvcca/common.hpp"
#include "mvcca/decomp.hpp"
#include "mvcca/dsp.hpp"
#include "mvcca/harness.hpp"
#include "mvcca/matrixio.hpp"
#include "mvcca/segmentation.hpp"
#include "mvcca/synth.hpp"

namespace mvcca::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;  // 0 = hardware
  std::string output_dir = ".";
};

std::string resolve_output(const GlobalFlags& g, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(g.output_dir) / p).string();
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PersistenceError("cannot open config: " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw PersistenceError("cannot open for write: " + path);
  out << text;
  if (!out) throw PersistenceError("write failed: " + path);
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

harness::PipelineConfig pipeline_config(const std::string& config_path,
                                        const GlobalFlags& g,
                                        const std::string& features_path) {
  harness::PipelineConfig cfg;
  if (!config_path.empty()) cfg = harness::config_from_json(load_json_file(config_path));
  if (g.seed) cfg.fold_seed = *g.seed;
  cfg.threads = g.threads;
  if (!features_path.empty()) {
    std::ifstream in(features_path);
    if (!in) throw PersistenceError("cannot open feature list: " + features_path);
    cfg.feature_subset.clear();
    std::string line;
    std::getline(in, line);  // header "index,name"
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      cfg.feature_subset.push_back(std::stoull(line.substr(0, line.find(','))));
    }
  }
  return cfg;
}

synth::SynthConfig synth_config(const std::string& config_path, const GlobalFlags& g) {
  synth::SynthConfig cfg;
  if (!config_path.empty()) {
    const nlohmann::json j = load_json_file(config_path);
    try {
      if (j.contains("n_speakers_per_class"))
        cfg.n_speakers_per_class = j.at("n_speakers_per_class").get<std::size_t>();
      if (j.contains("segments_per_speaker"))
        cfg.segments_per_speaker = j.at("segments_per_speaker").get<std::size_t>();
      if (j.contains("feature_rows")) cfg.feature_rows = j.at("feature_rows").get<std::size_t>();
      if (j.contains("frames")) cfg.frames = j.at("frames").get<std::size_t>();
      if (j.contains("signal_span")) cfg.signal_span = j.at("signal_span").get<std::size_t>();
      if (j.contains("signal_gain")) cfg.signal_gain = j.at("signal_gain").get<double>();
      if (j.contains("nuisance_gain")) cfg.nuisance_gain = j.at("nuisance_gain").get<double>();
      if (j.contains("noise_std")) cfg.noise_std = j.at("noise_std").get<double>();
      if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("synth config " + config_path + ": " + e.what());
    }
  }
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

// ---- subcommand bodies ------------------------------------------------

int cmd_stft(const GlobalFlags& g, const std::string& input, const std::string& output,
             std::size_t window, std::size_t hop, bool no_center, bool log_display) {
  const io::AudioClip clip = io::read_wav(input);
  dsp::StftConfig cfg;
  cfg.window_len = window;
  cfg.hop = hop;
  cfg.center_pad = !no_center;
  if (clip.sample_rate != 16000 && window == 512 && hop == 64)
    warn("clip " + input + " has sample rate " + std::to_string(clip.sample_rate) +
         "; analysis defaults assume 16 kHz");
  FeatureMatrix spec = dsp::stft(clip, cfg);
  if (log_display)
    for (double& v : spec.values.data()) v = std::log10(1.0 + v);
  spec.source_id = fs::path(input).filename().string();
  io::write_fmx(spec, resolve_output(g, output));
  return 0;
}

int cmd_segment(const GlobalFlags& g, const std::string& input, const std::string& out_dir,
                double len_ms, std::size_t len_frames, double overlap,
                std::size_t window, std::size_t hop) {
  const std::string dir = resolve_output(g, out_dir);
  fs::create_directories(dir);
  const std::string stem = fs::path(input).stem().string();
  const std::string ext = fs::path(input).extension().string();

  std::size_t count = 0;
  if (ext == ".wav") {
    const io::AudioClip clip = io::read_wav(input);
    const auto len = static_cast<std::size_t>(len_ms / 1000.0 * clip.sample_rate);
    dsp::StftConfig stft_cfg;
    stft_cfg.window_len = window;
    stft_cfg.hop = hop;
    for (const io::AudioClip& piece : seg::segment_utterance(clip, {len, overlap})) {
      FeatureMatrix spec = dsp::stft(piece, stft_cfg);
      char name[64];
      std::snprintf(name, sizeof(name), "%s_seg%03zu.fmx", stem.c_str(), count);
      spec.source_id = name;
      io::write_fmx(spec, (fs::path(dir) / name).string());
      ++count;
    }
  } else {
    if (len_frames == 0)
      throw ArgumentError("segment: --len-frames is required for feature-matrix input");
    const FeatureMatrix frames = io::read_fmx(input);
    for (const FeatureMatrix& piece : seg::segment_utterance(frames, {len_frames, overlap})) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_seg%03zu.fmx", stem.c_str(), count);
      FeatureMatrix named = piece;
      named.source_id = name;
      io::write_fmx(named, (fs::path(dir) / name).string());
      ++count;
    }
  }
  std::printf("wrote %zu segments to %s\n", count, dir.c_str());
  return 0;
}

int cmd_reduce(const GlobalFlags& g, const std::vector<std::string>& inputs,
               const std::string& method, std::size_t chunks, std::size_t components,
               double epsilon, const std::string& output) {
  if (method != "mcca" && method != "pca")
    throw ArgumentError("reduce: --method must be mcca or pca");
  if (!output.empty() && inputs.size() > 1)
    throw ArgumentError("reduce: -o only applies to a single input; use --output-dir");
  for (const std::string& input : inputs) {
    const FeatureMatrix segment = io::read_fmx(input);
    const FeatureMatrix reduced =
        method == "mcca" ? decomp::mcca_reduce(segment, chunks, components, epsilon)
                         : decomp::pca_reduce(segment, components);
    std::string out = output;
    if (out.empty()) out = fs::path(input).stem().string() + ".reduced.fmx";
    io::write_fmx(reduced, resolve_output(g, out));
  }
  return 0;
}

int cmd_train(const GlobalFlags& g, const std::string& manifest_path,
              const std::string& config_path, const std::string& output) {
  const harness::PipelineConfig cfg = pipeline_config(config_path, g, "");
  const io::Manifest manifest = io::read_manifest(manifest_path);
  const auto data = harness::load_segments(manifest, cfg);
  const classify::SampleTable table = harness::reduce_to_table(data, cfg);
  const std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
  const std::string out = resolve_output(g, output);
  if (cfg.classifier == harness::ClassifierKind::logreg) {
    classify::save_logreg(classify::train_logreg(table, cfg.logreg_l2, seed), out);
  } else {
    classify::MlpConfig mlp_cfg;
    mlp_cfg.hidden_layers = cfg.mlp_layers_grid.front();
    mlp_cfg.units = cfg.mlp_units_grid.front();
    mlp_cfg.max_iterations = cfg.mlp_max_iterations;
    classify::save_mlp(classify::train_mlp(table, mlp_cfg, seed), mlp_cfg, out);
  }
  std::printf("trained on %zu segments (%zu features); model written to %s\n",
              table.size(), table.dim(), out.c_str());
  return 0;
}

int cmd_evaluate(const GlobalFlags& g, const std::string& manifest_path,
                 const std::string& config_path, const std::string& model_path,
                 const std::string& output) {
  const harness::PipelineConfig cfg = pipeline_config(config_path, g, "");
  const io::Manifest manifest = io::read_manifest(manifest_path);
  const auto data = harness::load_segments(manifest, cfg);
  const classify::SampleTable table = harness::reduce_to_table(data, cfg);

  const nlohmann::json meta = load_json_file(model_path);
  std::vector<double> probs;
  if (meta.value("kind", "") == "logreg")
    probs = classify::predict_proba(classify::load_logreg(model_path), table.features);
  else if (meta.value("kind", "") == "mlp")
    probs = classify::predict_proba(classify::load_mlp(model_path), table.features);
  else
    throw FormatError("evaluate: unknown model kind in " + model_path);

  std::vector<std::pair<std::string, double>> segment_probs;
  std::map<std::string, int> labels;
  for (std::size_t i = 0; i < table.size(); ++i) {
    segment_probs.emplace_back(table.speaker_ids[i], probs[i]);
    labels[table.speaker_ids[i]] = table.labels[i];
  }
  const double accuracy = harness::speaker_accuracy(segment_probs, labels);
  std::printf("speaker accuracy: %.6f over %zu speakers\n", accuracy, labels.size());
  if (!output.empty()) {
    nlohmann::ordered_json j{{"speaker_accuracy", accuracy},
                             {"speakers", labels.size()},
                             {"segments", table.size()}};
    write_text(resolve_output(g, output), j.dump(2) + "\n");
  }
  return 0;
}

int cmd_experiment(const GlobalFlags& g, const std::string& manifest_path,
                   const std::string& config_path, const std::string& features_path,
                   const std::string& json_out, const std::string& csv_out) {
  const harness::PipelineConfig cfg = pipeline_config(config_path, g, features_path);
  const io::Manifest manifest = io::read_manifest(manifest_path);
  const harness::ExperimentReport report = harness::run_experiment(manifest, cfg);
  std::printf("mean speaker accuracy %.6f +- %.6f over %zu folds x %zu seeds\n",
              report.mean, report.stddev, report.per_fold_per_seed.size(),
              cfg.seeds.size());
  if (!json_out.empty())
    write_text(resolve_output(g, json_out), harness::report_to_json(report));
  if (!csv_out.empty())
    write_text(resolve_output(g, csv_out), harness::report_to_csv(report));
  return 0;
}

int cmd_sweep(const GlobalFlags& g, const std::string& manifest_path,
              const std::string& config_path, const std::vector<std::size_t>& chunks,
              const std::vector<std::size_t>& components, const std::string& csv_out) {
  const harness::PipelineConfig cfg = pipeline_config(config_path, g, "");
  const io::Manifest manifest = io::read_manifest(manifest_path);
  const auto cells = harness::sweep_chunks(manifest, chunks, components, cfg);
  const std::string csv = harness::sweep_to_csv(cells);
  if (csv_out.empty())
    std::fputs(csv.c_str(), stdout);
  else
    write_text(resolve_output(g, csv_out), csv);
  return 0;
}

int cmd_rank_features(const GlobalFlags& g, const std::string& manifest_path,
                      const std::string& config_path, std::size_t repeats,
                      const std::string& output) {
  const harness::PipelineConfig cfg = pipeline_config(config_path, g, "");
  const io::Manifest manifest = io::read_manifest(manifest_path);
  const auto data = harness::load_segments(manifest, cfg);
  const classify::FeatureRanking ranking = harness::rank_features(data, cfg, repeats);
  const classify::SampleTable table = harness::reduce_to_table(data, cfg);

  std::ostringstream out;
  out << "index,name,score\n";
  for (std::size_t j : ranking.order)
    out << j << ',' << table.feature_names[j] << ',' << format17(ranking.scores[j])
        << '\n';
  write_text(resolve_output(g, output), out.str());
  return 0;
}

int cmd_select_top(const GlobalFlags& g, const std::string& ranking_path, double percent,
                   const std::string& output) {
  if (!(percent > 0.0) || percent > 100.0)
    throw ArgumentError("select-top: --percent must lie in (0, 100]");
  std::ifstream in(ranking_path);
  if (!in) throw PersistenceError("cannot open ranking: " + ranking_path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,name,score", 0) != 0)
    throw FormatError("ranking file must start with header \"index,name,score\"");
  std::vector<std::pair<std::size_t, std::string>> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw FormatError("ranking line malformed: " + line);
    entries.emplace_back(std::stoull(line.substr(0, c1)),
                         line.substr(c1 + 1, c2 - c1 - 1));
  }
  if (entries.empty()) throw FormatError("ranking file has no entries");
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(percent / 100.0 * entries.size())));
  std::ostringstream out;
  out << "index,name\n";
  for (std::size_t i = 0; i < keep; ++i)
    out << entries[i].first << ',' << entries[i].second << '\n';
  write_text(resolve_output(g, output), out.str());
  std::printf("kept %zu of %zu features\n", keep, entries.size());
  return 0;
}

int cmd_synth(const GlobalFlags& g, const std::string& config_path,
              const std::string& out_dir) {
  const synth::SynthConfig cfg = synth_config(config_path, g);
  const auto dataset = synth::generate_dataset(cfg, resolve_output(g, out_dir));
  std::printf("wrote %zu segments and %s\n", dataset.manifest.entries.size(),
              dataset.manifest_path.c_str());
  return 0;
}

int cmd_convert_csv(const GlobalFlags& g, const std::string& input,
                    const std::string& output, const std::string& kind,
                    const std::string& source_id) {
  const std::string in_ext = fs::path(input).extension().string();
  if (in_ext == ".csv") {
    std::ifstream in(input);
    if (!in) throw PersistenceError("cannot open for read: " + input);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        try {
          row.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw FormatError(input + " line " + std::to_string(line_no) +
                            ": not a number: " + cell);
        }
      }
      if (!rows.empty() && row.size() != rows.front().size())
        throw FormatError(input + " line " + std::to_string(line_no) +
                          ": ragged row");
      rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError(input + ": no data rows");
    FeatureMatrix m;
    m.values = Matrix(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows[i].size(); ++j) m.values(i, j) = rows[i][j];
    if (kind == "spectrogram") m.kind = MatrixKind::spectrogram;
    else if (kind == "embedding") m.kind = MatrixKind::embedding;
    else if (kind == "reduced") m.kind = MatrixKind::reduced;
    else throw ArgumentError("convert-csv: --kind must be spectrogram, embedding, or reduced");
    m.source_id = source_id.empty() ? fs::path(input).filename().string() : source_id;
    io::write_fmx(m, resolve_output(g, output));
  } else {
    const FeatureMatrix m = io::read_fmx(input);
    std::ostringstream out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j) out << ',';
        out << format17(m.values(i, j));
      }
      out << '\n';
    }
    write_text(resolve_output(g, output), out.str());
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"MAXVAR multiview CCA pipeline for time-series feature matrices"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Override the experiment/synth seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware)");
  app.add_option("--output-dir", g.output_dir, "Base directory for relative outputs");

  // stft
  auto* stft = app.add_subcommand("stft", "Magnitude spectrogram of a wav file");
  std::string stft_in, stft_out;
  std::size_t stft_window = 512, stft_hop = 64;
  bool stft_no_center = false, stft_log = false;
  stft->add_option("wav", stft_in, "Input wav (PCM16 mono)")->required();
  stft->add_option("-o,--output", stft_out, "Output .fmx path")->required();
  stft->add_option("--window", stft_window, "Window length in samples");
  stft->add_option("--hop", stft_hop, "Hop in samples");
  stft->add_flag("--no-center", stft_no_center, "Disable center padding");
  stft->add_flag("--log-display", stft_log, "Store log10(1+|X|) for display export");

  // segment
  auto* segment = app.add_subcommand("segment", "Cut an utterance into fixed segments");
  std::string seg_in, seg_out = ".";
  double seg_len_ms = 500.0, seg_overlap = 0.5;
  std::size_t seg_len_frames = 0, seg_window = 512, seg_hop = 64;
  segment->add_option("input", seg_in, "Input wav or fmx")->required();
  segment->add_option("-o,--output-dir", seg_out, "Directory for segment files");
  segment->add_option("--len-ms", seg_len_ms, "Segment length in ms (wav input)");
  segment->add_option("--len-frames", seg_len_frames, "Segment length in frames (fmx input)");
  segment->add_option("--overlap", seg_overlap, "Overlap fraction in [0,1)");
  segment->add_option("--window", seg_window, "STFT window for wav segments");
  segment->add_option("--hop", seg_hop, "STFT hop for wav segments");

  // reduce
  auto* reduce = app.add_subcommand("reduce", "MCCA or PCA reduction of segments");
  std::vector<std::string> reduce_in;
  std::string reduce_method = "mcca", reduce_out;
  std::size_t reduce_chunks = 8, reduce_components = 5;
  double reduce_epsilon = 1e-4;
  reduce->add_option("fmx", reduce_in, "Segment .fmx files")->required();
  reduce->add_option("--method", reduce_method, "mcca or pca");
  reduce->add_option("--chunks", reduce_chunks, "Number of views M");
  reduce->add_option("--components", reduce_components, "Components t");
  reduce->add_option("--epsilon", reduce_epsilon, "Gram regularizer");
  reduce->add_option("-o,--output", reduce_out, "Output path (single input only)");

  // train / evaluate
  auto* train = app.add_subcommand("train", "Train a classifier on a manifest");
  std::string train_manifest, train_config, train_out;
  train->add_option("--manifest", train_manifest, "Manifest CSV")->required();
  train->add_option("--config", train_config, "Pipeline config JSON");
  train->add_option("-o,--output", train_out, "Model JSON path")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Speaker accuracy of a saved model");
  std::string eval_manifest, eval_config, eval_model, eval_out;
  evaluate->add_option("--manifest", eval_manifest, "Manifest CSV")->required();
  evaluate->add_option("--config", eval_config, "Pipeline config JSON");
  evaluate->add_option("--model", eval_model, "Model JSON")->required();
  evaluate->add_option("-o,--output", eval_out, "Report JSON path");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Cross-validated experiment");
  std::string exp_manifest, exp_config, exp_features, exp_json, exp_csv;
  experiment->add_option("--manifest", exp_manifest, "Manifest CSV")->required();
  experiment->add_option("--config", exp_config, "Pipeline config JSON");
  experiment->add_option("--features", exp_features, "Selected-feature CSV (index,name)");
  experiment->add_option("-o,--output", exp_json, "Report JSON path");
  experiment->add_option("--csv", exp_csv, "Report CSV path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Chunk-count sweep");
  std::string sweep_manifest, sweep_config, sweep_csv;
  std::vector<std::size_t> sweep_chunks{4, 8, 12, 24}, sweep_components{5, 10};
  sweep->add_option("--manifest", sweep_manifest, "Manifest CSV")->required();
  sweep->add_option("--config", sweep_config, "Pipeline config JSON");
  sweep->add_option("--chunks", sweep_chunks, "M values")->delimiter(',');
  sweep->add_option("--components", sweep_components, "t values")->delimiter(',');
  sweep->add_option("-o,--output", sweep_csv, "CSV path (stdout when omitted)");

  // rank-features / select-top
  auto* rank = app.add_subcommand("rank-features", "Averaged permutation importance");
  std::string rank_manifest, rank_config, rank_out;
  std::size_t rank_repeats = 10;
  rank->add_option("--manifest", rank_manifest, "Manifest CSV")->required();
  rank->add_option("--config", rank_config, "Pipeline config JSON");
  rank->add_option("--repeats", rank_repeats, "Shuffles per feature");
  rank->add_option("-o,--output", rank_out, "Ranking CSV path")->required();

  auto* select = app.add_subcommand("select-top", "Top percent of a ranking");
  std::string select_ranking, select_out;
  double select_percent = 5.0;
  select->add_option("--ranking", select_ranking, "Ranking CSV")->required();
  select->add_option("--percent", select_percent, "Percent of features to keep");
  select->add_option("-o,--output", select_out, "Selected-feature CSV path")->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string synth_cfg_path, synth_out;
  synth_cmd->add_option("--config", synth_cfg_path, "Synth config JSON");
  synth_cmd->add_option("-o,--output-dir", synth_out, "Dataset directory")->required();

  // convert-csv
  auto* convert = app.add_subcommand("convert-csv", "Convert between CSV and FMX1");
  std::string conv_in, conv_out, conv_kind = "embedding", conv_source;
  convert->add_option("input", conv_in, "Input .csv or .fmx")->required();
  convert->add_option("-o,--output", conv_out, "Output path")->required();
  convert->add_option("--kind", conv_kind, "Matrix kind for csv inputs");
  convert->add_option("--source-id", conv_source, "Source id for csv inputs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (stft->parsed())
      return cmd_stft(g, stft_in, stft_out, stft_window, stft_hop, stft_no_center, stft_log);
    if (segment->parsed())
      return cmd_segment(g, seg_in, seg_out, seg_len_ms, seg_len_frames, seg_overlap,
                         seg_window, seg_hop);
    if (reduce->parsed())
      return cmd_reduce(g, reduce_in, reduce_method, reduce_chunks, reduce_components,
                        reduce_epsilon, reduce_out);
    if (train->parsed()) return cmd_train(g, train_manifest, train_config, train_out);
    if (evaluate->parsed())
      return cmd_evaluate(g, eval_manifest, eval_config, eval_model, eval_out);
    if (experiment->parsed())
      return cmd_experiment(g, exp_manifest, exp_config, exp_features, exp_json, exp_csv);
    if (sweep->parsed())
      return cmd_sweep(g, sweep_manifest, sweep_config, sweep_chunks, sweep_components,
                       sweep_csv);
    if (rank->parsed())
      return cmd_rank_features(g, rank_manifest, rank_config, rank_repeats, rank_out);
    if (select->parsed())
      return cmd_select_top(g, select_ranking, select_percent, select_out);
    if (synth_cmd->parsed()) return cmd_synth(g, synth_cfg_path, synth_out);
    if (convert->parsed())
      return cmd_convert_csv(g, conv_in, conv_out, conv_kind, conv_source);
    std::cerr << "usage error: no subcommand\n";
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace mvcca::cli
