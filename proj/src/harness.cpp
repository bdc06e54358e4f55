#include "mvcca/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "mvcca/common.hpp"
#include "mvcca/decomp.hpp"
#include "mvcca/rng.hpp"
#include "mvcca/segmentation.hpp"

namespace mvcca::harness {
namespace {

std::map<std::string, int> speaker_label_map(const std::vector<std::string>& speakers,
                                             const std::vector<int>& labels) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    auto [it, inserted] = out.insert({speakers[i], labels[i]});
    if (!inserted && it->second != labels[i])
      throw ValidationError("speaker " + speakers[i] + " appears with both labels");
  }
  return out;
}

std::map<std::string, int> speaker_label_map(const io::Manifest& manifest) {
  std::vector<std::string> speakers;
  std::vector<int> labels;
  for (const auto& e : manifest.entries) {
    speakers.push_back(e.speaker_id);
    labels.push_back(static_cast<int>(e.label));
  }
  return speaker_label_map(speakers, labels);
}

struct ClassifierCandidate {
  classify::PredictFn predict;
  std::string description;
};

// Rows of the table whose speaker belongs to the given set, original order.
classify::SampleTable subset_by_speakers(const classify::SampleTable& table,
                                         const std::set<std::string>& speakers) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (speakers.count(table.speaker_ids[i])) rows.push_back(i);
  classify::SampleTable out;
  out.feature_names = table.feature_names;
  out.features = Matrix(rows.size(), table.dim());
  out.labels.reserve(rows.size());
  out.speaker_ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = table.features.row(rows[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels.push_back(table.labels[rows[r]]);
    out.speaker_ids.push_back(table.speaker_ids[rows[r]]);
  }
  return out;
}

double evaluate_speaker_accuracy(const classify::PredictFn& predict,
                                 const classify::SampleTable& table,
                                 const std::map<std::string, int>& labels) {
  const std::vector<double> probs = predict(table.features);
  std::vector<std::pair<std::string, double>> segment_probs;
  segment_probs.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    segment_probs.emplace_back(table.speaker_ids[i], probs[i]);
  std::map<std::string, int> present;
  for (const auto& id : table.speaker_ids) present.insert({id, labels.at(id)});
  return speaker_accuracy(segment_probs, present);
}

struct TrainedCell {
  classify::PredictFn predict;
  double val_accuracy = 0.0;
  std::string grid_entry;
};

// Trains the configured classifier for one fold x seed cell, selecting the
// grid entry by validation speaker accuracy (first entry wins ties).
TrainedCell train_cell(const classify::SampleTable& train,
                       const classify::SampleTable& val,
                       const std::map<std::string, int>& labels,
                       const PipelineConfig& cfg, std::uint64_t seed) {
  TrainedCell best;
  bool have_best = false;
  if (cfg.classifier == ClassifierKind::logreg) {
    auto model = std::make_shared<classify::LogRegModel>(
        classify::train_logreg(train, cfg.logreg_l2, seed));
    best.predict = [model](const Matrix& rows) { return classify::predict_proba(*model, rows); };
    best.val_accuracy = evaluate_speaker_accuracy(best.predict, val, labels);
    best.grid_entry = "logreg";
    return best;
  }
  for (std::size_t layers : cfg.mlp_layers_grid) {
    for (std::size_t units : cfg.mlp_units_grid) {
      classify::MlpConfig mlp_cfg;
      mlp_cfg.hidden_layers = layers;
      mlp_cfg.units = units;
      mlp_cfg.max_iterations = cfg.mlp_max_iterations;
      auto model = std::make_shared<classify::MlpModel>(
          classify::train_mlp(train, mlp_cfg, seed, &val));
      classify::PredictFn predict = [model](const Matrix& rows) {
        return classify::predict_proba(*model, rows);
      };
      const double acc = evaluate_speaker_accuracy(predict, val, labels);
      if (!have_best || acc > best.val_accuracy) {
        best.predict = std::move(predict);
        best.val_accuracy = acc;
        best.grid_entry = "mlp_h" + std::to_string(layers) + "x" + std::to_string(units);
        have_best = true;
      }
    }
  }
  return best;
}

std::string reduction_name(Reduction r) {
  switch (r) {
    case Reduction::mcca: return "mcca";
    case Reduction::pca: return "pca";
    default: return "none";
  }
}

std::string representation_name(Representation r) {
  switch (r) {
    case Representation::segments: return "segments";
    case Representation::utterance_frames: return "utterance";
    default: return "wav";
  }
}

std::string config_descriptor(const PipelineConfig& cfg) {
  std::ostringstream out;
  out << representation_name(cfg.representation) << '+'
      << reduction_name(cfg.reduction);
  if (cfg.reduction == Reduction::mcca) out << "_M" << cfg.chunks;
  if (cfg.reduction != Reduction::none) out << "_t" << cfg.components;
  out << '+' << (cfg.classifier == ClassifierKind::logreg ? "logreg" : "mlp");
  if (!cfg.feature_subset.empty()) out << "+top" << cfg.feature_subset.size();
  return out.str();
}

void append_double(std::ostringstream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

struct CellOutcome {
  double test_accuracy = 0.0;
  std::vector<double> importance;  // filled by rank_features only
};

// Runs every fold x seed cell (optionally collecting permutation importance)
// and slots results by index, so any thread count yields identical output.
std::vector<std::vector<CellOutcome>> run_cells(const classify::SampleTable& table,
                                                const std::map<std::string, int>& labels,
                                                const FoldPlan& plan,
                                                const PipelineConfig& cfg,
                                                bool with_importance,
                                                std::size_t importance_repeats) {
  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<std::vector<CellOutcome>> outcome(plan.folds.size(),
                                                std::vector<CellOutcome>(n_seeds));
  const std::size_t cells = plan.folds.size() * n_seeds;
  parallel_for(cells, cfg.threads, [&](std::size_t cell) {
    const std::size_t fold_idx = cell / n_seeds;
    const std::size_t seed_idx = cell % n_seeds;
    const std::uint64_t seed = cfg.seeds[seed_idx];
    const FoldPlan::Fold& fold = plan.folds[fold_idx];
    const std::string context = "fold " + std::to_string(fold_idx) + " seed " +
                                std::to_string(seed) + ": ";
    try {
      const std::set<std::string> train_set(fold.train.begin(), fold.train.end());
      const std::set<std::string> val_set(fold.val.begin(), fold.val.end());
      const std::set<std::string> test_set(fold.test.begin(), fold.test.end());
      for (const auto& s : train_set)
        if (val_set.count(s) || test_set.count(s))
          throw ValidationError("speaker " + s + " leaks across fold splits");
      for (const auto& s : val_set)
        if (test_set.count(s))
          throw ValidationError("speaker " + s + " leaks across fold splits");

      const classify::SampleTable train = subset_by_speakers(table, train_set);
      const classify::SampleTable val = subset_by_speakers(table, val_set);
      const classify::SampleTable test = subset_by_speakers(table, test_set);

      TrainedCell trained = train_cell(train, val, labels, cfg, seed);
      CellOutcome& slot = outcome[fold_idx][seed_idx];
      slot.test_accuracy = evaluate_speaker_accuracy(trained.predict, test, labels);
      if (with_importance) {
        const std::uint64_t imp_seed = SplitRng(cfg.fold_seed)
                                           .substream("importance")
                                           .substream(fold_idx)
                                           .substream(seed_idx)
                                           .next_u64();
        slot.importance = classify::permutation_importance(trained.predict, train,
                                                           importance_repeats, imp_seed)
                              .scores;
      }
    } catch (const ArgumentError& e) {
      throw ArgumentError(context + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(context + e.what());
    } catch (const NumericError& e) {
      throw NumericError(context + e.what());
    } catch (const Error& e) {
      throw Error(context + e.what());
    }
  });
  return outcome;
}

}  // namespace

FoldPlan stratified_folds(const io::Manifest& manifest, std::size_t n_folds,
                          std::uint64_t seed) {
  if (n_folds < 2) throw ArgumentError("stratified_folds: need at least 2 folds");
  const std::map<std::string, int> labels = speaker_label_map(manifest);

  std::vector<std::string> by_class[2];
  for (const auto& [speaker, label] : labels)
    by_class[label].push_back(speaker);  // map iteration: already sorted
  for (int c = 0; c < 2; ++c)
    if (by_class[c].size() < n_folds)
      throw ArgumentError("stratified_folds: class " +
                          io::label_name(static_cast<io::Label>(c)) + " has " +
                          std::to_string(by_class[c].size()) + " speakers, need >= " +
                          std::to_string(n_folds));

  // Shuffle each class independently, then deal round-robin into test groups.
  std::vector<std::vector<std::string>> groups(n_folds);
  for (int c = 0; c < 2; ++c) {
    SplitRng rng = SplitRng(seed).substream("folds").substream(static_cast<std::uint64_t>(c));
    rng.shuffle(by_class[c]);
    for (std::size_t i = 0; i < by_class[c].size(); ++i)
      groups[i % n_folds].push_back(by_class[c][i]);
  }

  FoldPlan plan;
  plan.seed = seed;
  plan.folds.resize(n_folds);
  for (std::size_t i = 0; i < n_folds; ++i) {
    FoldPlan::Fold& fold = plan.folds[i];
    fold.test = groups[i];
    fold.val = groups[(i + 1) % n_folds];
    for (std::size_t g = 0; g < n_folds; ++g) {
      if (g == i || g == (i + 1) % n_folds) continue;
      fold.train.insert(fold.train.end(), groups[g].begin(), groups[g].end());
    }
  }
  return plan;
}

double speaker_accuracy(const std::vector<std::pair<std::string, double>>& segment_probs,
                        const std::map<std::string, int>& speaker_labels) {
  if (speaker_labels.empty()) throw ArgumentError("speaker_accuracy: no speakers");
  std::map<std::string, std::vector<double>> grouped;
  for (const auto& [speaker, prob] : segment_probs) {
    if (!speaker_labels.count(speaker))
      throw ArgumentError("speaker_accuracy: probability for unknown speaker " + speaker);
    grouped[speaker].push_back(prob);
  }
  std::size_t correct = 0;
  for (const auto& [speaker, label] : speaker_labels) {
    auto it = grouped.find(speaker);
    if (it == grouped.end() || it->second.empty())
      throw ArgumentError("speaker_accuracy: speaker " + speaker + " has no segments");
    std::vector<double>& probs = it->second;
    std::sort(probs.begin(), probs.end());
    double sum = 0.0;
    for (double p : probs) sum += p;
    const double mean = sum / static_cast<double>(probs.size());
    const int decision = mean >= 0.5 ? 1 : 0;
    if (decision == label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(speaker_labels.size());
}

LoadedSegments load_segments(const io::Manifest& manifest, const PipelineConfig& cfg) {
  LoadedSegments out;
  for (const auto& entry : manifest.entries) {
    std::vector<FeatureMatrix> segments;
    switch (cfg.representation) {
      case Representation::segments: {
        segments.push_back(io::read_fmx(entry.path));
        break;
      }
      case Representation::utterance_frames: {
        if (cfg.segment_frames == 0)
          throw ArgumentError("utterance representation requires segment_frames > 0");
        seg::SegmentSpec spec{cfg.segment_frames, cfg.overlap_fraction};
        segments = seg::segment_utterance(io::read_fmx(entry.path), spec);
        break;
      }
      case Representation::wav: {
        const io::AudioClip clip = io::read_wav(entry.path);
        if (clip.sample_rate != 16000 && cfg.stft.window_len == 512 && cfg.stft.hop == 64)
          warn("clip " + entry.path + " has sample rate " +
               std::to_string(clip.sample_rate) +
               "; analysis defaults assume 16 kHz");
        seg::SegmentSpec spec{cfg.segment_samples, cfg.overlap_fraction};
        for (const io::AudioClip& piece : seg::segment_utterance(clip, spec))
          segments.push_back(dsp::stft(piece, cfg.stft));
        break;
      }
    }
    for (FeatureMatrix& m : segments) {
      if (m.source_id.empty()) m.source_id = entry.path;
      out.segments.push_back(std::move(m));
      out.speakers.push_back(entry.speaker_id);
      out.labels.push_back(static_cast<int>(entry.label));
    }
  }
  if (out.segments.empty())
    throw ValidationError("no segments produced from the manifest");
  return out;
}

classify::SampleTable reduce_to_table(const LoadedSegments& data,
                                      const PipelineConfig& cfg) {
  const std::size_t n = data.segments.size();
  std::vector<FeatureMatrix> reduced(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    switch (cfg.reduction) {
      case Reduction::mcca:
        reduced[i] = decomp::mcca_reduce(data.segments[i], cfg.chunks, cfg.components,
                                         cfg.epsilon);
        break;
      case Reduction::pca:
        reduced[i] = decomp::pca_reduce(data.segments[i], cfg.components);
        break;
      case Reduction::none:
        reduced[i] = data.segments[i];
        break;
    }
  });

  const std::size_t rows = reduced.front().rows();
  const std::size_t cols = reduced.front().cols();
  for (const FeatureMatrix& m : reduced)
    if (m.rows() != rows || m.cols() != cols)
      throw ValidationError("segments reduce to inconsistent shapes; "
                            "the table needs one fixed feature width");

  classify::SampleTable table;
  table.features = Matrix(n, rows * cols);
  table.labels = data.labels;
  table.speaker_ids = data.speakers;
  table.feature_names = classify::make_feature_names(rows, cols);
  for (std::size_t i = 0; i < n; ++i) {
    // Row-major flattening: feature index = f * components + c.
    const auto& flat = reduced[i].values.data();
    std::copy(flat.begin(), flat.end(), table.features.row(i).begin());
  }

  if (!cfg.feature_subset.empty()) {
    classify::FeatureRanking pseudo;
    pseudo.order = cfg.feature_subset;
    for (std::size_t j : cfg.feature_subset)
      if (j >= table.dim())
        throw ArgumentError("feature subset index " + std::to_string(j) +
                            " out of range for width " + std::to_string(table.dim()));
    classify::SampleTable picked;
    picked.labels = table.labels;
    picked.speaker_ids = table.speaker_ids;
    picked.features = Matrix(n, cfg.feature_subset.size());
    for (std::size_t j = 0; j < cfg.feature_subset.size(); ++j) {
      picked.feature_names.push_back(table.feature_names[cfg.feature_subset[j]]);
      for (std::size_t i = 0; i < n; ++i)
        picked.features(i, j) = table.features(i, cfg.feature_subset[j]);
    }
    return picked;
  }
  return table;
}

ExperimentReport run_experiment(const LoadedSegments& data, const PipelineConfig& cfg) {
  const classify::SampleTable table = reduce_to_table(data, cfg);
  const std::map<std::string, int> labels = speaker_label_map(data.speakers, data.labels);

  io::Manifest pseudo_manifest;
  for (const auto& [speaker, label] : labels)
    pseudo_manifest.entries.push_back({speaker, static_cast<io::Label>(label), ""});
  const FoldPlan plan = stratified_folds(pseudo_manifest, cfg.n_folds, cfg.fold_seed);

  const auto outcome = run_cells(table, labels, plan, cfg, false, 0);

  ExperimentReport report;
  report.per_fold_per_seed.resize(plan.folds.size());
  double sum = 0.0;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
      report.per_fold_per_seed[f].push_back(outcome[f][s].test_accuracy);
      sum += outcome[f][s].test_accuracy;
    }
  }
  const double count = static_cast<double>(plan.folds.size() * cfg.seeds.size());
  report.mean = sum / count;
  double sq = 0.0;
  for (const auto& row : report.per_fold_per_seed)
    for (double v : row) sq += (v - report.mean) * (v - report.mean);
  report.stddev = std::sqrt(sq / count);

  report.config_echo = config_to_json(cfg);
  report.config_echo["derived"] = {
      {"descriptor", config_descriptor(cfg)},
      {"segment_count", table.size()},
      {"speaker_count", labels.size()},
      {"feature_dim", table.dim()},
  };
  return report;
}

ExperimentReport run_experiment(const io::Manifest& manifest, const PipelineConfig& cfg) {
  return run_experiment(load_segments(manifest, cfg), cfg);
}

std::vector<SweepCell> sweep_chunks(const io::Manifest& manifest,
                                    const std::vector<std::size_t>& m_values,
                                    const std::vector<std::size_t>& t_values,
                                    const PipelineConfig& base) {
  if (m_values.empty() || t_values.empty())
    throw ArgumentError("sweep_chunks: m and t value lists must be non-empty");
  const LoadedSegments data = load_segments(manifest, base);
  std::vector<SweepCell> cells;
  for (std::size_t m : m_values) {
    for (std::size_t t : t_values) {
      PipelineConfig cfg = base;
      cfg.reduction = Reduction::mcca;
      cfg.chunks = m;
      cfg.components = t;
      SweepCell cell;
      cell.m = m;
      cell.t = t;
      cell.report = run_experiment(data, cfg);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

classify::FeatureRanking rank_features(const LoadedSegments& data,
                                       const PipelineConfig& cfg,
                                       std::size_t repeats) {
  const classify::SampleTable table = reduce_to_table(data, cfg);
  const std::map<std::string, int> labels = speaker_label_map(data.speakers, data.labels);
  io::Manifest pseudo_manifest;
  for (const auto& [speaker, label] : labels)
    pseudo_manifest.entries.push_back({speaker, static_cast<io::Label>(label), ""});
  const FoldPlan plan = stratified_folds(pseudo_manifest, cfg.n_folds, cfg.fold_seed);

  const auto outcome = run_cells(table, labels, plan, cfg, true, repeats);

  classify::FeatureRanking ranking;
  ranking.scores.assign(table.dim(), 0.0);
  std::size_t cells = 0;
  for (const auto& fold_row : outcome) {
    for (const auto& cell : fold_row) {
      for (std::size_t j = 0; j < table.dim(); ++j) ranking.scores[j] += cell.importance[j];
      ++cells;
    }
  }
  for (double& v : ranking.scores) v /= static_cast<double>(cells);
  ranking.order.resize(table.dim());
  std::iota(ranking.order.begin(), ranking.order.end(), 0);
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return ranking.scores[a] > ranking.scores[b];
                   });
  return ranking;
}

classify::FeatureRanking rank_features(const io::Manifest& manifest,
                                       const PipelineConfig& cfg, std::size_t repeats) {
  return rank_features(load_segments(manifest, cfg), cfg, repeats);
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  try {
    if (j.contains("representation")) {
      const std::string rep = j.at("representation").get<std::string>();
      if (rep == "segments") cfg.representation = Representation::segments;
      else if (rep == "utterance") cfg.representation = Representation::utterance_frames;
      else if (rep == "wav") cfg.representation = Representation::wav;
      else throw FormatError("config: unknown representation \"" + rep + "\"");
    }
    if (j.contains("segment")) {
      const auto& s = j.at("segment");
      if (s.contains("len_samples")) cfg.segment_samples = s.at("len_samples").get<std::size_t>();
      if (s.contains("len_frames")) cfg.segment_frames = s.at("len_frames").get<std::size_t>();
      if (s.contains("overlap")) cfg.overlap_fraction = s.at("overlap").get<double>();
    }
    if (j.contains("stft")) {
      const auto& s = j.at("stft");
      if (s.contains("window")) cfg.stft.window_len = s.at("window").get<std::size_t>();
      if (s.contains("hop")) cfg.stft.hop = s.at("hop").get<std::size_t>();
      if (s.contains("center")) cfg.stft.center_pad = s.at("center").get<bool>();
    }
    if (j.contains("reduction")) {
      const auto& r = j.at("reduction");
      if (r.contains("method")) {
        const std::string method = r.at("method").get<std::string>();
        if (method == "mcca") cfg.reduction = Reduction::mcca;
        else if (method == "pca") cfg.reduction = Reduction::pca;
        else if (method == "none") cfg.reduction = Reduction::none;
        else throw FormatError("config: unknown reduction \"" + method + "\"");
      }
      if (r.contains("chunks")) cfg.chunks = r.at("chunks").get<std::size_t>();
      if (r.contains("components")) cfg.components = r.at("components").get<std::size_t>();
      if (r.contains("epsilon")) cfg.epsilon = r.at("epsilon").get<double>();
    }
    if (j.contains("classifier")) {
      const auto& c = j.at("classifier");
      if (c.contains("kind")) {
        const std::string kind = c.at("kind").get<std::string>();
        if (kind == "logreg") cfg.classifier = ClassifierKind::logreg;
        else if (kind == "mlp") cfg.classifier = ClassifierKind::mlp;
        else throw FormatError("config: unknown classifier \"" + kind + "\"");
      }
      if (c.contains("l2")) cfg.logreg_l2 = c.at("l2").get<double>();
      if (c.contains("mlp")) {
        const auto& m = c.at("mlp");
        if (m.contains("layers")) cfg.mlp_layers_grid = m.at("layers").get<std::vector<std::size_t>>();
        if (m.contains("units")) cfg.mlp_units_grid = m.at("units").get<std::vector<std::size_t>>();
        if (m.contains("max_iterations"))
          cfg.mlp_max_iterations = m.at("max_iterations").get<std::size_t>();
      }
    }
    if (j.contains("folds")) cfg.n_folds = j.at("folds").get<std::size_t>();
    if (j.contains("fold_seed")) cfg.fold_seed = j.at("fold_seed").get<std::uint64_t>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("feature_subset"))
      cfg.feature_subset = j.at("feature_subset").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return cfg;
}

nlohmann::ordered_json config_to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["representation"] = representation_name(cfg.representation);
  j["segment"] = {{"len_samples", cfg.segment_samples},
                  {"len_frames", cfg.segment_frames},
                  {"overlap", cfg.overlap_fraction}};
  j["stft"] = {{"window", cfg.stft.window_len},
               {"hop", cfg.stft.hop},
               {"center", cfg.stft.center_pad}};
  j["reduction"] = {{"method", reduction_name(cfg.reduction)},
                    {"chunks", cfg.chunks},
                    {"components", cfg.components},
                    {"epsilon", cfg.epsilon}};
  nlohmann::ordered_json classifier;
  classifier["kind"] = cfg.classifier == ClassifierKind::logreg ? "logreg" : "mlp";
  classifier["l2"] = cfg.logreg_l2;
  classifier["mlp"] = {{"layers", cfg.mlp_layers_grid},
                       {"units", cfg.mlp_units_grid},
                       {"max_iterations", cfg.mlp_max_iterations}};
  j["classifier"] = classifier;
  j["folds"] = cfg.n_folds;
  j["fold_seed"] = cfg.fold_seed;
  j["seeds"] = cfg.seeds;
  if (!cfg.feature_subset.empty()) j["feature_subset"] = cfg.feature_subset;
  return j;
}

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["config"] = report.config_echo;
  j["std_definition"] = "population";
  j["per_fold_per_seed"] = report.per_fold_per_seed;
  j["mean"] = report.mean;
  j["std"] = report.stddev;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "config,mean,std\n";
  std::string descriptor = "experiment";
  if (report.config_echo.contains("derived") &&
      report.config_echo["derived"].contains("descriptor"))
    descriptor = report.config_echo["derived"]["descriptor"].get<std::string>();
  out << descriptor << ',';
  append_double(out, report.mean);
  out << ',';
  append_double(out, report.stddev);
  out << '\n';
  return out.str();
}

std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream out;
  out << "M,t,mean,std\n";
  for (const auto& cell : cells) {
    out << cell.m << ',' << cell.t << ',';
    append_double(out, cell.report.mean);
    out << ',';
    append_double(out, cell.report.stddev);
    out << '\n';
  }
  return out.str();
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t worker_count = threads == 0
                                 ? std::max<std::size_t>(1, std::thread::hardware_concurrency())
                                 : threads;
  worker_count = std::min(worker_count, n);
  if (worker_count <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (std::size_t w = 0; w < worker_count; ++w) {
    workers.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mvcca::harness
