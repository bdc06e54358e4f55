#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mvcca/classify.hpp"
#include "mvcca/dsp.hpp"
#include "mvcca/matrix.hpp"
#include "mvcca/matrixio.hpp"

namespace mvcca::harness {

// Speaker-level fold plan: test groups partition the speakers, the validation
// group of fold i is the test group of fold (i+1) mod n, the rest trains.
struct FoldPlan {
  struct Fold {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
  };
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
};

FoldPlan stratified_folds(const io::Manifest& manifest, std::size_t n_folds,
                          std::uint64_t seed);

// Soft voting: per speaker the mean of its segment probabilities, decided
// pathological at mean >= 0.5; returns the fraction of correctly decided
// speakers. Probabilities are summed in sorted order, so segment order never
// changes the result.
double speaker_accuracy(const std::vector<std::pair<std::string, double>>& segment_probs,
                        const std::map<std::string, int>& speaker_labels);

enum class Representation { segments, utterance_frames, wav };
enum class Reduction { mcca, pca, none };
enum class ClassifierKind { logreg, mlp };

struct PipelineConfig {
  Representation representation = Representation::segments;
  std::size_t segment_samples = 8000;  // wav input
  std::size_t segment_frames = 0;      // utterance_frames input
  double overlap_fraction = 0.5;
  dsp::StftConfig stft;

  Reduction reduction = Reduction::mcca;
  std::size_t chunks = 8;      // M
  std::size_t components = 5;  // t
  double epsilon = 1e-4;

  ClassifierKind classifier = ClassifierKind::logreg;
  double logreg_l2 = 1e-2;
  std::vector<std::size_t> mlp_layers_grid = {2, 3, 4};
  std::vector<std::size_t> mlp_units_grid = {64, 128};
  std::size_t mlp_max_iterations = 3000;

  std::size_t n_folds = 10;
  std::uint64_t fold_seed = 0;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};

  // Indices into the flattened feature space, in ranked order; empty keeps
  // all features. Execution-only knobs (threads) never reach the report.
  std::vector<std::size_t> feature_subset;
  std::size_t threads = 1;  // 0 = hardware concurrency
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);

struct ExperimentReport {
  std::vector<std::vector<double>> per_fold_per_seed;  // [fold][seed]
  double mean = 0.0;
  double stddev = 0.0;  // population std over all fold x seed cells
  nlohmann::ordered_json config_echo;
};

// Segments with their speaker attribution, after representation handling but
// before reduction; lets sweeps reuse one load across configurations.
struct LoadedSegments {
  std::vector<FeatureMatrix> segments;
  std::vector<std::string> speakers;
  std::vector<int> labels;
};

LoadedSegments load_segments(const io::Manifest& manifest, const PipelineConfig& cfg);

// Reduce every segment per the config and flatten row-major into a table
// (feature index = f * components + c).
classify::SampleTable reduce_to_table(const LoadedSegments& data,
                                      const PipelineConfig& cfg);

ExperimentReport run_experiment(const LoadedSegments& data, const PipelineConfig& cfg);
ExperimentReport run_experiment(const io::Manifest& manifest, const PipelineConfig& cfg);

struct SweepCell {
  std::size_t m = 0;
  std::size_t t = 0;
  ExperimentReport report;
};

std::vector<SweepCell> sweep_chunks(const io::Manifest& manifest,
                                    const std::vector<std::size_t>& m_values,
                                    const std::vector<std::size_t>& t_values,
                                    const PipelineConfig& base);

// Permutation importance averaged over every fold x seed model, each scored
// on its own training split.
classify::FeatureRanking rank_features(const LoadedSegments& data,
                                       const PipelineConfig& cfg,
                                       std::size_t repeats = 10);
classify::FeatureRanking rank_features(const io::Manifest& manifest,
                                       const PipelineConfig& cfg,
                                       std::size_t repeats = 10);

std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);      // config,mean,std
std::string sweep_to_csv(const std::vector<SweepCell>& cells);  // M,t,mean,std

// Work queue over [0, n); results must be written to caller-owned slots so
// the outcome is independent of scheduling. threads == 0 uses the hardware
// concurrency.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mvcca::harness
