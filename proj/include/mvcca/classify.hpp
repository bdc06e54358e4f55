#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mvcca/matrix.hpp"

namespace mvcca::classify {

// Flattened reduced representations: one row per segment, feature index
// f * components + c for bin f and component c.
struct SampleTable {
  Matrix features;  // n x d
  std::vector<int> labels;  // 0 = neurotypical, 1 = pathological
  std::vector<std::string> speaker_ids;
  std::vector<std::string> feature_names;  // "bin{f}:comp{c}"

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
};

std::vector<std::string> make_feature_names(std::size_t f_rows, std::size_t components);

struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 1e-2;
};

// Full-batch gradient descent with Armijo backtracking on mean cross-entropy
// plus (l2/2)|w|^2, zero initialization, until the gradient infinity norm
// drops to 1e-6 or 10000 iterations. Deterministic; the seed only keeps the
// signature uniform with train_mlp. loss_trace, when given, receives the
// objective after every accepted step.
LogRegModel train_logreg(const SampleTable& data, double l2 = 1e-2,
                         std::uint64_t seed = 0,
                         std::vector<double>* loss_trace = nullptr);

struct MlpConfig {
  std::size_t hidden_layers = 2;  // grid {2, 3, 4}
  std::size_t units = 64;         // grid {64, 128}
  std::size_t max_iterations = 3000;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t patience = 200;  // early-stop window on validation loss
};

struct MlpModel {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., 1
  std::vector<Matrix> weights;           // in_dim x out_dim per layer
  std::vector<std::vector<double>> biases;
  std::uint64_t seed = 0;
};

// Mini-batch gradient descent, ReLU hidden layers and a sigmoid output,
// He-scaled uniform initialization from the seed. When a validation table is
// given, training stops once validation loss has not improved for
// cfg.patience consecutive iterations.
MlpModel train_mlp(const SampleTable& data, const MlpConfig& cfg,
                   std::uint64_t seed, const SampleTable* validation = nullptr);

std::vector<double> predict_proba(const LogRegModel& model, const Matrix& rows);
std::vector<double> predict_proba(const MlpModel& model, const Matrix& rows);

// Fraction of rows whose thresholded probability (>= 0.5 -> pathological)
// matches the label.
double accuracy(const std::vector<double>& probs, const std::vector<int>& labels);

struct FeatureRanking {
  std::vector<double> scores;       // higher = more important
  std::vector<std::size_t> order;   // descending score, ties by ascending index
};

using PredictFn = std::function<std::vector<double>(const Matrix&)>;

// Mean accuracy drop over seeded column shuffles, repeated per feature.
FeatureRanking permutation_importance(const PredictFn& predict, const SampleTable& data,
                                      std::size_t repeats = 10, std::uint64_t seed = 0);
FeatureRanking permutation_importance(const LogRegModel& model, const SampleTable& data,
                                      std::size_t repeats = 10, std::uint64_t seed = 0);
FeatureRanking permutation_importance(const MlpModel& model, const SampleTable& data,
                                      std::size_t repeats = 10, std::uint64_t seed = 0);

// Keeps the first max(1, floor(percent/100 * d)) features of ranking.order.
SampleTable select_top_k(const SampleTable& data, const FeatureRanking& ranking,
                         double percent);

// JSON persistence; parameters are written as decimals with 17 significant
// digits so a reload is bit-exact.
void save_logreg(const LogRegModel& model, const std::string& path);
LogRegModel load_logreg(const std::string& path);
void save_mlp(const MlpModel& model, const MlpConfig& cfg, const std::string& path);
MlpModel load_mlp(const std::string& path);

namespace detail {

// Per-repeat accuracy drops for one feature column; permutation_importance
// averages these.
std::vector<double> permutation_drops(const PredictFn& predict, const SampleTable& data,
                                      std::size_t feature, std::size_t repeats,
                                      std::uint64_t seed);

// Loss/gradient evaluations exposed for finite-difference checks.
double logreg_loss(const std::vector<double>& weights, double bias,
                   const SampleTable& data, double l2);
void logreg_gradient(const std::vector<double>& weights, double bias,
                     const SampleTable& data, double l2,
                     std::vector<double>& grad_w, double& grad_b);

std::vector<double> mlp_parameters(const MlpModel& model);
void set_mlp_parameters(MlpModel& model, const std::vector<double>& params);
double mlp_loss(const MlpModel& model, const Matrix& x, const std::vector<int>& y);
// Gradient of the mean batch cross-entropy in the flat parameter layout.
std::vector<double> mlp_gradient(const MlpModel& model, const Matrix& x,
                                 const std::vector<int>& y, double* loss_out = nullptr);

}  // namespace detail

}  // namespace mvcca::classify
