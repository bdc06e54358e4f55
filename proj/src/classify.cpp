#include "mvcca/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mvcca/common.hpp"
#include "mvcca/rng.hpp"

namespace mvcca::classify {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

void check_two_classes(const SampleTable& data) {
  if (data.size() < 2) throw ValidationError("training requires at least two samples");
  const bool has0 = std::find(data.labels.begin(), data.labels.end(), 0) != data.labels.end();
  const bool has1 = std::find(data.labels.begin(), data.labels.end(), 1) != data.labels.end();
  if (!has0 || !has1) throw ValidationError("training requires both classes present");
}

double logits_to_loss(const std::vector<double>& logits, const std::vector<int>& labels) {
  double acc = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i)
    acc += softplus(logits[i]) - static_cast<double>(labels[i]) * logits[i];
  return acc / static_cast<double>(logits.size());
}

std::vector<double> logreg_logits(const std::vector<double>& w, double b,
                                  const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    double z = b;
    for (std::size_t j = 0; j < w.size(); ++j) z += row[j] * w[j];
    out[i] = z;
  }
  return out;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_param_array(std::ostream& out, const std::vector<double>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format17(values[i]);
  }
  out << ']';
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PersistenceError("cannot open for read: " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model file " + path + ": " + e.what());
  }
}

struct MlpWorkspace {
  std::vector<Matrix> pre;   // pre-activation per layer
  std::vector<Matrix> post;  // post-activation per layer (last = probabilities)
};

// Forward pass over a batch (rows of x); returns probabilities.
std::vector<double> mlp_forward(const MlpModel& model, const Matrix& x,
                                MlpWorkspace* ws = nullptr) {
  const std::size_t layers = model.weights.size();
  Matrix a = x;
  if (ws) {
    ws->pre.clear();
    ws->post.clear();
    ws->post.reserve(layers + 1);
    ws->pre.reserve(layers);
    ws->post.push_back(a);
  }
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix z = matmul(a, model.weights[l]);
    for (std::size_t i = 0; i < z.rows(); ++i)
      for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += model.biases[l][j];
    if (l + 1 < layers) {
      a = z;
      for (double& v : a.data()) v = std::max(v, 0.0);
    } else {
      a = z;
      for (double& v : a.data()) v = sigmoid(v);
    }
    if (ws) {
      ws->pre.push_back(std::move(z));
      ws->post.push_back(a);
    }
  }
  std::vector<double> probs(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) probs[i] = a(i, 0);
  return probs;
}

// Backprop of the mean cross-entropy over the batch; gradients appended in
// the flat layout (weights row-major then bias, per layer).
std::vector<double> mlp_backward(const MlpModel& model, const MlpWorkspace& ws,
                                 const std::vector<int>& y) {
  const std::size_t layers = model.weights.size();
  const std::size_t batch = y.size();
  std::vector<Matrix> grad_w(layers);
  std::vector<std::vector<double>> grad_b(layers);

  // d(loss)/d(z_last) = (p - y) / batch for sigmoid + cross-entropy.
  Matrix delta(batch, 1);
  for (std::size_t i = 0; i < batch; ++i)
    delta(i, 0) = (ws.post.back()(i, 0) - static_cast<double>(y[i])) /
                  static_cast<double>(batch);

  for (std::size_t l = layers; l-- > 0;) {
    grad_w[l] = matmul_at_b(ws.post[l], delta);
    grad_b[l].assign(delta.cols(), 0.0);
    for (std::size_t i = 0; i < delta.rows(); ++i)
      for (std::size_t j = 0; j < delta.cols(); ++j) grad_b[l][j] += delta(i, j);
    if (l > 0) {
      Matrix next = matmul_a_bt(delta, model.weights[l]);
      for (std::size_t i = 0; i < next.rows(); ++i)
        for (std::size_t j = 0; j < next.cols(); ++j)
          if (ws.pre[l - 1](i, j) <= 0.0) next(i, j) = 0.0;
      delta = std::move(next);
    }
  }

  std::vector<double> flat;
  for (std::size_t l = 0; l < layers; ++l) {
    flat.insert(flat.end(), grad_w[l].data().begin(), grad_w[l].data().end());
    flat.insert(flat.end(), grad_b[l].begin(), grad_b[l].end());
  }
  return flat;
}

}  // namespace

std::vector<std::string> make_feature_names(std::size_t f_rows, std::size_t components) {
  std::vector<std::string> names;
  names.reserve(f_rows * components);
  for (std::size_t f = 0; f < f_rows; ++f)
    for (std::size_t c = 0; c < components; ++c)
      names.push_back("bin" + std::to_string(f) + ":comp" + std::to_string(c));
  return names;
}

LogRegModel train_logreg(const SampleTable& data, double l2, std::uint64_t seed,
                         std::vector<double>* loss_trace) {
  (void)seed;  // deterministic from the zero initialization
  check_two_classes(data);
  const std::size_t d = data.dim();
  LogRegModel model;
  model.weights.assign(d, 0.0);
  model.bias = 0.0;
  model.l2 = l2;

  constexpr std::size_t kMaxIterations = 10000;
  constexpr double kGradTol = 1e-6;
  constexpr double kArmijo = 1e-4;

  std::vector<double> grad_w(d);
  double grad_b = 0.0;
  double loss = detail::logreg_loss(model.weights, model.bias, data, l2);
  double step = 1.0;

  std::vector<double> trial_w(d);
  for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
    detail::logreg_gradient(model.weights, model.bias, data, l2, grad_w, grad_b);
    double ginf = std::fabs(grad_b);
    double gsq = grad_b * grad_b;
    for (double g : grad_w) {
      ginf = std::max(ginf, std::fabs(g));
      gsq += g * g;
    }
    if (ginf <= kGradTol) break;

    double alpha = std::min(step * 2.0, 1e6);
    bool accepted = false;
    while (alpha > 1e-20) {
      for (std::size_t j = 0; j < d; ++j) trial_w[j] = model.weights[j] - alpha * grad_w[j];
      const double trial_b = model.bias - alpha * grad_b;
      const double trial_loss = detail::logreg_loss(trial_w, trial_b, data, l2);
      if (trial_loss <= loss - kArmijo * alpha * gsq) {
        model.weights.swap(trial_w);
        model.bias = trial_b;
        loss = trial_loss;
        step = alpha;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // step size underflow: at the numerical floor
    if (loss_trace != nullptr) loss_trace->push_back(loss);
  }
  return model;
}

MlpModel train_mlp(const SampleTable& data, const MlpConfig& cfg, std::uint64_t seed,
                   const SampleTable* validation) {
  check_two_classes(data);
  if (cfg.hidden_layers == 0)
    throw ArgumentError("train_mlp: at least one hidden layer required");
  if (cfg.batch_size == 0) throw ArgumentError("train_mlp: batch_size must be positive");

  MlpModel model;
  model.seed = seed;
  model.layer_sizes.push_back(data.dim());
  for (std::size_t l = 0; l < cfg.hidden_layers; ++l) model.layer_sizes.push_back(cfg.units);
  model.layer_sizes.push_back(1);

  SplitRng init_rng = SplitRng(seed).substream("mlp-init");
  for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    const std::size_t fan_in = model.layer_sizes[l];
    const std::size_t fan_out = model.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    SplitRng layer_rng = init_rng.substream(l);
    Matrix w(fan_in, fan_out);
    for (double& v : w.data()) v = layer_rng.next_uniform(-limit, limit);
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(fan_out, 0.0);
  }

  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitRng shuffle_rng = SplitRng(seed).substream("mlp-batches");

  double best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::size_t iter = 0;
  std::vector<double> params = detail::mlp_parameters(model);

  while (iter < cfg.max_iterations) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < n && iter < cfg.max_iterations;
         start += cfg.batch_size) {
      const std::size_t stop = std::min(n, start + cfg.batch_size);
      Matrix bx(stop - start, data.dim());
      std::vector<int> by(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        const auto row = data.features.row(order[i]);
        std::copy(row.begin(), row.end(), bx.row(i - start).begin());
        by[i - start] = data.labels[order[i]];
      }

      double batch_loss = 0.0;
      const std::vector<double> grad = detail::mlp_gradient(model, bx, by, &batch_loss);
      if (!std::isfinite(batch_loss))
        throw NumericError("train_mlp: training diverged (batch loss is not finite)");
      for (std::size_t j = 0; j < params.size(); ++j)
        params[j] -= cfg.learning_rate * grad[j];
      detail::set_mlp_parameters(model, params);
      ++iter;

      if (validation != nullptr) {
        const double val_loss =
            detail::mlp_loss(model, validation->features, validation->labels);
        if (val_loss < best_val_loss) {
          best_val_loss = val_loss;
          since_best = 0;
        } else if (++since_best >= cfg.patience) {
          return model;
        }
      }
    }
  }
  return model;
}

std::vector<double> predict_proba(const LogRegModel& model, const Matrix& rows) {
  if (rows.cols() != model.weights.size())
    throw ArgumentError("predict_proba: feature width does not match the model");
  std::vector<double> out = logreg_logits(model.weights, model.bias, rows);
  for (double& z : out) z = sigmoid(z);
  return out;
}

std::vector<double> predict_proba(const MlpModel& model, const Matrix& rows) {
  if (model.layer_sizes.empty() || rows.cols() != model.layer_sizes.front())
    throw ArgumentError("predict_proba: feature width does not match the model");
  return mlp_forward(model, rows);
}

double accuracy(const std::vector<double>& probs, const std::vector<int>& labels) {
  if (probs.size() != labels.size() || probs.empty())
    throw ArgumentError("accuracy: probabilities and labels must align");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    if ((probs[i] >= 0.5 ? 1 : 0) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(probs.size());
}

FeatureRanking permutation_importance(const PredictFn& predict, const SampleTable& data,
                                      std::size_t repeats, std::uint64_t seed) {
  if (data.size() < 10)
    throw ArgumentError("permutation_importance: need at least 10 samples");
  if (repeats < 1) throw ArgumentError("permutation_importance: repeats must be positive");

  const std::size_t d = data.dim();
  FeatureRanking out;
  out.scores.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const std::vector<double> drops = detail::permutation_drops(predict, data, j, repeats, seed);
    double sum = 0.0;
    for (double v : drops) sum += v;
    out.scores[j] = sum / static_cast<double>(repeats);
  }

  out.order.resize(d);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return out.scores[a] > out.scores[b];
  });
  return out;
}

FeatureRanking permutation_importance(const LogRegModel& model, const SampleTable& data,
                                      std::size_t repeats, std::uint64_t seed) {
  return permutation_importance(
      [&model](const Matrix& rows) { return predict_proba(model, rows); }, data,
      repeats, seed);
}

FeatureRanking permutation_importance(const MlpModel& model, const SampleTable& data,
                                      std::size_t repeats, std::uint64_t seed) {
  return permutation_importance(
      [&model](const Matrix& rows) { return predict_proba(model, rows); }, data,
      repeats, seed);
}

SampleTable select_top_k(const SampleTable& data, const FeatureRanking& ranking,
                         double percent) {
  if (!(percent > 0.0) || percent > 100.0)
    throw ArgumentError("select_top_k: percent must lie in (0, 100]");
  const std::size_t d = data.dim();
  if (ranking.order.size() != d)
    throw ArgumentError("select_top_k: ranking size does not match the table");
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(percent / 100.0 * static_cast<double>(d))));

  SampleTable out;
  out.labels = data.labels;
  out.speaker_ids = data.speaker_ids;
  out.features = Matrix(data.size(), keep);
  out.feature_names.reserve(keep);
  for (std::size_t j = 0; j < keep; ++j) {
    const std::size_t src = ranking.order[j];
    out.feature_names.push_back(data.feature_names.empty() ? "" : data.feature_names[src]);
    for (std::size_t i = 0; i < data.size(); ++i) out.features(i, j) = data.features(i, src);
  }
  return out;
}

void save_logreg(const LogRegModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw PersistenceError("cannot open for write: " + path);
  out << "{\n  \"kind\": \"logreg\",\n  \"l2\": " << format17(model.l2)
      << ",\n  \"bias\": " << format17(model.bias) << ",\n  \"weights\": ";
  write_param_array(out, model.weights);
  out << "\n}\n";
  if (!out) throw PersistenceError("write failed: " + path);
}

LogRegModel load_logreg(const std::string& path) {
  const nlohmann::json j = load_json(path);
  try {
    if (j.at("kind").get<std::string>() != "logreg")
      throw FormatError("model file is not a logreg model: " + path);
    LogRegModel model;
    model.l2 = j.at("l2").get<double>();
    model.bias = j.at("bias").get<double>();
    model.weights = j.at("weights").get<std::vector<double>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model file " + path + ": " + e.what());
  }
}

void save_mlp(const MlpModel& model, const MlpConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw PersistenceError("cannot open for write: " + path);
  out << "{\n  \"kind\": \"mlp\",\n  \"seed\": " << model.seed
      << ",\n  \"max_iterations\": " << cfg.max_iterations
      << ",\n  \"learning_rate\": " << format17(cfg.learning_rate)
      << ",\n  \"batch_size\": " << cfg.batch_size << ",\n  \"layer_sizes\": [";
  for (std::size_t i = 0; i < model.layer_sizes.size(); ++i)
    out << (i ? "," : "") << model.layer_sizes[i];
  out << "],\n  \"layers\": [\n";
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    out << "    {\"weights\": ";
    write_param_array(out, model.weights[l].data());
    out << ", \"biases\": ";
    write_param_array(out, model.biases[l]);
    out << "}" << (l + 1 < model.weights.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  if (!out) throw PersistenceError("write failed: " + path);
}

MlpModel load_mlp(const std::string& path) {
  const nlohmann::json j = load_json(path);
  try {
    if (j.at("kind").get<std::string>() != "mlp")
      throw FormatError("model file is not an mlp model: " + path);
    MlpModel model;
    model.seed = j.at("seed").get<std::uint64_t>();
    model.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    const auto& layers = j.at("layers");
    if (layers.size() + 1 != model.layer_sizes.size())
      throw FormatError("model file " + path + ": layer count mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto flat = layers[l].at("weights").get<std::vector<double>>();
      const std::size_t rows = model.layer_sizes[l];
      const std::size_t cols = model.layer_sizes[l + 1];
      if (flat.size() != rows * cols)
        throw FormatError("model file " + path + ": weight shape mismatch");
      Matrix w(rows, cols);
      w.data() = flat;
      model.weights.push_back(std::move(w));
      model.biases.push_back(layers[l].at("biases").get<std::vector<double>>());
      if (model.biases.back().size() != cols)
        throw FormatError("model file " + path + ": bias shape mismatch");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model file " + path + ": " + e.what());
  }
}

namespace detail {

std::vector<double> permutation_drops(const PredictFn& predict, const SampleTable& data,
                                      std::size_t feature, std::size_t repeats,
                                      std::uint64_t seed) {
  const std::size_t n = data.size();
  const double baseline = accuracy(predict(data.features), data.labels);
  const SplitRng feature_rng =
      SplitRng(seed).substream("permutation-importance").substream(feature);

  Matrix working = data.features;
  std::vector<double> saved(n), shuffled(n);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) saved[i] = working(i, feature);

  std::vector<double> drops(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    SplitRng rng = feature_rng.substream(r);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    for (std::size_t i = 0; i < n; ++i) shuffled[i] = saved[perm[i]];
    working.set_col(feature, shuffled);
    drops[r] = baseline - accuracy(predict(working), data.labels);
  }
  return drops;
}

double logreg_loss(const std::vector<double>& weights, double bias,
                   const SampleTable& data, double l2) {
  const std::vector<double> logits = logreg_logits(weights, bias, data.features);
  double loss = logits_to_loss(logits, data.labels);
  double wsq = 0.0;
  for (double w : weights) wsq += w * w;
  return loss + 0.5 * l2 * wsq;
}

void logreg_gradient(const std::vector<double>& weights, double bias,
                     const SampleTable& data, double l2,
                     std::vector<double>& grad_w, double& grad_b) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  grad_w.assign(d, 0.0);
  grad_b = 0.0;
  const std::vector<double> logits = logreg_logits(weights, bias, data.features);
  for (std::size_t i = 0; i < n; ++i) {
    const double residual = sigmoid(logits[i]) - static_cast<double>(data.labels[i]);
    const auto row = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) grad_w[j] += residual * row[j];
    grad_b += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) grad_w[j] = grad_w[j] * inv_n + l2 * weights[j];
  grad_b *= inv_n;
}

std::vector<double> mlp_parameters(const MlpModel& model) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    flat.insert(flat.end(), model.weights[l].data().begin(), model.weights[l].data().end());
    flat.insert(flat.end(), model.biases[l].begin(), model.biases[l].end());
  }
  return flat;
}

void set_mlp_parameters(MlpModel& model, const std::vector<double>& params) {
  std::size_t pos = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    auto& w = model.weights[l].data();
    std::copy(params.begin() + static_cast<std::ptrdiff_t>(pos),
              params.begin() + static_cast<std::ptrdiff_t>(pos + w.size()), w.begin());
    pos += w.size();
    auto& b = model.biases[l];
    std::copy(params.begin() + static_cast<std::ptrdiff_t>(pos),
              params.begin() + static_cast<std::ptrdiff_t>(pos + b.size()), b.begin());
    pos += b.size();
  }
  if (pos != params.size())
    throw ArgumentError("set_mlp_parameters: parameter count mismatch");
}

double mlp_loss(const MlpModel& model, const Matrix& x, const std::vector<int>& y) {
  MlpWorkspace ws;
  mlp_forward(model, x, &ws);
  // Recover logits from the stored pre-activations for a stable loss.
  const Matrix& z = ws.pre.back();
  std::vector<double> logits(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) logits[i] = z(i, 0);
  return logits_to_loss(logits, y);
}

std::vector<double> mlp_gradient(const MlpModel& model, const Matrix& x,
                                 const std::vector<int>& y, double* loss_out) {
  MlpWorkspace ws;
  mlp_forward(model, x, &ws);
  if (loss_out != nullptr) {
    const Matrix& z = ws.pre.back();
    std::vector<double> logits(z.rows());
    for (std::size_t i = 0; i < z.rows(); ++i) logits[i] = z(i, 0);
    *loss_out = logits_to_loss(logits, y);
  }
  return mlp_backward(model, ws, y);
}

}  // namespace detail

}  // namespace mvcca::classify
