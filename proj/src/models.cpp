#include "causalaug/models.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "causalaug/errors.hpp"

namespace causalaug::models {

// ---------------------------------------------------------------------------
// Ordinary least squares
// ---------------------------------------------------------------------------

LinearRegressor ols_fit(const Mat& x, const Vec& t) {
  if (x.rows() != t.size()) throw invalid_dimension_error("ols_fit: row count mismatch");
  if (x.rows() <= x.cols()) throw singular_matrix_error(0.0);

  const Eigen::Index n = x.rows(), p = x.cols();
  Mat xa(n, p + 1);
  xa.leftCols(p) = x;
  xa.col(p).setOnes();

  const Mat gram = xa.transpose() * xa;
  Eigen::PartialPivLU<Mat> lu(gram);
  const double rc = lu.rcond();
  if (!(rc >= 1e-12)) throw singular_matrix_error(rc);

  const Vec w = lu.solve(xa.transpose() * t);
  LinearRegressor model;
  model.weights = w.head(p).transpose();
  model.bias = w(p);
  return model;
}

// ---------------------------------------------------------------------------
// Mlp
// ---------------------------------------------------------------------------

Mlp::Mlp(std::vector<int> layer_sizes, Output output, Rng& rng)
    : sizes_(std::move(layer_sizes)), output_(output) {
  if (sizes_.size() < 2) throw invalid_dimension_error("mlp needs at least input and output sizes");
  for (int s : sizes_) {
    if (s < 1) throw invalid_dimension_error("mlp layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l], fan_out = sizes_[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Mat w(fan_in, fan_out);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
    w_.push_back(std::move(w));
    b_.push_back(Eigen::RowVectorXd::Zero(fan_out));
  }
}

void Mlp::check_input(const Mat& x) const {
  if (x.cols() != sizes_.front()) {
    throw invalid_dimension_error("mlp input has " + std::to_string(x.cols()) +
                                  " columns, expected " + std::to_string(sizes_.front()));
  }
}

namespace {

Mat softmax_rows(const Mat& z) {
  Mat p = z;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double m = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

}  // namespace

Mat Mlp::forward(const Mat& x) const {
  check_input(x);
  Mat a = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    a = (a * w_[l]).rowwise() + b_[l];
    if (l + 1 < w_.size()) a = a.cwiseMax(0.0);
  }
  return output_ == Output::Softmax ? softmax_rows(a) : a;
}

double Mlp::run_backward(const Mat& x, const Mat& dloss_dpre, const std::vector<Mat>& acts,
                         MlpGradients& g) const {
  g.w.resize(w_.size());
  g.b.resize(w_.size());
  Mat delta = dloss_dpre;
  for (std::size_t l = w_.size(); l-- > 0;) {
    const Mat& input = l == 0 ? x : acts[l - 1];
    g.w[l] = input.transpose() * delta;
    g.b[l] = delta.colwise().sum();
    if (l > 0) {
      delta = delta * w_[l].transpose();
      delta = delta.array() * (acts[l - 1].array() > 0.0).cast<double>();
    }
  }
  return 0.0;
}

// Hidden activations for every layer (post-rectifier), final pre-activation
// returned separately.
static void forward_cached(const std::vector<Mat>& w, const std::vector<Eigen::RowVectorXd>& b,
                           const Mat& x, std::vector<Mat>& acts, Mat& final_pre) {
  acts.clear();
  Mat a = x;
  for (std::size_t l = 0; l < w.size(); ++l) {
    Mat z = (a * w[l]).rowwise() + b[l];
    if (l + 1 < w.size()) {
      a = z.cwiseMax(0.0);
      acts.push_back(a);
    } else {
      final_pre = std::move(z);
    }
  }
}

double Mlp::loss(const Mat& x, const std::vector<int>& labels) const {
  if (output_ != Output::Softmax) throw invalid_dimension_error("labels need a softmax output");
  check_input(x);
  const Mat p = forward(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    total += -std::log(std::max(p(i, y), 1e-300));
  }
  return total / static_cast<double>(p.rows());
}

double Mlp::loss(const Mat& x, const Vec& targets) const {
  if (output_ != Output::Regression) throw invalid_dimension_error("targets need regression output");
  check_input(x);
  const Mat out = forward(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double diff = out(i, 0) - targets(i);
    total += diff * diff;
  }
  return total / static_cast<double>(out.rows());
}

double Mlp::loss_and_gradients(const Mat& x, const std::vector<int>& labels,
                               MlpGradients& g) const {
  if (output_ != Output::Softmax) throw invalid_dimension_error("labels need a softmax output");
  check_input(x);
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw invalid_dimension_error("label count mismatch");
  }
  std::vector<Mat> acts;
  Mat logits;
  forward_cached(w_, b_, x, acts, logits);
  const Mat p = softmax_rows(logits);
  const double inv_n = 1.0 / static_cast<double>(x.rows());

  double total = 0.0;
  Mat dpre = p;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= p.cols()) throw invalid_index_error("label out of range");
    total += -std::log(std::max(p(i, y), 1e-300));
    dpre(i, y) -= 1.0;
  }
  dpre *= inv_n;
  run_backward(x, dpre, acts, g);
  return total * inv_n;
}

double Mlp::loss_and_gradients(const Mat& x, const Vec& targets, MlpGradients& g) const {
  if (output_ != Output::Regression) throw invalid_dimension_error("targets need regression output");
  check_input(x);
  if (targets.size() != x.rows()) throw invalid_dimension_error("target count mismatch");
  std::vector<Mat> acts;
  Mat out;
  forward_cached(w_, b_, x, acts, out);
  const double inv_n = 1.0 / static_cast<double>(x.rows());

  Mat dpre = out;
  double total = 0.0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double diff = out(i, 0) - targets(i);
    total += diff * diff;
    dpre(i, 0) = 2.0 * diff * inv_n;
  }
  run_backward(x, dpre, acts, g);
  return total * inv_n;
}

void Mlp::apply_update(const MlpGradients& g, double learning_rate) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    w_[l] -= learning_rate * g.w[l];
    b_[l] -= learning_rate * g.b[l];
  }
}

std::vector<int> Mlp::predict_classes(const Mat& x) const {
  const Mat p = forward(x);
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index best = 0;
    p.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Vec Mlp::predict_values(const Mat& x) const {
  return forward(x).col(0);
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    n += static_cast<std::size_t>(w_[l].size()) + static_cast<std::size_t>(b_[l].size());
  }
  return n;
}

double Mlp::get_parameter(std::size_t i) const {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    const auto wn = static_cast<std::size_t>(w_[l].size());
    if (i < wn) return w_[l].data()[i];
    i -= wn;
    const auto bn = static_cast<std::size_t>(b_[l].size());
    if (i < bn) return b_[l](static_cast<Eigen::Index>(i));
    i -= bn;
  }
  throw invalid_index_error("parameter index out of range");
}

void Mlp::set_parameter(std::size_t i, double v) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    const auto wn = static_cast<std::size_t>(w_[l].size());
    if (i < wn) {
      w_[l].data()[i] = v;
      return;
    }
    i -= wn;
    const auto bn = static_cast<std::size_t>(b_[l].size());
    if (i < bn) {
      b_[l](static_cast<Eigen::Index>(i)) = v;
      return;
    }
    i -= bn;
  }
  throw invalid_index_error("parameter index out of range");
}

nlohmann::json Mlp::to_json() const {
  nlohmann::json j;
  j["layer_sizes"] = sizes_;
  j["output"] = output_ == Output::Softmax ? "softmax" : "regression";
  std::vector<std::vector<double>> weights, biases;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    weights.emplace_back(w_[l].data(), w_[l].data() + w_[l].size());
    biases.emplace_back(b_[l].data(), b_[l].data() + b_[l].size());
  }
  j["weights"] = weights;
  j["biases"] = biases;
  return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  Mlp m;
  m.sizes_ = j.at("layer_sizes").get<std::vector<int>>();
  m.output_ = j.at("output").get<std::string>() == "softmax" ? Output::Softmax : Output::Regression;
  const auto weights = j.at("weights").get<std::vector<std::vector<double>>>();
  const auto biases = j.at("biases").get<std::vector<std::vector<double>>>();
  if (weights.size() + 1 != m.sizes_.size() || biases.size() != weights.size()) {
    throw format_error("mlp json has inconsistent layer data");
  }
  for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
    const int rows = m.sizes_[l], cols = m.sizes_[l + 1];
    if (weights[l].size() != static_cast<std::size_t>(rows) * cols ||
        biases[l].size() != static_cast<std::size_t>(cols)) {
      throw format_error("mlp json parameter array has wrong length");
    }
    Mat w(rows, cols);
    std::copy(weights[l].begin(), weights[l].end(), w.data());
    m.w_.push_back(std::move(w));
    Eigen::RowVectorXd b(cols);
    std::copy(biases[l].begin(), biases[l].end(), b.data());
    m.b_.push_back(std::move(b));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Training loops
// ---------------------------------------------------------------------------

namespace {

Eigen::RowVectorXd augment_and_flatten(const aug::RasterImage& image,
                                       const std::vector<aug::AugmentationSpec>& specs, Rng& rng) {
  if (specs.empty()) return aug::flatten(image);
  aug::RasterImage current = image;
  for (const auto& spec : specs) {
    current = aug::apply_augmentation(spec, current, rng);
  }
  return aug::flatten(current);
}

}  // namespace

Mlp train_erm(Mlp model, const ImageDataset& data, const TrainConfig& config, Rng& rng,
              std::vector<double>* epoch_losses) {
  if (data.images.empty()) throw empty_dataset_error("train_erm: empty dataset");
  if (data.images.size() != data.labels.size()) {
    throw invalid_dimension_error("train_erm: image/label count mismatch");
  }
  if (config.batch_size < 1) throw config_error("batch_size must be >= 1");
  if (config.epochs < 0) throw config_error("epochs must be >= 0");

  const std::size_t n = data.images.size();
  const auto input_dim = static_cast<Eigen::Index>(data.images.front().pixel_count());
  if (input_dim != model.input_size()) {
    throw invalid_dimension_error("train_erm: image size does not match model input");
  }

  MlpGradients grads;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = rng.permutation(n);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t bs = std::min(static_cast<std::size_t>(config.batch_size), n - start);
      Mat batch(static_cast<Eigen::Index>(bs), input_dim);
      std::vector<int> labels(bs);
      for (std::size_t i = 0; i < bs; ++i) {
        const std::size_t idx = order[start + i];
        batch.row(static_cast<Eigen::Index>(i)) =
            augment_and_flatten(data.images[idx], config.augmentations, rng);
        labels[i] = data.labels[idx];
      }
      const double loss = model.loss_and_gradients(batch, labels, grads);
      if (!std::isfinite(loss)) throw divergence_error(epoch);
      model.apply_update(grads, config.learning_rate);
      epoch_loss += loss * static_cast<double>(bs);
      seen += bs;
    }
    if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(seen));
  }
  return model;
}

LinearRegressor train_erm(LinearRegressor model, const Mat& x, const Vec& t,
                          const TrainConfig& config, Rng& rng,
                          std::vector<double>* epoch_losses) {
  if (x.rows() == 0) throw empty_dataset_error("train_erm: empty dataset");
  if (x.rows() != t.size()) throw invalid_dimension_error("train_erm: row count mismatch");
  if (model.weights.size() != x.cols()) {
    throw invalid_dimension_error("train_erm: feature width does not match model");
  }
  if (config.batch_size < 1) throw config_error("batch_size must be >= 1");
  for (const auto& spec : config.augmentations) {
    if (!std::holds_alternative<aug::UniformNoise>(spec)) {
      throw config_error("only uniform noise augmentations apply to vector data");
    }
  }

  const std::size_t n = static_cast<std::size_t>(x.rows());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = rng.permutation(n);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t bs = std::min(static_cast<std::size_t>(config.batch_size), n - start);
      Mat batch(static_cast<Eigen::Index>(bs), x.cols());
      Vec target(static_cast<Eigen::Index>(bs));
      for (std::size_t i = 0; i < bs; ++i) {
        const std::size_t idx = order[start + i];
        Eigen::RowVectorXd row = x.row(static_cast<Eigen::Index>(idx));
        for (const auto& spec : config.augmentations) {
          const auto& noise = std::get<aug::UniformNoise>(spec);
          row = aug::vector_uniform_noise(row, noise.dims, noise.lo, noise.hi, rng);
        }
        batch.row(static_cast<Eigen::Index>(i)) = row;
        target(static_cast<Eigen::Index>(i)) = t(static_cast<Eigen::Index>(idx));
      }
      const Vec pred = model.predict(batch);
      const Vec err = pred - target;
      const double loss = err.squaredNorm() / static_cast<double>(bs);
      if (!std::isfinite(loss)) throw divergence_error(epoch);
      const double scale = 2.0 / static_cast<double>(bs);
      const Eigen::RowVectorXd grad_w = scale * (err.transpose() * batch);
      const double grad_b = scale * err.sum();
      model.weights -= config.learning_rate * grad_w;
      model.bias -= config.learning_rate * grad_b;
      epoch_loss += loss * static_cast<double>(bs);
      seen += bs;
    }
    if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(seen));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EvalMetrics evaluate(const Mlp& model, const ImageDataset& data) {
  if (data.images.empty()) throw empty_dataset_error("evaluate: empty dataset");
  const auto input_dim = static_cast<Eigen::Index>(data.images.front().pixel_count());
  const std::size_t n = data.images.size();
  constexpr std::size_t kChunk = 512;

  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t bs = std::min(kChunk, n - start);
    Mat batch(static_cast<Eigen::Index>(bs), input_dim);
    for (std::size_t i = 0; i < bs; ++i) {
      batch.row(static_cast<Eigen::Index>(i)) = aug::flatten(data.images[start + i]);
    }
    const auto pred = model.predict_classes(batch);
    for (std::size_t i = 0; i < bs; ++i) {
      if (pred[i] == data.labels[start + i]) ++correct;
    }
  }
  EvalMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  m.n = n;
  return m;
}

EvalMetrics evaluate(const Mlp& model, const Mat& x, const std::vector<int>& labels) {
  if (x.rows() == 0) throw empty_dataset_error("evaluate: empty dataset");
  const auto pred = model.predict_classes(x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == labels[i]) ++correct;
  }
  EvalMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  m.n = pred.size();
  return m;
}

EvalMetrics evaluate(const LinearRegressor& model, const Mat& x, const Vec& t) {
  if (x.rows() == 0) throw empty_dataset_error("evaluate: empty dataset");
  const Vec err = model.predict(x) - t;
  EvalMetrics m;
  m.mse = err.squaredNorm() / static_cast<double>(x.rows());
  m.n = static_cast<std::size_t>(x.rows());
  return m;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check
// ---------------------------------------------------------------------------

namespace {

template <class Target>
double gradient_check_impl(const Mlp& model, const Mat& x, const Target& target, double epsilon) {
  if (epsilon <= 0.0) throw config_error("epsilon must be > 0");
  Mlp probe = model;
  MlpGradients analytic;
  probe.loss_and_gradients(x, target, analytic);

  // Flatten analytic grads in the same order as the parameter view.
  std::vector<double> flat;
  for (std::size_t l = 0; l < analytic.w.size(); ++l) {
    flat.insert(flat.end(), analytic.w[l].data(), analytic.w[l].data() + analytic.w[l].size());
    flat.insert(flat.end(), analytic.b[l].data(), analytic.b[l].data() + analytic.b[l].size());
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < probe.parameter_count(); ++i) {
    const double original = probe.get_parameter(i);
    probe.set_parameter(i, original + epsilon);
    const double plus = probe.loss(x, target);
    probe.set_parameter(i, original - epsilon);
    const double minus = probe.loss(x, target);
    probe.set_parameter(i, original);
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double a = flat[i];
    const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace

double gradient_check(const Mlp& model, const Mat& x, const std::vector<int>& labels,
                      double epsilon) {
  return gradient_check_impl(model, x, labels, epsilon);
}

double gradient_check(const Mlp& model, const Mat& x, const Vec& targets, double epsilon) {
  return gradient_check_impl(model, x, targets, epsilon);
}

}  // namespace causalaug::models
