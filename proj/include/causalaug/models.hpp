#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "causalaug/augment.hpp"
#include "causalaug/rng.hpp"

namespace causalaug::models {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct LinearRegressor {
  Eigen::RowVectorXd weights;
  double bias = 0.0;

  double predict(const Eigen::RowVectorXd& x) const { return weights.dot(x) + bias; }
  Vec predict(const Mat& x) const { return (x * weights.transpose()).array() + bias; }
};

/// Least-squares fit (intercept added internally) via the normal equations.
/// Requires n > p and a full-column-rank design; throws singular_matrix_error
/// otherwise.
LinearRegressor ols_fit(const Mat& x, const Vec& t);

enum class Output { Regression, Softmax };

struct MlpGradients {
  std::vector<Mat> w;
  std::vector<Eigen::RowVectorXd> b;
};

// Fully connected net, rectifier hidden units, identity or softmax output.
// Parameters are plain matrices; all gradients are computed manually.
class Mlp {
 public:
  /// layer_sizes = {input, hidden..., output}. Weights start glorot-uniform
  /// (+-sqrt(6/(fan_in+fan_out))), biases zero.
  Mlp(std::vector<int> layer_sizes, Output output, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  Output output_kind() const { return output_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }

  /// Batch forward; rows are samples. Softmax nets return class probabilities.
  Mat forward(const Mat& x) const;

  double loss(const Mat& x, const std::vector<int>& labels) const;
  double loss(const Mat& x, const Vec& targets) const;

  /// Mean loss over the batch plus parameter gradients.
  double loss_and_gradients(const Mat& x, const std::vector<int>& labels, MlpGradients& g) const;
  double loss_and_gradients(const Mat& x, const Vec& targets, MlpGradients& g) const;

  void apply_update(const MlpGradients& g, double learning_rate);

  std::vector<int> predict_classes(const Mat& x) const;
  Vec predict_values(const Mat& x) const;

  // Flat parameter view (weights then bias, layer by layer); used by the
  // finite-difference gradient check and serialization.
  std::size_t parameter_count() const;
  double get_parameter(std::size_t i) const;
  void set_parameter(std::size_t i, double v);

  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

 private:
  Mlp() = default;
  double run_backward(const Mat& x, const Mat& dloss_dout, const std::vector<Mat>& activations,
                      MlpGradients& g) const;
  void check_input(const Mat& x) const;

  std::vector<int> sizes_;
  Output output_ = Output::Regression;
  std::vector<Mat> w_;
  std::vector<Eigen::RowVectorXd> b_;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 30;
  int batch_size = 64;
  std::uint64_t seed = 0;  // provenance; callers build the Rng they pass in from it
  std::vector<aug::AugmentationSpec> augmentations;
};

struct EvalMetrics {
  double mse = 0.0;
  double accuracy = 0.0;
  std::size_t n = 0;
};

struct ImageDataset {
  std::vector<aug::RasterImage> images;
  std::vector<int> labels;
  int num_classes = 0;
};

/// Minibatch SGD over shuffled data. Each augmentation in
/// config.augmentations is applied in list order to every training sample
/// with fresh random parameters per sample per epoch. Never touches
/// held-out data. Optionally records the mean loss of each epoch.
Mlp train_erm(Mlp model, const ImageDataset& data, const TrainConfig& config, Rng& rng,
              std::vector<double>* epoch_losses = nullptr);

/// SGD for the linear model on raw feature rows; only UniformNoise
/// augmentations apply to vector data.
LinearRegressor train_erm(LinearRegressor model, const Mat& x, const Vec& t,
                          const TrainConfig& config, Rng& rng,
                          std::vector<double>* epoch_losses = nullptr);

EvalMetrics evaluate(const Mlp& model, const ImageDataset& data);
EvalMetrics evaluate(const Mlp& model, const Mat& x, const std::vector<int>& labels);
EvalMetrics evaluate(const LinearRegressor& model, const Mat& x, const Vec& t);

/// Max relative error between analytic gradients and central finite
/// differences, over every parameter.
double gradient_check(const Mlp& model, const Mat& x, const std::vector<int>& labels,
                      double epsilon);
double gradient_check(const Mlp& model, const Mat& x, const Vec& targets, double epsilon);

}  // namespace causalaug::models
