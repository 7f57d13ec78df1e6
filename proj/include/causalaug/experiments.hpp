#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "causalaug/datasets.hpp"
#include "causalaug/digits.hpp"
#include "causalaug/sda.hpp"

namespace causalaug::experiments {

struct ResultRow {
  std::string experiment;
  std::string condition;
  std::string metric;
  double mean = 0.0;
  double standard_error = 0.0;
  int repetitions = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  /// First row matching (condition, metric); throws if absent.
  const ResultRow& find(const std::string& condition, const std::string& metric) const;
};

std::string to_csv(const ResultTable& table);

struct ExperimentConfig {
  std::uint64_t master_seed = 7;
  int repetitions = 0;  // 0 = experiment default (50 synthetic, 5 image end tasks)
  std::string mnist_dir;  // empty = rendered digit corpus
  std::string out_dir = "out";
  bool fast = false;  // 14x14 average-pooled images
  unsigned workers = 0;

  // synthetic regression task
  int synthetic_dim = 5;
  double sigma_c = 1.0;
  double sigma = 0.1;
  int synthetic_train_n = 1000;
  int synthetic_test_n = 1000;
  bool resample_scm = true;  // fresh weight matrices per repetition

  // rendered corpus size (used when mnist_dir is empty)
  int corpus_train_n = 12000;
  int corpus_test_n = 2000;

  // classifier protocol
  int hidden = 0;  // 0 = auto: 256 full-resolution, 64 fast
  int epochs = 30;
  double learning_rate = 0.1;
  int batch_size = 64;
  int sda_seeds = 5;
  double split_fraction = 0.8;

  datasets::ColoredMnistParams colored;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
int effective_hidden(const ExperimentConfig& config);

struct ExperimentResult {
  ResultTable table;
  nlohmann::json provenance;
};

/// Writes <stem>.csv and <stem>.json under config.out_dir (atomic writes).
void write_outputs(const ExperimentResult& result, const std::string& out_dir,
                   const std::string& stem);

// ---------------------------------------------------------------------------
// Data access: real IDX files from mnist_dir when given, otherwise the
// deterministic rendered corpus.
// ---------------------------------------------------------------------------
struct MnistArrays {
  datasets::IdxArray train_images, train_labels, test_images, test_labels;
};
MnistArrays load_mnist_data(const ExperimentConfig& config);

datasets::RotatedMnist build_rotated(const ExperimentConfig& config);
datasets::ColoredMnist build_colored(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

/// Synthetic regression sweep: per repetition a fresh linear-Gaussian
/// process, observational training data, interventional (d randomized) test
/// data; conditions are ERM on all features, ERM on the h_y block only, and
/// uniform-noise augmentation on k_d of the h_d dims crossed with k_y of the
/// h_y dims. Reports test MSE mean +- standard error per condition.
ExperimentResult run_synthetic(const ExperimentConfig& config);

/// Domain-classifier selection on the rotated-digit domains, one pass per
/// held-out angle. Rows carry per-candidate domain accuracy and selection
/// flags.
ExperimentResult run_rotated_sda(const ExperimentConfig& config,
                                 std::vector<sda::SdaResult>* results_out = nullptr);

/// Selection on the two colored-digit training domains.
ExperimentResult run_colored_sda(const ExperimentConfig& config,
                                 sda::SdaResult* result_out = nullptr);

/// Domain accuracy of the rotation augmentation across widening angle
/// ranges (training domains 30/60/90, held-out 0).
ExperimentResult run_sweep_rotation(const ExperimentConfig& config,
                                    std::vector<sda::SweepEntry>* entries_out = nullptr);

/// Full rotated pipeline: selection per held-out angle, then end-task
/// classifiers (selected augmentations vs plain ERM) evaluated on the
/// held-out rotation.
ExperimentResult run_rotated_mnist(const ExperimentConfig& config);

/// Colored end task: plain ERM, hue augmentation, and the SDA-selected set
/// (train and test accuracy each). Pass a precomputed selection to skip the
/// internal SDA run.
ExperimentResult run_colored_mnist(const ExperimentConfig& config,
                                   const sda::SdaResult* colored_sda = nullptr);

/// Joint application of all ten augmentations vs the selected configuration,
/// on both image tasks. Selected sets default to rotation (rotated task) and
/// hue (colored task) when not supplied.
ExperimentResult run_ablation_all_da(
    const ExperimentConfig& config,
    const std::vector<aug::AugmentationSpec>* rotated_selected = nullptr,
    const std::vector<aug::AugmentationSpec>* colored_selected = nullptr);

// End-task trainer shared by the experiments: class-label classifier over
// the given training domains, augmentations applied during training only.
struct EndTaskResult {
  models::Mlp model;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};
EndTaskResult train_end_task(const datasets::DomainDataset& train_domains,
                             const datasets::DomainDataset& test_set,
                             const std::vector<aug::AugmentationSpec>& augmentations,
                             const ExperimentConfig& config, Rng rng);

/// Per-domain 0-1 risks of a trained model over a full domain dataset.
std::vector<double> per_domain_risks(const models::Mlp& model,
                                     const datasets::DomainDataset& data);

}  // namespace causalaug::experiments
