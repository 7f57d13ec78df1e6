#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "causalaug/augment.hpp"
#include "causalaug/datasets.hpp"
#include "causalaug/models.hpp"
#include "causalaug/rng.hpp"

namespace causalaug::sda {

// Configuration for augmentation selection. For every candidate, a domain
// classifier is trained `seeds` times with that single augmentation applied
// to the training split; candidates are ranked by mean validation domain
// accuracy (lower = more domain information destroyed).
struct SdaConfig {
  std::vector<aug::AugmentationSpec> candidates;
  int seeds = 5;
  double split_fraction = 0.8;        // train share, stratified by domain
  models::TrainConfig classifier;     // template; augmentations replaced per run
  std::vector<int> hidden_sizes = {256};
  unsigned workers = 0;               // 0 = hardware concurrency
};

struct CandidateStats {
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<double> per_seed;
};

struct SdaResult {
  std::vector<CandidateStats> stats;  // parallel to config.candidates
  std::vector<std::size_t> selected;  // indices into config.candidates
};

/// Argmin-mean index plus every j with mean_j <= mean_min + se_min.
std::vector<std::size_t> selection_rule(const std::vector<std::pair<double, double>>& stats);

/// The three-step selection: stratified split, per-candidate/per-seed domain
/// classifier training (validation never augmented), mean +- standard error
/// aggregation and the standard-error tie rule. Run seeds derive from the
/// master rng keyed on (candidate index, repetition index), so runs are
/// independent of candidate-list extensions and execution order.
SdaResult run_sda(const datasets::DomainDataset& training_domains, const SdaConfig& config,
                  const Rng& master_rng);

struct SweepEntry {
  std::pair<double, double> range_deg;
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Step 2 of the selection for a rotation augmentation at each given range.
std::vector<SweepEntry> sweep_rotation_ranges(const datasets::DomainDataset& training_domains,
                                              const std::vector<std::pair<double, double>>& ranges,
                                              const SdaConfig& config, const Rng& master_rng);

}  // namespace causalaug::sda
