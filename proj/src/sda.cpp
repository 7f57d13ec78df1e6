#include "causalaug/sda.hpp"

#include <algorithm>
#include <cmath>

#include "causalaug/errors.hpp"
#include "causalaug/parallel.hpp"

namespace causalaug::sda {

std::vector<std::size_t> selection_rule(const std::vector<std::pair<double, double>>& stats) {
  if (stats.empty()) throw invalid_dimension_error("selection_rule: empty stats");
  for (const auto& [mean, se] : stats) {
    (void)mean;
    if (se < 0.0) throw invalid_dimension_error("selection_rule: negative standard error");
  }
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < stats.size(); ++i) {
    if (stats[i].first < stats[argmin].first) argmin = i;
  }
  const double cutoff = stats[argmin].first + stats[argmin].second;
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (stats[i].first <= cutoff) selected.push_back(i);
  }
  return selected;
}

namespace {

struct Split {
  models::ImageDataset train;
  models::ImageDataset validation;
};

// Stratified by domain: within each domain the samples are shuffled and the
// first `fraction` become training data.
Split stratified_split(const datasets::DomainDataset& data, double fraction, Rng& rng) {
  Split split;
  split.train.num_classes = data.num_domains;
  split.validation.num_classes = data.num_domains;

  std::vector<std::vector<std::size_t>> by_domain(static_cast<std::size_t>(data.num_domains));
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    by_domain.at(static_cast<std::size_t>(data.samples[i].d)).push_back(i);
  }
  for (auto& indices : by_domain) {
    if (indices.size() < 2) {
      throw insufficient_data_error("every domain needs at least 2 samples");
    }
    rng.shuffle(indices);
    std::size_t n_train = static_cast<std::size_t>(
        std::lround(fraction * static_cast<double>(indices.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, indices.size() - 1);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const auto& s = data.samples[indices[k]];
      auto& dst = k < n_train ? split.train : split.validation;
      dst.images.push_back(s.image);
      dst.labels.push_back(s.d);
    }
  }
  return split;
}

std::vector<int> classifier_layers(const SdaConfig& config, int input_dim, int num_domains) {
  std::vector<int> layers;
  layers.push_back(input_dim);
  layers.insert(layers.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
  layers.push_back(num_domains);
  return layers;
}

// Domain accuracies for an arbitrary candidate grid; shared by run_sda and
// the rotation-range sweep.
std::vector<CandidateStats> candidate_stats(const datasets::DomainDataset& data,
                                            const std::vector<aug::AugmentationSpec>& candidates,
                                            const SdaConfig& config, const Rng& master_rng) {
  if (data.num_domains < 2) {
    throw insufficient_domains_error("augmentation selection needs at least 2 domains");
  }
  if (candidates.empty()) throw config_error("candidate list is empty");
  if (config.seeds < 2) throw config_error("standard error needs at least 2 seeds");
  if (!(config.split_fraction > 0.0 && config.split_fraction < 1.0)) {
    throw config_error("split_fraction must lie in (0, 1)");
  }

  Rng split_rng = master_rng.derive(0, 0x5317);
  const Split split = stratified_split(data, config.split_fraction, split_rng);
  const int input_dim = static_cast<int>(split.train.images.front().pixel_count());
  const auto layers = classifier_layers(config, input_dim, data.num_domains);

  const std::size_t n_candidates = candidates.size();
  const auto seeds = static_cast<std::size_t>(config.seeds);
  std::vector<double> accuracy(n_candidates * seeds, 0.0);

  parallel_for(n_candidates * seeds, config.workers, [&](std::size_t task) {
    const std::size_t cand = task / seeds;
    const std::size_t rep = task % seeds;
    Rng run_rng = master_rng.derive(1, cand, rep);

    models::TrainConfig train_config = config.classifier;
    train_config.augmentations = {candidates[cand]};
    train_config.seed = run_rng.seed();

    models::Mlp model(layers, models::Output::Softmax, run_rng);
    model = models::train_erm(std::move(model), split.train, train_config, run_rng);
    accuracy[task] = models::evaluate(model, split.validation).accuracy;
  });

  std::vector<CandidateStats> stats(n_candidates);
  for (std::size_t c = 0; c < n_candidates; ++c) {
    auto& s = stats[c];
    s.per_seed.assign(accuracy.begin() + static_cast<std::ptrdiff_t>(c * seeds),
                      accuracy.begin() + static_cast<std::ptrdiff_t>((c + 1) * seeds));
    double sum = 0.0;
    for (double a : s.per_seed) sum += a;
    s.mean = sum / static_cast<double>(seeds);
    double var = 0.0;
    for (double a : s.per_seed) var += (a - s.mean) * (a - s.mean);
    var /= static_cast<double>(seeds - 1);
    s.standard_error = std::sqrt(var / static_cast<double>(seeds));
  }
  return stats;
}

}  // namespace

SdaResult run_sda(const datasets::DomainDataset& training_domains, const SdaConfig& config,
                  const Rng& master_rng) {
  for (const auto& c : config.candidates) aug::validate(c);
  SdaResult result;
  result.stats = candidate_stats(training_domains, config.candidates, config, master_rng);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(result.stats.size());
  for (const auto& s : result.stats) pairs.emplace_back(s.mean, s.standard_error);
  result.selected = selection_rule(pairs);
  return result;
}

std::vector<SweepEntry> sweep_rotation_ranges(const datasets::DomainDataset& training_domains,
                                              const std::vector<std::pair<double, double>>& ranges,
                                              const SdaConfig& config, const Rng& master_rng) {
  if (ranges.empty()) throw config_error("sweep needs at least one range");
  std::vector<aug::AugmentationSpec> candidates;
  candidates.reserve(ranges.size());
  for (const auto& [lo, hi] : ranges) candidates.push_back(aug::Rotation{lo, hi});

  const auto stats = candidate_stats(training_domains, candidates, config, master_rng);
  std::vector<SweepEntry> out(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    out[i].range_deg = ranges[i];
    out[i].mean = stats[i].mean;
    out[i].standard_error = stats[i].standard_error;
  }
  return out;
}

}  // namespace causalaug::sda
