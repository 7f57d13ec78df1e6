#include "causalaug/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "causalaug/errors.hpp"
#include "causalaug/io.hpp"
#include "causalaug/parallel.hpp"
#include "causalaug/scm.hpp"

namespace causalaug::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Result tables
// ---------------------------------------------------------------------------

const ResultRow& ResultTable::find(const std::string& condition, const std::string& metric) const {
  for (const auto& row : rows) {
    if (row.condition == condition && row.metric == metric) return row;
  }
  throw invalid_index_error("no result row for " + condition + "/" + metric);
}

std::string to_csv(const ResultTable& table) {
  std::string out = "experiment,condition,metric,mean,standard_error,repetitions\n";
  for (const auto& r : table.rows) {
    out += r.experiment + ',' + r.condition + ',' + r.metric + ',' + io::format_double(r.mean) +
           ',' + io::format_double(r.standard_error) + ',' + std::to_string(r.repetitions) + '\n';
  }
  return out;
}

void write_outputs(const ExperimentResult& result, const std::string& out_dir,
                   const std::string& stem) {
  const fs::path dir(out_dir);
  io::atomic_write_file((dir / (stem + ".csv")).string(), to_csv(result.table));
  io::atomic_write_file((dir / (stem + ".json")).string(), result.provenance.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["master_seed"] = c.master_seed;
  j["repetitions"] = c.repetitions;
  j["mnist_dir"] = c.mnist_dir;
  j["out_dir"] = c.out_dir;
  j["fast"] = c.fast;
  j["workers"] = c.workers;
  j["synthetic"] = {{"dim", c.synthetic_dim},
                    {"sigma_c", c.sigma_c},
                    {"sigma", c.sigma},
                    {"train_n", c.synthetic_train_n},
                    {"test_n", c.synthetic_test_n},
                    {"resample_scm", c.resample_scm}};
  j["corpus"] = {{"train_n", c.corpus_train_n}, {"test_n", c.corpus_test_n}};
  j["classifier"] = {{"hidden", c.hidden},
                     {"epochs", c.epochs},
                     {"learning_rate", c.learning_rate},
                     {"batch_size", c.batch_size},
                     {"sda_seeds", c.sda_seeds},
                     {"split_fraction", c.split_fraction}};
  j["colored"] = {{"label_flip", c.colored.label_flip},
                  {"e_train1", c.colored.e_train1},
                  {"e_train2", c.colored.e_train2},
                  {"e_test", c.colored.e_test}};
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.master_seed = j.value("master_seed", c.master_seed);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.mnist_dir = j.value("mnist_dir", c.mnist_dir);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.fast = j.value("fast", c.fast);
    c.workers = j.value("workers", c.workers);
    if (j.contains("synthetic")) {
      const auto& s = j.at("synthetic");
      c.synthetic_dim = s.value("dim", c.synthetic_dim);
      c.sigma_c = s.value("sigma_c", c.sigma_c);
      c.sigma = s.value("sigma", c.sigma);
      c.synthetic_train_n = s.value("train_n", c.synthetic_train_n);
      c.synthetic_test_n = s.value("test_n", c.synthetic_test_n);
      c.resample_scm = s.value("resample_scm", c.resample_scm);
    }
    if (j.contains("corpus")) {
      const auto& s = j.at("corpus");
      c.corpus_train_n = s.value("train_n", c.corpus_train_n);
      c.corpus_test_n = s.value("test_n", c.corpus_test_n);
    }
    if (j.contains("classifier")) {
      const auto& s = j.at("classifier");
      c.hidden = s.value("hidden", c.hidden);
      c.epochs = s.value("epochs", c.epochs);
      c.learning_rate = s.value("learning_rate", c.learning_rate);
      c.batch_size = s.value("batch_size", c.batch_size);
      c.sda_seeds = s.value("sda_seeds", c.sda_seeds);
      c.split_fraction = s.value("split_fraction", c.split_fraction);
    }
    if (j.contains("colored")) {
      const auto& s = j.at("colored");
      c.colored.label_flip = s.value("label_flip", c.colored.label_flip);
      c.colored.e_train1 = s.value("e_train1", c.colored.e_train1);
      c.colored.e_train2 = s.value("e_train2", c.colored.e_train2);
      c.colored.e_test = s.value("e_test", c.colored.e_test);
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("bad config: ") + e.what());
  }
  return c;
}

int effective_hidden(const ExperimentConfig& config) {
  if (config.hidden > 0) return config.hidden;
  return config.fast ? 64 : 256;
}

namespace {

int effective_reps(const ExperimentConfig& config, int fallback) {
  return config.repetitions > 0 ? config.repetitions : fallback;
}

std::pair<double, double> mean_se(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

models::TrainConfig classifier_config(const ExperimentConfig& config) {
  models::TrainConfig tc;
  tc.learning_rate = config.learning_rate;
  tc.epochs = config.epochs;
  tc.batch_size = config.batch_size;
  return tc;
}

sda::SdaConfig make_sda_config(const ExperimentConfig& config) {
  sda::SdaConfig sc;
  sc.candidates = aug::default_augmentation_list();
  sc.seeds = config.sda_seeds;
  sc.split_fraction = config.split_fraction;
  sc.classifier = classifier_config(config);
  sc.hidden_sizes = {effective_hidden(config)};
  sc.workers = config.workers;
  return sc;
}

// Color transforms fix gray pixels (saturation blends a pixel toward its own
// luma; a hue rotation of an unsaturated color is that color), so on
// single-channel data they are replaced by an identity transform instead of
// erroring out of the run.
aug::AugmentationSpec kIdentitySpec = aug::Brightness{0.0};

std::vector<aug::AugmentationSpec> grayscale_effective(
    const std::vector<aug::AugmentationSpec>& specs, int channels) {
  std::vector<aug::AugmentationSpec> out;
  out.reserve(specs.size());
  for (const auto& s : specs) {
    if (channels == 1 && aug::requires_rgb(s)) {
      out.push_back(kIdentitySpec);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

int dataset_channels(const datasets::DomainDataset& d) {
  return d.samples.empty() ? 1 : d.samples.front().image.channels;
}

std::string angle_tag(double angle_deg) {
  return "heldout_" + std::to_string(static_cast<int>(angle_deg)) + "deg";
}

void append_sda_rows(ResultTable& table, json& raw, const std::string& experiment,
                     const std::string& prefix, const std::vector<aug::AugmentationSpec>& cands,
                     const sda::SdaResult& result, int seeds) {
  std::vector<bool> selected(cands.size(), false);
  for (std::size_t i : result.selected) selected[i] = true;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const std::string condition = prefix + "/" + aug::name(cands[i]);
    table.rows.push_back({experiment, condition, "domain_accuracy", result.stats[i].mean,
                          result.stats[i].standard_error, seeds});
    table.rows.push_back(
        {experiment, condition, "selected", selected[i] ? 1.0 : 0.0, 0.0, seeds});
    raw[condition] = result.stats[i].per_seed;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Data access
// ---------------------------------------------------------------------------

MnistArrays load_mnist_data(const ExperimentConfig& config) {
  MnistArrays arrays;
  if (!config.mnist_dir.empty()) {
    const fs::path dir(config.mnist_dir);
    arrays.train_images = datasets::load_idx_file((dir / "train-images-idx3-ubyte").string());
    arrays.train_labels = datasets::load_idx_file((dir / "train-labels-idx1-ubyte").string());
    arrays.test_images = datasets::load_idx_file((dir / "t10k-images-idx3-ubyte").string());
    arrays.test_labels = datasets::load_idx_file((dir / "t10k-labels-idx1-ubyte").string());
    return arrays;
  }
  digits::CorpusOptions options;
  options.train_n = config.corpus_train_n;
  options.test_n = config.corpus_test_n;
  Rng rng = Rng(config.master_seed).derive(0xC0);
  digits::Corpus corpus = digits::render_corpus(options, rng);
  arrays.train_images = std::move(corpus.train_images);
  arrays.train_labels = std::move(corpus.train_labels);
  arrays.test_images = std::move(corpus.test_images);
  arrays.test_labels = std::move(corpus.test_labels);
  return arrays;
}

datasets::RotatedMnist build_rotated(const ExperimentConfig& config) {
  const MnistArrays arrays = load_mnist_data(config);
  Rng rng = Rng(config.master_seed).derive(0xB1);
  datasets::RotatedMnist rotated = datasets::build_rotated_mnist(
      arrays.train_images, arrays.train_labels, arrays.test_images, arrays.test_labels, rng);
  if (config.fast) {
    rotated.train = datasets::downsample2(rotated.train);
    for (auto& t : rotated.test_by_angle) t = datasets::downsample2(t);
  }
  return rotated;
}

datasets::ColoredMnist build_colored(const ExperimentConfig& config) {
  const MnistArrays arrays = load_mnist_data(config);
  Rng rng = Rng(config.master_seed).derive(0xB2);
  datasets::ColoredMnist colored = datasets::build_colored_mnist(
      arrays.train_images, arrays.train_labels, arrays.test_images, arrays.test_labels,
      config.colored, rng);
  if (config.fast) colored.data = datasets::downsample2(colored.data);
  return colored;
}

// ---------------------------------------------------------------------------
// Synthetic regression sweep
// ---------------------------------------------------------------------------

ExperimentResult run_synthetic(const ExperimentConfig& config) {
  const int reps = effective_reps(config, 50);
  const int dim = config.synthetic_dim;
  if (dim < 1) throw config_error("synthetic dim must be >= 1");

  std::vector<std::string> conditions = {"erm_all", "erm_hy_only"};
  std::vector<std::pair<int, int>> grid;  // (k_d, k_y)
  for (int kd = 1; kd <= dim; ++kd) {
    for (int ky = 0; ky <= dim - 1; ++ky) {
      grid.emplace_back(kd, ky);
      conditions.push_back("da_kd" + std::to_string(kd) + "_ky" + std::to_string(ky));
    }
  }

  const Rng master(config.master_seed);
  scm::LinearGaussianScm shared;
  if (!config.resample_scm) {
    Rng rng = master.derive(0x53, 0xFFFF);
    shared = scm::random_scm(dim, config.sigma_c, config.sigma, rng);
  }

  std::vector<std::vector<double>> mse(conditions.size(),
                                       std::vector<double>(static_cast<std::size_t>(reps), 0.0));

  parallel_for(static_cast<std::size_t>(reps), config.workers, [&](std::size_t rep) {
    Rng rng = master.derive(0x53, rep);
    const scm::LinearGaussianScm process =
        config.resample_scm ? scm::random_scm(dim, config.sigma_c, config.sigma, rng) : shared;

    const auto train = scm::sample_observational(process, config.synthetic_train_n, rng);
    const scm::InterventionSpec test_spec{scm::Node::D, scm::Noise{scm::StandardNormalNoise{}}};
    const auto test = scm::sample_interventional(process, test_spec, config.synthetic_test_n, rng);

    Eigen::MatrixXd x_train, x_test;
    Eigen::VectorXd t_train, t_test;
    scm::to_regression(train, x_train, t_train);
    scm::to_regression(test, x_test, t_test);

    std::size_t cond = 0;
    {
      const auto model = models::ols_fit(x_train, t_train);
      mse[cond++][rep] = models::evaluate(model, x_test, t_test).mse;
    }
    {
      const auto model = models::ols_fit(x_train.rightCols(dim), t_train);
      mse[cond++][rep] = models::evaluate(model, x_test.rightCols(dim), t_test).mse;
    }
    for (const auto& [kd, ky] : grid) {
      std::vector<int> dims;
      for (int i = 0; i < kd; ++i) dims.push_back(i);
      for (int i = 0; i < ky; ++i) dims.push_back(dim + i);
      Eigen::MatrixXd x_aug = x_train;
      for (Eigen::Index r = 0; r < x_aug.rows(); ++r) {
        x_aug.row(r) = aug::vector_uniform_noise(x_aug.row(r), dims, -10.0, 10.0, rng);
      }
      const auto model = models::ols_fit(x_aug, t_train);
      mse[cond++][rep] = models::evaluate(model, x_test, t_test).mse;
    }
  });

  ExperimentResult result;
  json raw;
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    const auto [mean, se] = mean_se(mse[c]);
    result.table.rows.push_back({"synthetic", conditions[c], "test_mse", mean, se, reps});
    raw[conditions[c]] = mse[c];
  }
  result.provenance = {{"config", config_to_json(config)}, {"per_repetition_mse", raw}};
  return result;
}

// ---------------------------------------------------------------------------
// Selection experiments
// ---------------------------------------------------------------------------

ExperimentResult run_rotated_sda(const ExperimentConfig& config,
                                 std::vector<sda::SdaResult>* results_out) {
  const datasets::RotatedMnist rotated = build_rotated(config);
  const Rng master(config.master_seed);
  sda::SdaConfig sc = make_sda_config(config);
  const auto original_candidates = sc.candidates;

  ExperimentResult result;
  json raw;
  for (int heldout = 0; heldout < 4; ++heldout) {
    std::vector<int> keep;
    for (int d = 0; d < 4; ++d) {
      if (d != heldout) keep.push_back(d);
    }
    const datasets::DomainDataset train_domains = datasets::select_domains(rotated.train, keep);
    sc.candidates = grayscale_effective(original_candidates, dataset_channels(train_domains));
    const sda::SdaResult sda_result =
        sda::run_sda(train_domains, sc, master.derive(0xA1, static_cast<std::uint64_t>(heldout)));
    append_sda_rows(result.table, raw, "rotated_sda",
                    angle_tag(rotated.angles_deg[static_cast<std::size_t>(heldout)]),
                    original_candidates, sda_result, sc.seeds);
    if (results_out) results_out->push_back(sda_result);
  }
  result.provenance = {{"config", config_to_json(config)}, {"per_seed_domain_accuracy", raw}};
  return result;
}

ExperimentResult run_colored_sda(const ExperimentConfig& config, sda::SdaResult* result_out) {
  const datasets::ColoredMnist colored = build_colored(config);
  const datasets::DomainDataset train_domains = datasets::select_domains(colored.data, {0, 1});
  const sda::SdaConfig sc = make_sda_config(config);
  const sda::SdaResult sda_result =
      sda::run_sda(train_domains, sc, Rng(config.master_seed).derive(0xA3));

  ExperimentResult result;
  json raw;
  append_sda_rows(result.table, raw, "colored_sda", "colored", sc.candidates, sda_result,
                  sc.seeds);
  result.provenance = {{"config", config_to_json(config)}, {"per_seed_domain_accuracy", raw}};
  if (result_out) *result_out = sda_result;
  return result;
}

ExperimentResult run_sweep_rotation(const ExperimentConfig& config,
                                    std::vector<sda::SweepEntry>* entries_out) {
  const datasets::RotatedMnist rotated = build_rotated(config);
  const datasets::DomainDataset train_domains =
      datasets::select_domains(rotated.train, {1, 2, 3});  // train 30/60/90, held-out 0

  const std::vector<std::pair<double, double>> ranges = {
      {-15.0, 15.0}, {-45.0, 45.0}, {-90.0, 90.0}, {0.0, 180.0}, {0.0, 359.0}};
  const sda::SdaConfig sc = make_sda_config(config);
  const auto entries =
      sda::sweep_rotation_ranges(train_domains, ranges, sc, Rng(config.master_seed).derive(0xA2));

  ExperimentResult result;
  for (const auto& e : entries) {
    const std::string condition = "range_" + std::to_string(static_cast<int>(e.range_deg.first)) +
                                  "_" + std::to_string(static_cast<int>(e.range_deg.second));
    result.table.rows.push_back(
        {"sweep_rotation", condition, "domain_accuracy", e.mean, e.standard_error, sc.seeds});
  }
  result.provenance = {{"config", config_to_json(config)}};
  if (entries_out) *entries_out = entries;
  return result;
}

// ---------------------------------------------------------------------------
// End tasks
// ---------------------------------------------------------------------------

EndTaskResult train_end_task(const datasets::DomainDataset& train_domains,
                             const datasets::DomainDataset& test_set,
                             const std::vector<aug::AugmentationSpec>& augmentations,
                             const ExperimentConfig& config, Rng rng) {
  const models::ImageDataset train =
      datasets::to_image_dataset(train_domains, datasets::LabelKind::Class);
  const models::ImageDataset test =
      datasets::to_image_dataset(test_set, datasets::LabelKind::Class);

  models::TrainConfig tc = classifier_config(config);
  tc.augmentations = grayscale_effective(augmentations, dataset_channels(train_domains));
  tc.seed = rng.seed();

  const int input_dim = static_cast<int>(train.images.front().pixel_count());
  models::Mlp model({input_dim, effective_hidden(config), train.num_classes},
                    models::Output::Softmax, rng);
  model = models::train_erm(std::move(model), train, tc, rng);

  EndTaskResult out{std::move(model), 0.0, 0.0};
  out.train_accuracy = models::evaluate(out.model, train).accuracy;
  out.test_accuracy = models::evaluate(out.model, test).accuracy;
  return out;
}

std::vector<double> per_domain_risks(const models::Mlp& model,
                                     const datasets::DomainDataset& data) {
  std::vector<double> risks;
  for (int d = 0; d < data.num_domains; ++d) {
    const datasets::DomainDataset only = datasets::select_domains(data, {d});
    const models::ImageDataset view =
        datasets::to_image_dataset(only, datasets::LabelKind::Class);
    risks.push_back(1.0 - models::evaluate(model, view).accuracy);
  }
  return risks;
}

namespace {

struct ConditionRuns {
  std::vector<double> train_acc;
  std::vector<double> test_acc;
};

// reps independent trainings of one condition; seeds keyed
// (experiment id, condition index, repetition).
ConditionRuns run_condition(const datasets::DomainDataset& train_domains,
                            const datasets::DomainDataset& test_set,
                            const std::vector<aug::AugmentationSpec>& augs,
                            const ExperimentConfig& config, std::uint64_t experiment_key,
                            std::uint64_t condition_index, int reps) {
  const Rng master(config.master_seed);
  ConditionRuns runs;
  runs.train_acc.resize(static_cast<std::size_t>(reps));
  runs.test_acc.resize(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::size_t>(reps), config.workers, [&](std::size_t rep) {
    const EndTaskResult r = train_end_task(train_domains, test_set, augs, config,
                                           master.derive(experiment_key, condition_index, rep));
    runs.train_acc[rep] = r.train_accuracy;
    runs.test_acc[rep] = r.test_accuracy;
  });
  return runs;
}

std::vector<aug::AugmentationSpec> pick_selected(
    const std::vector<aug::AugmentationSpec>& candidates, const sda::SdaResult& result) {
  std::vector<aug::AugmentationSpec> out;
  for (std::size_t i : result.selected) out.push_back(candidates[i]);
  return out;
}

}  // namespace

ExperimentResult run_rotated_mnist(const ExperimentConfig& config) {
  const int reps = effective_reps(config, 5);
  const datasets::RotatedMnist rotated = build_rotated(config);
  const Rng master(config.master_seed);
  sda::SdaConfig sc = make_sda_config(config);
  const auto original_candidates = sc.candidates;

  ExperimentResult result;
  json raw;
  for (int heldout = 0; heldout < 4; ++heldout) {
    std::vector<int> keep;
    for (int d = 0; d < 4; ++d) {
      if (d != heldout) keep.push_back(d);
    }
    const datasets::DomainDataset train_domains = datasets::select_domains(rotated.train, keep);
    const auto& test_set = rotated.test_by_angle[static_cast<std::size_t>(heldout)];
    const std::string tag = angle_tag(rotated.angles_deg[static_cast<std::size_t>(heldout)]);

    sc.candidates = grayscale_effective(original_candidates, dataset_channels(train_domains));
    const sda::SdaResult sda_result =
        sda::run_sda(train_domains, sc, master.derive(0xA1, static_cast<std::uint64_t>(heldout)));
    append_sda_rows(result.table, raw, "rotated_mnist", tag, original_candidates, sda_result,
                    sc.seeds);

    const auto selected = pick_selected(original_candidates, sda_result);
    const auto key = static_cast<std::uint64_t>(heldout);
    const ConditionRuns erm =
        run_condition(train_domains, test_set, {}, config, 0xE1, key * 2, reps);
    const ConditionRuns da =
        run_condition(train_domains, test_set, selected, config, 0xE1, key * 2 + 1, reps);

    const auto [erm_mean, erm_se] = mean_se(erm.test_acc);
    const auto [da_mean, da_se] = mean_se(da.test_acc);
    result.table.rows.push_back(
        {"rotated_mnist", tag + "/erm", "test_accuracy", erm_mean, erm_se, reps});
    result.table.rows.push_back(
        {"rotated_mnist", tag + "/sda_da", "test_accuracy", da_mean, da_se, reps});
    raw[tag + "/erm_test_accuracy"] = erm.test_acc;
    raw[tag + "/sda_da_test_accuracy"] = da.test_acc;
  }
  result.provenance = {{"config", config_to_json(config)}, {"raw", raw}};
  return result;
}

ExperimentResult run_colored_mnist(const ExperimentConfig& config,
                                   const sda::SdaResult* colored_sda) {
  const int reps = effective_reps(config, 5);
  const datasets::ColoredMnist colored = build_colored(config);
  const datasets::DomainDataset train_domains = datasets::select_domains(colored.data, {0, 1});
  const datasets::DomainDataset test_set = datasets::select_domains(colored.data, {2});
  const sda::SdaConfig sc = make_sda_config(config);

  sda::SdaResult local;
  if (colored_sda == nullptr) {
    local = sda::run_sda(train_domains, sc, Rng(config.master_seed).derive(0xA3));
    colored_sda = &local;
  }

  ExperimentResult result;
  json raw;
  append_sda_rows(result.table, raw, "colored_mnist", "colored", sc.candidates, *colored_sda,
                  sc.seeds);

  const std::vector<std::pair<std::string, std::vector<aug::AugmentationSpec>>> conditions = {
      {"erm", {}},
      {"hue_da", {aug::Hue{0.5}}},
      {"sda_da", pick_selected(sc.candidates, *colored_sda)},
  };
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    const auto& [cond_name, augs] = conditions[c];
    const ConditionRuns runs =
        run_condition(train_domains, test_set, augs, config, 0xE2, c, reps);
    const auto [train_mean, train_se] = mean_se(runs.train_acc);
    const auto [test_mean, test_se] = mean_se(runs.test_acc);
    result.table.rows.push_back(
        {"colored_mnist", "colored/" + cond_name, "train_accuracy", train_mean, train_se, reps});
    result.table.rows.push_back(
        {"colored_mnist", "colored/" + cond_name, "test_accuracy", test_mean, test_se, reps});
    raw["colored/" + cond_name + "_train_accuracy"] = runs.train_acc;
    raw["colored/" + cond_name + "_test_accuracy"] = runs.test_acc;
  }
  result.provenance = {{"config", config_to_json(config)}, {"raw", raw}};
  return result;
}

ExperimentResult run_ablation_all_da(const ExperimentConfig& config,
                                     const std::vector<aug::AugmentationSpec>* rotated_selected,
                                     const std::vector<aug::AugmentationSpec>* colored_selected) {
  const int reps = effective_reps(config, 5);
  const auto all_da = aug::default_augmentation_list();
  const std::vector<aug::AugmentationSpec> rotation_only = {aug::Rotation{0.0, 359.0}};
  const std::vector<aug::AugmentationSpec> hue_only = {aug::Hue{0.5}};
  if (rotated_selected == nullptr) rotated_selected = &rotation_only;
  if (colored_selected == nullptr) colored_selected = &hue_only;

  ExperimentResult result;
  json raw;

  {
    // Rotated task, held-out 0 degrees.
    const datasets::RotatedMnist rotated = build_rotated(config);
    const datasets::DomainDataset train_domains =
        datasets::select_domains(rotated.train, {1, 2, 3});
    const auto& test_set = rotated.test_by_angle[0];
    const std::vector<std::pair<std::string, const std::vector<aug::AugmentationSpec>*>> conds = {
        {"all_da", &all_da}, {"sda_da", rotated_selected}};
    for (std::size_t c = 0; c < conds.size(); ++c) {
      const ConditionRuns runs =
          run_condition(train_domains, test_set, *conds[c].second, config, 0xE3, c, reps);
      const auto [mean, se] = mean_se(runs.test_acc);
      result.table.rows.push_back(
          {"ablation", "rotated/" + conds[c].first, "test_accuracy", mean, se, reps});
      raw["rotated/" + conds[c].first] = runs.test_acc;
    }
  }
  {
    const datasets::ColoredMnist colored = build_colored(config);
    const datasets::DomainDataset train_domains = datasets::select_domains(colored.data, {0, 1});
    const datasets::DomainDataset test_set = datasets::select_domains(colored.data, {2});
    const std::vector<std::pair<std::string, const std::vector<aug::AugmentationSpec>*>> conds = {
        {"all_da", &all_da}, {"sda_da", colored_selected}};
    for (std::size_t c = 0; c < conds.size(); ++c) {
      const ConditionRuns runs =
          run_condition(train_domains, test_set, *conds[c].second, config, 0xE4, c, reps);
      const auto [mean, se] = mean_se(runs.test_acc);
      result.table.rows.push_back(
          {"ablation", "colored/" + conds[c].first, "test_accuracy", mean, se, reps});
      raw["colored/" + conds[c].first] = runs.test_acc;
    }
  }
  result.provenance = {{"config", config_to_json(config)}, {"raw", raw}};
  return result;
}

}  // namespace causalaug::experiments
