#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "causalaug/analysis.hpp"
#include "causalaug/equivariance.hpp"
#include "causalaug/errors.hpp"
#include "causalaug/experiments.hpp"
#include "causalaug/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace causalaug;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> mnist_dir;
  std::optional<int> reps;
  std::optional<unsigned> workers;
  bool fast = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file (flags override its fields)");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--mnist-dir", flags.mnist_dir,
                  "directory with the four decompressed IDX files; omit to use the rendered "
                  "digit corpus");
  cmd->add_option("--reps", flags.reps, "repetition count override");
  cmd->add_option("--workers", flags.workers, "worker threads (0 = hardware)");
  cmd->add_flag("--fast", flags.fast, "14x14 average-pooled images, narrow hidden layer");
}

experiments::ExperimentConfig resolve_config(const CommonFlags& flags) {
  experiments::ExperimentConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw config_error("cannot open config file: " + flags.config_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw config_error(std::string("config is not valid json: ") + e.what());
    }
    config = experiments::config_from_json(j);
  }
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  if (flags.mnist_dir) config.mnist_dir = *flags.mnist_dir;
  if (flags.reps) config.repetitions = *flags.reps;
  if (flags.workers) config.workers = *flags.workers;
  if (flags.fast) config.fast = true;
  return config;
}

void emit(const experiments::ExperimentResult& result, const experiments::ExperimentConfig& config,
          const std::string& stem) {
  experiments::write_outputs(result, config.out_dir, stem);
  std::cout << experiments::to_csv(result.table);
  std::cout << "wrote " << (fs::path(config.out_dir) / (stem + ".csv")).string() << " and .json\n";
}

std::string sda_csv(const std::vector<aug::AugmentationSpec>& candidates,
                    const sda::SdaResult& result) {
  std::vector<bool> selected(candidates.size(), false);
  for (std::size_t i : result.selected) selected[i] = true;
  std::string out = "candidate,mean,standard_error,selected\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out += aug::name(candidates[i]) + ',' + io::format_double(result.stats[i].mean) + ',' +
           io::format_double(result.stats[i].standard_error) + ',' + (selected[i] ? "1" : "0") +
           '\n';
  }
  return out;
}

json sda_result_json(const std::vector<aug::AugmentationSpec>& candidates,
                     const sda::SdaResult& result) {
  json j;
  j["candidates"] = json::array();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    j["candidates"].push_back({{"name", aug::name(candidates[i])},
                               {"mean_domain_accuracy", result.stats[i].mean},
                               {"standard_error", result.stats[i].standard_error},
                               {"per_seed", result.stats[i].per_seed}});
  }
  j["selected_indices"] = result.selected;
  json names = json::array();
  for (std::size_t i : result.selected) names.push_back(aug::name(candidates[i]));
  j["selected"] = names;
  return j;
}

int run_sda_command(const experiments::ExperimentConfig& config, const std::string& dataset,
                    int heldout) {
  std::vector<std::pair<std::string, sda::SdaResult>> outputs;  // (stem, result)
  const auto candidates = aug::default_augmentation_list();

  if (dataset == "colored") {
    sda::SdaResult result;
    experiments::run_colored_sda(config, &result);
    outputs.emplace_back("sda_colored", result);
  } else if (dataset == "rotated") {
    std::vector<sda::SdaResult> results;
    experiments::run_rotated_sda(config, &results);
    const int angles[] = {0, 30, 60, 90};
    for (int h = 0; h < 4; ++h) {
      if (heldout >= 0 && heldout != h) continue;
      outputs.emplace_back("sda_rotated_heldout" + std::to_string(angles[h]) + "deg",
                           results[static_cast<std::size_t>(h)]);
    }
  } else {
    throw config_error("--dataset must be 'rotated' or 'colored'");
  }

  for (const auto& [stem, result] : outputs) {
    const fs::path dir(config.out_dir);
    io::atomic_write_file((dir / (stem + ".csv")).string(), sda_csv(candidates, result));
    io::atomic_write_file((dir / (stem + ".json")).string(),
                          sda_result_json(candidates, result).dump(2) + "\n");
    std::cout << "== " << stem << " ==\n" << sda_csv(candidates, result);
  }
  return 0;
}

int run_equivariance_command(const experiments::ExperimentConfig& config, int dim, int trials,
                             double tolerance, bool invariant) {
  if (dim < 2) throw config_error("--dim must be >= 2");
  Rng rng = Rng(config.master_seed).derive(0xEC);

  equivariance::LinearCausalProcess proc;
  proc.c.resize(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) proc.c(r, c) = rng.normal();

  proc.d.resize(dim, dim);
  proc.e.resize(dim);
  if (invariant) {
    Eigen::RowVectorXd row(dim);
    for (int c = 0; c < dim; ++c) row(c) = rng.normal();
    for (int r = 0; r < dim; ++r) proc.d.row(r) = row;
    proc.e.setConstant(rng.normal());
  } else {
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) proc.d(r, c) = rng.normal();
    for (int r = 0; r < dim; ++r) proc.e(r) = rng.normal();
  }

  const auto perm = equivariance::PermutationMatrix::random(dim, rng);
  const auto report = equivariance::check_equivariance(proc, perm, trials, tolerance, rng);

  json j = {{"max_abs_residual", report.max_abs_residual},
            {"max_magnitude", report.max_magnitude},
            {"condition_AD_eq_D", report.condition_ad_eq_d},
            {"condition_Ae_eq_e", report.condition_ae_eq_e},
            {"holds", report.holds},
            {"permutation", perm.indices()},
            {"trials", trials},
            {"tolerance", tolerance}};
  io::atomic_write_file((fs::path(config.out_dir) / "equivariance_report.json").string(),
                        j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_bound_command(const experiments::ExperimentConfig& config, const std::string& input) {
  std::ifstream in(input);
  if (!in) throw data_error("cannot open input file: " + input);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw data_error(std::string("input is not valid json: ") + e.what());
  }
  std::vector<analysis::DiscreteDistribution> marginals;
  try {
    for (const auto& m : j.at("marginals")) {
      marginals.emplace_back(m.get<std::vector<double>>());
    }
    const auto risks = j.at("risks").get<std::vector<double>>();
    const auto report = analysis::invariance_bound(marginals, risks);
    json out = {{"lhs", report.lhs}, {"rhs", report.rhs}, {"holds", report.holds}};
    io::atomic_write_file((fs::path(config.out_dir) / "bound_report.json").string(),
                          out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
  } catch (const json::exception& e) {
    throw data_error(std::string("input schema: expected {marginals, risks}: ") + e.what());
  }
  return 0;
}

int run_gen_digits_command(const experiments::ExperimentConfig& config, int train_n, int test_n) {
  digits::CorpusOptions options;
  options.train_n = train_n;
  options.test_n = test_n;
  Rng rng = Rng(config.master_seed).derive(0xC0);
  const digits::Corpus corpus = digits::render_corpus(options, rng);
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  datasets::write_idx_file(corpus.train_images, (dir / "train-images-idx3-ubyte").string());
  datasets::write_idx_file(corpus.train_labels, (dir / "train-labels-idx1-ubyte").string());
  datasets::write_idx_file(corpus.test_images, (dir / "t10k-images-idx3-ubyte").string());
  datasets::write_idx_file(corpus.test_labels, (dir / "t10k-labels-idx1-ubyte").string());
  std::cout << "wrote " << train_n << " train / " << test_n << " test digit images to "
            << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal data augmentation toolkit: SCM simulation, equivariance checks, "
               "augmentation selection, and domain-generalization experiments"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* synthetic = app.add_subcommand("synthetic", "synthetic regression sweep");
  add_common(synthetic, flags);

  auto* sda_cmd = app.add_subcommand("sda", "augmentation selection via domain classifiers");
  add_common(sda_cmd, flags);
  std::string sda_dataset = "rotated";
  int sda_heldout = -1;
  sda_cmd->add_option("--dataset", sda_dataset, "rotated | colored")->required();
  sda_cmd->add_option("--heldout", sda_heldout, "rotated only: held-out domain index 0..3");

  auto* rotated = app.add_subcommand("rotated-mnist", "rotated-digit selection + end task");
  add_common(rotated, flags);

  auto* colored = app.add_subcommand("colored-mnist", "colored-digit selection + end task");
  add_common(colored, flags);

  auto* ablation = app.add_subcommand("ablation", "all augmentations jointly vs selected");
  add_common(ablation, flags);

  auto* sweep = app.add_subcommand("sweep-rotation", "rotation range sweep (domain accuracy)");
  add_common(sweep, flags);

  auto* equi = app.add_subcommand("equivariance-check", "linear commutative-diagram check");
  add_common(equi, flags);
  int eq_dim = 6, eq_trials = 100;
  double eq_tolerance = 1e-9;
  bool eq_invariant = false;
  equi->add_option("--dim", eq_dim, "process dimension");
  equi->add_option("--trials", eq_trials, "random latent draws");
  equi->add_option("--tolerance", eq_tolerance, "residual tolerance");
  equi->add_flag("--invariant", eq_invariant,
                 "construct a permutation-invariant instance (AD=D, Ae=e)");

  auto* bound = app.add_subcommand("bound-check", "invariant-representation risk bound");
  add_common(bound, flags);
  std::string bound_input;
  bound->add_option("--input", bound_input, "JSON file with {marginals: [[..]], risks: [..]}")
      ->required();

  auto* gen = app.add_subcommand("gen-digits", "write the rendered digit corpus as IDX files");
  add_common(gen, flags);
  int gen_train = 12000, gen_test = 2000;
  gen->add_option("--train-n", gen_train, "training images");
  gen->add_option("--test-n", gen_test, "test images");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto config = resolve_config(flags);
    if (synthetic->parsed()) {
      emit(experiments::run_synthetic(config), config, "synthetic");
    } else if (sda_cmd->parsed()) {
      return run_sda_command(config, sda_dataset, sda_heldout);
    } else if (rotated->parsed()) {
      emit(experiments::run_rotated_mnist(config), config, "rotated_mnist");
    } else if (colored->parsed()) {
      emit(experiments::run_colored_mnist(config), config, "colored_mnist");
    } else if (ablation->parsed()) {
      emit(experiments::run_ablation_all_da(config), config, "ablation");
    } else if (sweep->parsed()) {
      emit(experiments::run_sweep_rotation(config), config, "sweep_rotation");
    } else if (equi->parsed()) {
      return run_equivariance_command(config, eq_dim, eq_trials, eq_tolerance, eq_invariant);
    } else if (bound->parsed()) {
      return run_bound_command(config, bound_input);
    } else if (gen->parsed()) {
      return run_gen_digits_command(config, gen_train, gen_test);
    }
    return 0;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
