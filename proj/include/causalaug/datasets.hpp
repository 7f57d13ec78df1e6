#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "causalaug/analysis.hpp"
#include "causalaug/augment.hpp"
#include "causalaug/models.hpp"
#include "causalaug/rng.hpp"

namespace causalaug::datasets {

// IDX container (big-endian header: magic, one u32 per dimension, payload).
struct IdxArray {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;
};

constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;  // u8 labels, 1-dim
constexpr std::uint32_t kIdxImagesMagic = 0x00000803;  // u8 images, 3-dim

/// Parses raw IDX bytes. Throws format_error on an unknown magic and
/// length_mismatch_error (with expected/actual sizes) on a truncated payload.
IdxArray parse_idx(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> serialize_idx(const IdxArray& array);

IdxArray load_idx_file(const std::string& path);
void write_idx_file(const IdxArray& array, const std::string& path);

/// Image `index` of an images array, pixel bytes rescaled to [0, 1] by /255.
aug::RasterImage idx_image(const IdxArray& images, std::size_t index);

struct Sample {
  aug::RasterImage image;
  int y = 0;  // class index
  int d = 0;  // domain index
};

struct DomainDataset {
  std::vector<Sample> samples;
  int num_domains = 0;
  int num_classes = 0;
};

// ---------------------------------------------------------------------------
// Rotated digits: four domains at 0/30/60/90 degrees; each domain draws a
// fresh per-class subset of size U{80..160} and rotates it by the domain
// angle. Test sets are the full test split rotated by each angle.
// ---------------------------------------------------------------------------
struct RotatedMnist {
  DomainDataset train;                       // domains 0..3 = angles below
  std::vector<DomainDataset> test_by_angle;  // single-domain datasets
  std::vector<double> angles_deg;
};

RotatedMnist build_rotated_mnist(const IdxArray& train_images, const IdxArray& train_labels,
                                 const IdxArray& test_images, const IdxArray& test_labels,
                                 Rng& rng);

// ---------------------------------------------------------------------------
// Colored digits: binary label (digits 0-4 vs 5-9) flipped with probability
// `label_flip`, digit colored red for label 0 / green for label 1, color then
// flipped with a per-domain probability. Domains 0 and 1 are disjoint halves
// of the train split; domain 2 comes from the test split.
// ---------------------------------------------------------------------------
struct ColoredMnistParams {
  double label_flip = 0.25;
  double e_train1 = 0.2;
  double e_train2 = 0.1;
  double e_test = 0.9;
};

struct ColoredMnist {
  DomainDataset data;  // 3 domains: 0, 1 train; 2 test
  // Sample-aligned provenance for the construction oracles.
  std::vector<std::uint8_t> pre_flip_label;
  std::vector<std::uint8_t> color;  // 0 = red, 1 = green
};

ColoredMnist build_colored_mnist(const IdxArray& train_images, const IdxArray& train_labels,
                                 const IdxArray& test_images, const IdxArray& test_labels,
                                 const ColoredMnistParams& params, Rng& rng);

/// Empirical label marginals p(y | d), one distribution per domain.
std::vector<analysis::DiscreteDistribution> dataset_stats(const DomainDataset& dataset);

/// Keeps only the listed domains and renumbers them 0..k-1 in list order.
DomainDataset select_domains(const DomainDataset& dataset, const std::vector<int>& keep);

/// 2x2 average-pools every image (fast mode).
DomainDataset downsample2(const DomainDataset& dataset);

/// View with labels = class y or domain d, for classifier training.
enum class LabelKind { Class, Domain };
models::ImageDataset to_image_dataset(const DomainDataset& dataset, LabelKind kind);

// Binary cache (single file) plus JSON manifest carrying parameters and an
// FNV-1a checksum of the cache bytes.
void save_cache(const DomainDataset& dataset, const std::string& cache_path,
                const std::string& manifest_path, const nlohmann::json& parameters);
DomainDataset load_cache(const std::string& cache_path);

}  // namespace causalaug::datasets
