#include "causalaug/datasets.hpp"

#include <algorithm>
#include <cstring>
#include <nlohmann/json.hpp>
#include <numeric>

#include "causalaug/errors.hpp"
#include "causalaug/io.hpp"

namespace causalaug::datasets {

namespace {

std::uint32_t read_be32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxArray parse_idx(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw format_error("idx data shorter than magic");
  IdxArray array;
  array.magic = read_be32(bytes.data());

  std::size_t ndims = 0;
  if (array.magic == kIdxLabelsMagic) {
    ndims = 1;
  } else if (array.magic == kIdxImagesMagic) {
    ndims = 3;
  } else {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%08X", array.magic);
    throw format_error(std::string("unknown idx magic ") + buf);
  }

  const std::size_t header = 4 + 4 * ndims;
  if (bytes.size() < header) throw format_error("idx data shorter than its dimension header");

  std::uint64_t expected = 1;
  for (std::size_t i = 0; i < ndims; ++i) {
    const std::uint32_t dim = read_be32(bytes.data() + 4 + 4 * i);
    if (dim == 0) throw format_error("idx dimension of size zero");
    array.dims.push_back(dim);
    expected *= dim;
  }

  const std::uint64_t actual = bytes.size() - header;
  if (actual != expected) throw length_mismatch_error(expected, actual);

  array.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return array;
}

std::vector<std::uint8_t> serialize_idx(const IdxArray& array) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * array.dims.size() + array.data.size());
  write_be32(out, array.magic);
  for (std::uint32_t d : array.dims) write_be32(out, d);
  out.insert(out.end(), array.data.begin(), array.data.end());
  return out;
}

IdxArray load_idx_file(const std::string& path) {
  return parse_idx(io::read_file_bytes(path));
}

void write_idx_file(const IdxArray& array, const std::string& path) {
  io::write_file_bytes(path, serialize_idx(array));
}

aug::RasterImage idx_image(const IdxArray& images, std::size_t index) {
  if (images.magic != kIdxImagesMagic || images.dims.size() != 3) {
    throw format_error("not an idx image array");
  }
  const std::size_t n = images.dims[0], h = images.dims[1], w = images.dims[2];
  if (index >= n) throw invalid_index_error("image index out of range");
  aug::RasterImage img = aug::RasterImage::zeros(static_cast<int>(h), static_cast<int>(w), 1);
  const std::uint8_t* src = images.data.data() + index * h * w;
  for (std::size_t i = 0; i < h * w; ++i) {
    img.pixels[i] = static_cast<float>(src[i]) / 255.0f;
  }
  return img;
}

// ---------------------------------------------------------------------------
// Rotated digits
// ---------------------------------------------------------------------------

namespace {

void check_mnist_pair(const IdxArray& images, const IdxArray& labels) {
  if (images.magic != kIdxImagesMagic) throw format_error("expected an idx image array");
  if (labels.magic != kIdxLabelsMagic) throw format_error("expected an idx label array");
  if (images.dims[0] != labels.dims[0]) {
    throw format_error("image and label arrays disagree on sample count");
  }
}

}  // namespace

RotatedMnist build_rotated_mnist(const IdxArray& train_images, const IdxArray& train_labels,
                                 const IdxArray& test_images, const IdxArray& test_labels,
                                 Rng& rng) {
  check_mnist_pair(train_images, train_labels);
  check_mnist_pair(test_images, test_labels);

  RotatedMnist out;
  out.angles_deg = {0.0, 30.0, 60.0, 90.0};
  out.train.num_domains = 4;
  out.train.num_classes = 10;

  // Index images by class once.
  std::vector<std::vector<std::size_t>> by_class(10);
  for (std::size_t i = 0; i < train_labels.data.size(); ++i) {
    const int y = train_labels.data[i];
    if (y < 0 || y > 9) throw format_error("label outside 0..9");
    by_class[static_cast<std::size_t>(y)].push_back(i);
  }

  for (int domain = 0; domain < 4; ++domain) {
    const double angle = out.angles_deg[static_cast<std::size_t>(domain)];
    for (int y = 0; y < 10; ++y) {
      auto& pool = by_class[static_cast<std::size_t>(y)];
      const auto count = static_cast<std::size_t>(rng.uniform_int(80, 160));
      if (pool.size() < count) {
        throw insufficient_data_error("class " + std::to_string(y) + " has only " +
                                      std::to_string(pool.size()) + " images, need " +
                                      std::to_string(count));
      }
      // Partial Fisher-Yates: draw `count` distinct indices from the pool.
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.uniform_below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        Sample s;
        s.image = idx_image(train_images, pool[i]);
        if (angle != 0.0) {
          aug::AffineParams p;
          p.angle_deg = angle;
          s.image = aug::affine_warp(s.image, p);
        }
        s.y = y;
        s.d = domain;
        out.train.samples.push_back(std::move(s));
      }
    }
  }

  for (int domain = 0; domain < 4; ++domain) {
    const double angle = out.angles_deg[static_cast<std::size_t>(domain)];
    DomainDataset test;
    test.num_domains = 1;
    test.num_classes = 10;
    for (std::size_t i = 0; i < test_labels.data.size(); ++i) {
      Sample s;
      s.image = idx_image(test_images, i);
      if (angle != 0.0) {
        aug::AffineParams p;
        p.angle_deg = angle;
        s.image = aug::affine_warp(s.image, p);
      }
      s.y = test_labels.data[i];
      s.d = 0;
      test.samples.push_back(std::move(s));
    }
    out.test_by_angle.push_back(std::move(test));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Colored digits
// ---------------------------------------------------------------------------

namespace {

Sample make_colored_sample(const IdxArray& images, std::size_t index, int domain,
                           double label_flip, double color_flip, Rng& rng, int digit,
                           std::uint8_t& pre_flip_out, std::uint8_t& color_out) {
  const std::uint8_t pre_flip = digit <= 4 ? 0 : 1;
  std::uint8_t label = pre_flip;
  if (rng.bernoulli(label_flip)) label ^= 1;
  std::uint8_t color = label;  // 0 = red, 1 = green
  if (rng.bernoulli(color_flip)) color ^= 1;

  const aug::RasterImage gray = idx_image(images, index);
  aug::RasterImage rgb = aug::RasterImage::zeros(gray.height, gray.width, 3);
  const int channel = color == 0 ? 0 : 1;
  for (int r = 0; r < gray.height; ++r)
    for (int c = 0; c < gray.width; ++c) rgb.at(r, c, channel) = gray.at(r, c, 0);

  Sample s;
  s.image = std::move(rgb);
  s.y = label;
  s.d = domain;
  pre_flip_out = pre_flip;
  color_out = color;
  return s;
}

}  // namespace

ColoredMnist build_colored_mnist(const IdxArray& train_images, const IdxArray& train_labels,
                                 const IdxArray& test_images, const IdxArray& test_labels,
                                 const ColoredMnistParams& params, Rng& rng) {
  check_mnist_pair(train_images, train_labels);
  check_mnist_pair(test_images, test_labels);

  ColoredMnist out;
  out.data.num_domains = 3;
  out.data.num_classes = 2;

  const std::size_t n_train = train_labels.data.size();
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  const std::size_t half = n_train / 2;
  for (std::size_t i = 0; i < n_train; ++i) {
    const int domain = i < half ? 0 : 1;
    const double e = domain == 0 ? params.e_train1 : params.e_train2;
    std::uint8_t pre_flip = 0, color = 0;
    out.data.samples.push_back(make_colored_sample(train_images, order[i], domain,
                                                   params.label_flip, e, rng,
                                                   train_labels.data[order[i]], pre_flip, color));
    out.pre_flip_label.push_back(pre_flip);
    out.color.push_back(color);
  }

  for (std::size_t i = 0; i < test_labels.data.size(); ++i) {
    std::uint8_t pre_flip = 0, color = 0;
    out.data.samples.push_back(make_colored_sample(test_images, i, 2, params.label_flip,
                                                   params.e_test, rng, test_labels.data[i],
                                                   pre_flip, color));
    out.pre_flip_label.push_back(pre_flip);
    out.color.push_back(color);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<analysis::DiscreteDistribution> dataset_stats(const DomainDataset& dataset) {
  if (dataset.samples.empty()) throw empty_dataset_error("dataset_stats: empty dataset");
  std::vector<std::vector<double>> counts(
      static_cast<std::size_t>(dataset.num_domains),
      std::vector<double>(static_cast<std::size_t>(dataset.num_classes), 0.0));
  for (const auto& s : dataset.samples) {
    counts.at(static_cast<std::size_t>(s.d)).at(static_cast<std::size_t>(s.y)) += 1.0;
  }
  std::vector<analysis::DiscreteDistribution> out;
  out.reserve(counts.size());
  for (const auto& c : counts) out.push_back(analysis::DiscreteDistribution::from_counts(c));
  return out;
}

DomainDataset select_domains(const DomainDataset& dataset, const std::vector<int>& keep) {
  DomainDataset out;
  out.num_domains = static_cast<int>(keep.size());
  out.num_classes = dataset.num_classes;
  for (const auto& s : dataset.samples) {
    for (std::size_t k = 0; k < keep.size(); ++k) {
      if (s.d == keep[k]) {
        Sample copy = s;
        copy.d = static_cast<int>(k);
        out.samples.push_back(std::move(copy));
        break;
      }
    }
  }
  return out;
}

DomainDataset downsample2(const DomainDataset& dataset) {
  DomainDataset out = dataset;
  for (auto& s : out.samples) s.image = aug::average_pool2(s.image);
  return out;
}

models::ImageDataset to_image_dataset(const DomainDataset& dataset, LabelKind kind) {
  models::ImageDataset out;
  out.num_classes = kind == LabelKind::Class ? dataset.num_classes : dataset.num_domains;
  out.images.reserve(dataset.samples.size());
  out.labels.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) {
    out.images.push_back(s.image);
    out.labels.push_back(kind == LabelKind::Class ? s.y : s.d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary cache + manifest
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kCacheMagic = 0x43414453;  // "CADS"
constexpr std::uint32_t kCacheVersion = 1;

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t take_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw format_error("dataset cache truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos++]) << (8 * i);
  return v;
}

}  // namespace

void save_cache(const DomainDataset& dataset, const std::string& cache_path,
                const std::string& manifest_path, const nlohmann::json& parameters) {
  std::vector<std::uint8_t> blob;
  append_u32(blob, kCacheMagic);
  append_u32(blob, kCacheVersion);
  append_u32(blob, static_cast<std::uint32_t>(dataset.num_domains));
  append_u32(blob, static_cast<std::uint32_t>(dataset.num_classes));
  append_u32(blob, static_cast<std::uint32_t>(dataset.samples.size()));
  for (const auto& s : dataset.samples) {
    append_u32(blob, static_cast<std::uint32_t>(s.image.height));
    append_u32(blob, static_cast<std::uint32_t>(s.image.width));
    append_u32(blob, static_cast<std::uint32_t>(s.image.channels));
    append_u32(blob, static_cast<std::uint32_t>(s.y));
    append_u32(blob, static_cast<std::uint32_t>(s.d));
    const auto bytes = s.image.pixels.size() * sizeof(float);
    const std::size_t offset = blob.size();
    blob.resize(offset + bytes);
    std::memcpy(blob.data() + offset, s.image.pixels.data(), bytes);
  }
  io::write_file_bytes(cache_path, blob);

  nlohmann::json manifest;
  manifest["parameters"] = parameters;
  manifest["samples"] = dataset.samples.size();
  manifest["num_domains"] = dataset.num_domains;
  manifest["num_classes"] = dataset.num_classes;
  manifest["checksum_fnv1a64"] = io::fnv1a64(blob.data(), blob.size());
  io::atomic_write_file(manifest_path, manifest.dump(2) + "\n");
}

DomainDataset load_cache(const std::string& cache_path) {
  const auto blob = io::read_file_bytes(cache_path);
  std::size_t pos = 0;
  if (take_u32(blob, pos) != kCacheMagic) throw format_error("not a dataset cache file");
  if (take_u32(blob, pos) != kCacheVersion) throw format_error("unsupported cache version");
  DomainDataset out;
  out.num_domains = static_cast<int>(take_u32(blob, pos));
  out.num_classes = static_cast<int>(take_u32(blob, pos));
  const std::uint32_t n = take_u32(blob, pos);
  out.samples.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const int h = static_cast<int>(take_u32(blob, pos));
    const int w = static_cast<int>(take_u32(blob, pos));
    const int c = static_cast<int>(take_u32(blob, pos));
    Sample s;
    s.y = static_cast<int>(take_u32(blob, pos));
    s.d = static_cast<int>(take_u32(blob, pos));
    s.image = aug::RasterImage::zeros(h, w, c);
    const auto bytes = s.image.pixels.size() * sizeof(float);
    if (pos + bytes > blob.size()) throw format_error("dataset cache truncated");
    std::memcpy(s.image.pixels.data(), blob.data() + pos, bytes);
    pos += bytes;
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace causalaug::datasets
