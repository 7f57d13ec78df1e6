#include "causalaug/augment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "causalaug/errors.hpp"

namespace causalaug::aug {

namespace {

std::atomic<std::uint64_t> g_apply_count{0};

constexpr double kLumaR = 0.299, kLumaG = 0.587, kLumaB = 0.114;

inline float clip01(double v) {
  if (v < 0.0) return 0.0f;
  if (v > 1.0) return 1.0f;
  return static_cast<float>(v);
}

inline double luma(const RasterImage& img, int r, int c) {
  if (img.channels == 1) return img.at(r, c, 0);
  return kLumaR * img.at(r, c, 0) + kLumaG * img.at(r, c, 1) + kLumaB * img.at(r, c, 2);
}

void require_rgb(const RasterImage& img, const char* op) {
  if (img.channels != 3) {
    throw channel_mismatch_error(std::string(op) + " requires a 3-channel image, got " +
                                 std::to_string(img.channels));
  }
}

}  // namespace

RasterImage RasterImage::zeros(int height, int width, int channels) {
  if (height < 1 || width < 1 || (channels != 1 && channels != 3)) {
    throw invalid_dimension_error("image dimensions must be positive with 1 or 3 channels");
  }
  RasterImage img;
  img.height = height;
  img.width = width;
  img.channels = channels;
  img.pixels.assign(static_cast<std::size_t>(height) * width * channels, 0.0f);
  return img;
}

RasterImage affine_warp(const RasterImage& image, const AffineParams& params) {
  if (params.scale <= 0.0) throw invalid_dimension_error("affine scale must be > 0");

  const double rad = params.angle_deg * std::numbers::pi / 180.0;
  const double cos_a = std::cos(rad), sin_a = std::sin(rad);
  const double tx = std::tan(params.shear_x_deg * std::numbers::pi / 180.0);
  const double ty = std::tan(params.shear_y_deg * std::numbers::pi / 180.0);
  const double s = params.scale;

  // Forward map on centered (x right, y down) coordinates:
  //   p' = R * ShX * ShY * S * p + t,  counterclockwise R for y-down axes.
  const double sh00 = 1.0 + tx * ty, sh01 = tx, sh10 = ty, sh11 = 1.0;
  const double m00 = (cos_a * sh00 + sin_a * sh10) * s;
  const double m01 = (cos_a * sh01 + sin_a * sh11) * s;
  const double m10 = (-sin_a * sh00 + cos_a * sh10) * s;
  const double m11 = (-sin_a * sh01 + cos_a * sh11) * s;

  const double det = m00 * m11 - m01 * m10;
  const double i00 = m11 / det, i01 = -m01 / det, i10 = -m10 / det, i11 = m00 / det;

  const double cx = (image.width - 1) * 0.5;
  const double cy = (image.height - 1) * 0.5;

  RasterImage out = RasterImage::zeros(image.height, image.width, image.channels);
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      const double ox = c - cx - params.translate_x;
      const double oy = r - cy - params.translate_y;
      const double sx = i00 * ox + i01 * oy + cx;
      const double sy = i10 * ox + i11 * oy + cy;

      const double fx = std::floor(sx), fy = std::floor(sy);
      const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
      const double wx = sx - fx, wy = sy - fy;

      for (int ch = 0; ch < image.channels; ++ch) {
        auto fetch = [&](int yy, int xx) -> double {
          if (xx < 0 || xx >= image.width || yy < 0 || yy >= image.height) return 0.0;
          return image.at(yy, xx, ch);
        };
        const double v = fetch(y0, x0) * (1.0 - wx) * (1.0 - wy) +
                         fetch(y0, x0 + 1) * wx * (1.0 - wy) +
                         fetch(y0 + 1, x0) * (1.0 - wx) * wy +
                         fetch(y0 + 1, x0 + 1) * wx * wy;
        out.at(r, c, ch) = clip01(v);
      }
    }
  }
  return out;
}

RasterImage flip_horizontal(const RasterImage& image) {
  RasterImage out = image;
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c)
      for (int ch = 0; ch < image.channels; ++ch)
        out.at(r, c, ch) = image.at(r, image.width - 1 - c, ch);
  return out;
}

RasterImage flip_vertical(const RasterImage& image) {
  RasterImage out = image;
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c)
      for (int ch = 0; ch < image.channels; ++ch)
        out.at(r, c, ch) = image.at(image.height - 1 - r, c, ch);
  return out;
}

RasterImage average_pool2(const RasterImage& image) {
  const int h = image.height / 2, w = image.width / 2;
  RasterImage out = RasterImage::zeros(h, w, image.channels);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < image.channels; ++ch) {
        const double v = (static_cast<double>(image.at(2 * r, 2 * c, ch)) +
                          image.at(2 * r, 2 * c + 1, ch) + image.at(2 * r + 1, 2 * c, ch) +
                          image.at(2 * r + 1, 2 * c + 1, ch)) /
                         4.0;
        out.at(r, c, ch) = clip01(v);
      }
  return out;
}

RasterImage expand_to_rgb(const RasterImage& image) {
  if (image.channels == 3) return image;
  RasterImage out = RasterImage::zeros(image.height, image.width, 3);
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c) {
      const float v = image.at(r, c, 0);
      out.at(r, c, 0) = v;
      out.at(r, c, 1) = v;
      out.at(r, c, 2) = v;
    }
  return out;
}

RasterImage drop_color(const RasterImage& image) {
  if (image.channels == 1) return image;
  RasterImage out = image;
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c) {
      const float g = clip01(luma(image, r, c));
      out.at(r, c, 0) = g;
      out.at(r, c, 1) = g;
      out.at(r, c, 2) = g;
    }
  return out;
}

Eigen::RowVectorXd flatten(const RasterImage& image) {
  Eigen::RowVectorXd v(static_cast<Eigen::Index>(image.pixels.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = image.pixels[static_cast<std::size_t>(i)];
  return v;
}

RasterImage adjust_brightness(const RasterImage& image, double factor) {
  RasterImage out = image;
  for (auto& p : out.pixels) p = clip01(factor * static_cast<double>(p));
  return out;
}

RasterImage adjust_contrast(const RasterImage& image, double factor) {
  double mean = 0.0;
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c) mean += luma(image, r, c);
  mean /= static_cast<double>(image.height) * image.width;

  RasterImage out = image;
  for (auto& p : out.pixels) p = clip01(mean + factor * (static_cast<double>(p) - mean));
  return out;
}

RasterImage adjust_saturation(const RasterImage& image, double factor) {
  require_rgb(image, "saturation");
  RasterImage out = image;
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c) {
      const double g = luma(image, r, c);
      for (int ch = 0; ch < 3; ++ch) {
        out.at(r, c, ch) = clip01(g + factor * (image.at(r, c, ch) - g));
      }
    }
  return out;
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  v = mx;
  s = mx == 0.0 ? 0.0 : delta / mx;
  if (delta == 0.0) {
    h = 0.0;
    return;
  }
  if (mx == r) {
    h = (g - b) / delta;
  } else if (mx == g) {
    h = 2.0 + (b - r) / delta;
  } else {
    h = 4.0 + (r - g) / delta;
  }
  h /= 6.0;
  if (h < 0.0) h += 1.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  h -= std::floor(h);  // wrap into [0, 1)
  const double h6 = h * 6.0;
  const int sector = std::min(5, static_cast<int>(h6));
  const double f = h6 - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

RasterImage shift_hue(const RasterImage& image, double turns) {
  require_rgb(image, "hue");
  RasterImage out = image;
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c) {
      double h, s, v;
      rgb_to_hsv(image.at(r, c, 0), image.at(r, c, 1), image.at(r, c, 2), h, s, v);
      double rr, gg, bb;
      hsv_to_rgb(h + turns, s, v, rr, gg, bb);
      out.at(r, c, 0) = clip01(rr);
      out.at(r, c, 1) = clip01(gg);
      out.at(r, c, 2) = clip01(bb);
    }
  return out;
}

// ---------------------------------------------------------------------------

void validate(const AugmentationSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Brightness> || std::is_same_v<T, Contrast> ||
                      std::is_same_v<T, Saturation>) {
          if (s.strength < 0.0) throw config_error("strength must be >= 0");
        } else if constexpr (std::is_same_v<T, Hue>) {
          if (s.max_shift < 0.0 || s.max_shift > 0.5)
            throw config_error("hue max_shift must lie in [0, 0.5]");
        } else if constexpr (std::is_same_v<T, Rotation>) {
          if (s.lo_deg > s.hi_deg) throw config_error("rotation range is empty");
        } else if constexpr (std::is_same_v<T, Translate>) {
          if (s.max_frac_x < 0.0 || s.max_frac_x > 1.0 || s.max_frac_y < 0.0 ||
              s.max_frac_y > 1.0)
            throw config_error("translate fractions must lie in [0, 1]");
        } else if constexpr (std::is_same_v<T, Scale>) {
          if (s.lo <= 0.0 || s.lo > s.hi) throw config_error("scale range must be positive");
        } else if constexpr (std::is_same_v<T, Shear>) {
          if (s.x_lo_deg > s.x_hi_deg || s.y_lo_deg > s.y_hi_deg)
            throw config_error("shear range is empty");
        } else if constexpr (std::is_same_v<T, VFlip> || std::is_same_v<T, HFlip>) {
          if (s.p < 0.0 || s.p > 1.0) throw config_error("flip probability must lie in [0, 1]");
        } else if constexpr (std::is_same_v<T, UniformNoise>) {
          if (s.lo > s.hi) throw config_error("noise range is empty");
        }
      },
      spec);
}

std::string name(const AugmentationSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Brightness>) return "brightness";
        else if constexpr (std::is_same_v<T, Contrast>) return "contrast";
        else if constexpr (std::is_same_v<T, Saturation>) return "saturation";
        else if constexpr (std::is_same_v<T, Hue>) return "hue";
        else if constexpr (std::is_same_v<T, Rotation>) return "rotation";
        else if constexpr (std::is_same_v<T, Translate>) return "translate";
        else if constexpr (std::is_same_v<T, Scale>) return "scale";
        else if constexpr (std::is_same_v<T, Shear>) return "shear";
        else if constexpr (std::is_same_v<T, VFlip>) return "vflip";
        else if constexpr (std::is_same_v<T, HFlip>) return "hflip";
        else if constexpr (std::is_same_v<T, UniformNoise>) return "uniform_noise";
        else return "channel_permutation";
      },
      spec);
}

bool requires_rgb(const AugmentationSpec& spec) {
  return std::holds_alternative<Saturation>(spec) || std::holds_alternative<Hue>(spec) ||
         std::holds_alternative<ChannelPermutation>(spec);
}

RasterImage apply_augmentation(const AugmentationSpec& spec, const RasterImage& image, Rng& rng) {
  validate(spec);
  g_apply_count.fetch_add(1, std::memory_order_relaxed);
  if (requires_rgb(spec) && image.channels != 3) {
    throw channel_mismatch_error(name(spec) + " requires a 3-channel image");
  }

  return std::visit(
      [&](const auto& s) -> RasterImage {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Brightness>) {
          const double f = rng.uniform(std::max(0.0, 1.0 - s.strength), 1.0 + s.strength);
          return adjust_brightness(image, f);
        } else if constexpr (std::is_same_v<T, Contrast>) {
          const double f = rng.uniform(std::max(0.0, 1.0 - s.strength), 1.0 + s.strength);
          return adjust_contrast(image, f);
        } else if constexpr (std::is_same_v<T, Saturation>) {
          const double f = rng.uniform(std::max(0.0, 1.0 - s.strength), 1.0 + s.strength);
          return adjust_saturation(image, f);
        } else if constexpr (std::is_same_v<T, Hue>) {
          const double u = rng.uniform(-s.max_shift, s.max_shift);
          return shift_hue(image, u);
        } else if constexpr (std::is_same_v<T, Rotation>) {
          AffineParams p;
          p.angle_deg = rng.uniform(s.lo_deg, s.hi_deg);
          return affine_warp(image, p);
        } else if constexpr (std::is_same_v<T, Translate>) {
          AffineParams p;
          const double mx = s.max_frac_x * image.width;
          const double my = s.max_frac_y * image.height;
          p.translate_x = rng.uniform(-mx, mx);
          p.translate_y = rng.uniform(-my, my);
          return affine_warp(image, p);
        } else if constexpr (std::is_same_v<T, Scale>) {
          AffineParams p;
          p.scale = rng.uniform(s.lo, s.hi);
          return affine_warp(image, p);
        } else if constexpr (std::is_same_v<T, Shear>) {
          AffineParams p;
          p.shear_x_deg = rng.uniform(s.x_lo_deg, s.x_hi_deg);
          p.shear_y_deg = rng.uniform(s.y_lo_deg, s.y_hi_deg);
          return affine_warp(image, p);
        } else if constexpr (std::is_same_v<T, VFlip>) {
          return rng.bernoulli(s.p) ? flip_vertical(image) : image;
        } else if constexpr (std::is_same_v<T, HFlip>) {
          return rng.bernoulli(s.p) ? flip_horizontal(image) : image;
        } else if constexpr (std::is_same_v<T, UniformNoise>) {
          RasterImage out = image;
          const auto n = static_cast<long long>(out.pixels.size());
          for (int idx : s.dims) {
            if (idx < 0 || idx >= n) {
              throw invalid_index_error("noise index " + std::to_string(idx) + " out of range");
            }
            const double u = rng.uniform(s.lo, s.hi);
            out.pixels[static_cast<std::size_t>(idx)] =
                clip01(static_cast<double>(out.pixels[static_cast<std::size_t>(idx)]) + u);
          }
          return out;
        } else {  // ChannelPermutation
          static const std::array<std::array<int, 3>, 6> kPerms = {{{0, 1, 2},
                                                                    {0, 2, 1},
                                                                    {1, 0, 2},
                                                                    {1, 2, 0},
                                                                    {2, 0, 1},
                                                                    {2, 1, 0}}};
          return apply_channel_permutation(image, kPerms[rng.uniform_below(6)]);
        }
      },
      spec);
}

Eigen::RowVectorXd vector_uniform_noise(const Eigen::RowVectorXd& x, const std::vector<int>& dims,
                                        double lo, double hi, Rng& rng) {
  if (lo > hi) throw config_error("noise range is empty");
  g_apply_count.fetch_add(1, std::memory_order_relaxed);
  Eigen::RowVectorXd out = x;
  for (int idx : dims) {
    if (idx < 0 || idx >= x.size()) {
      throw invalid_index_error("noise index " + std::to_string(idx) + " out of range");
    }
    out(idx) += rng.uniform(lo, hi);
  }
  return out;
}

RasterImage channel_permute(const RasterImage& image, Rng& rng) {
  if (image.channels != 3) throw channel_mismatch_error("channel permutation requires 3 channels");
  static const std::array<std::array<int, 3>, 6> kPerms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  return apply_channel_permutation(image, kPerms[rng.uniform_below(6)]);
}

RasterImage apply_channel_permutation(const RasterImage& image, const std::array<int, 3>& perm) {
  if (image.channels != 3) throw channel_mismatch_error("channel permutation requires 3 channels");
  RasterImage out = image;
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c)
      for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = image.at(r, c, perm[ch]);
  return out;
}

std::vector<AugmentationSpec> default_augmentation_list() {
  return {
      Brightness{1.0},
      Contrast{10.0},
      Saturation{10.0},
      Hue{0.5},
      Rotation{0.0, 359.0},
      Translate{0.2, 0.2},
      Scale{0.8, 1.2},
      Shear{-10.0, 10.0, -10.0, 10.0},
      VFlip{0.5},
      HFlip{0.5},
  };
}

std::uint64_t augmentation_apply_count() {
  return g_apply_count.load(std::memory_order_relaxed);
}

}  // namespace causalaug::aug
