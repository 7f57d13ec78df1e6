#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "causalaug/rng.hpp"

namespace causalaug::aug {

// H x W x C image, row-major, channel-interleaved, values kept in [0, 1].
struct RasterImage {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<float> pixels;

  static RasterImage zeros(int height, int width, int channels);

  float& at(int r, int c, int ch) {
    return pixels[static_cast<std::size_t>((r * width + c) * channels + ch)];
  }
  float at(int r, int c, int ch) const {
    return pixels[static_cast<std::size_t>((r * width + c) * channels + ch)];
  }
  std::size_t pixel_count() const { return pixels.size(); }
  bool same_shape(const RasterImage& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

struct AffineParams {
  double angle_deg = 0.0;
  double translate_x = 0.0;  // pixels
  double translate_y = 0.0;
  double scale = 1.0;
  double shear_x_deg = 0.0;
  double shear_y_deg = 0.0;
};

/// Warps about the image center, composition scale -> shear -> rotate ->
/// translate, bilinear interpolation, out-of-bounds fill 0. Positive angles
/// rotate counterclockwise. Identity parameters reproduce the input exactly.
RasterImage affine_warp(const RasterImage& image, const AffineParams& params);

RasterImage flip_horizontal(const RasterImage& image);
RasterImage flip_vertical(const RasterImage& image);

/// 2x2 average pooling (odd trailing row/column dropped); used by fast mode.
RasterImage average_pool2(const RasterImage& image);

/// Replicates a single-channel image into three channels.
RasterImage expand_to_rgb(const RasterImage& image);

/// Replaces each pixel with its luma in every channel, removing color.
RasterImage drop_color(const RasterImage& image);

/// Row-major flatten to doubles (model input).
Eigen::RowVectorXd flatten(const RasterImage& image);

// Deterministic color adjustments (the random sampling lives in
// apply_augmentation). All compute in double and clip to [0, 1].
RasterImage adjust_brightness(const RasterImage& image, double factor);
RasterImage adjust_contrast(const RasterImage& image, double factor);
RasterImage adjust_saturation(const RasterImage& image, double factor);  // 3 channels
RasterImage shift_hue(const RasterImage& image, double turns);           // 3 channels

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v);
void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b);

// ---------------------------------------------------------------------------
// Stochastic augmentation specs. Each application samples one transform from
// the spec's parameter ranges and acts on the image.
// ---------------------------------------------------------------------------

struct Brightness { double strength = 0.0; };
struct Contrast   { double strength = 0.0; };
struct Saturation { double strength = 0.0; };
struct Hue        { double max_shift = 0.0; };  // turns, in [0, 0.5]
struct Rotation   { double lo_deg = 0.0, hi_deg = 0.0; };
struct Translate  { double max_frac_x = 0.0, max_frac_y = 0.0; };
struct Scale      { double lo = 1.0, hi = 1.0; };
struct Shear      { double x_lo_deg = 0.0, x_hi_deg = 0.0, y_lo_deg = 0.0, y_hi_deg = 0.0; };
struct VFlip      { double p = 0.0; };
struct HFlip      { double p = 0.0; };
struct UniformNoise {
  double lo = 0.0, hi = 0.0;
  std::vector<int> dims;  // flat indices the noise is added to
};
struct ChannelPermutation {};

using AugmentationSpec = std::variant<Brightness, Contrast, Saturation, Hue, Rotation, Translate,
                                      Scale, Shear, VFlip, HFlip, UniformNoise, ChannelPermutation>;

/// Throws if a range is empty, a probability is outside [0,1], etc.
void validate(const AugmentationSpec& spec);

/// Short lowercase tag: "brightness", "rotation", "hflip", ...
std::string name(const AugmentationSpec& spec);

/// True for transforms that only make sense on 3-channel images.
bool requires_rgb(const AugmentationSpec& spec);

/// Samples the spec's random parameters and applies the transform. Output has
/// the input's shape and stays within [0, 1].
RasterImage apply_augmentation(const AugmentationSpec& spec, const RasterImage& image, Rng& rng);

/// Adds u_i ~ U[lo, hi] i.i.d. to x[i] for every i in dims; other entries pass
/// through untouched.
Eigen::RowVectorXd vector_uniform_noise(const Eigen::RowVectorXd& x, const std::vector<int>& dims,
                                        double lo, double hi, Rng& rng);

/// Applies one of the six channel permutations of a 3-channel image,
/// sampled uniformly.
RasterImage channel_permute(const RasterImage& image, Rng& rng);
RasterImage apply_channel_permutation(const RasterImage& image, const std::array<int, 3>& perm);

/// The standard ten candidates with their default hyperparameters:
/// brightness, contrast, saturation, hue, rotation, translate, scale, shear,
/// vflip, hflip.
std::vector<AugmentationSpec> default_augmentation_list();

/// Total number of augmentation applications since process start (counts
/// apply_augmentation and vector_uniform_noise). Test instrumentation.
std::uint64_t augmentation_apply_count();

}  // namespace causalaug::aug
