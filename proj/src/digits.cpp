#include "causalaug/digits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "causalaug/errors.hpp"

namespace causalaug::digits {

namespace {

struct Point {
  double x, y;
};
using Stroke = std::vector<Point>;   // polyline
using Glyph = std::vector<Stroke>;

void add_arc(Glyph& glyph, double cx, double cy, double rx, double ry, double a0_deg,
             double a1_deg, int segments = 14) {
  Stroke s;
  for (int i = 0; i <= segments; ++i) {
    const double a = (a0_deg + (a1_deg - a0_deg) * i / segments) * std::numbers::pi / 180.0;
    // y grows downward, so the minus keeps positive angles pointing up.
    s.push_back({cx + rx * std::cos(a), cy - ry * std::sin(a)});
  }
  glyph.push_back(std::move(s));
}

void add_line(Glyph& glyph, double x0, double y0, double x1, double y1) {
  glyph.push_back({{x0, y0}, {x1, y1}});
}

// Stroke templates in the unit square (x right, y down), upright digits.
Glyph glyph_template(int digit) {
  Glyph g;
  switch (digit) {
    case 0:
      add_arc(g, 0.50, 0.50, 0.22, 0.36, 90.0, 450.0, 24);
      break;
    case 1:
      add_line(g, 0.52, 0.12, 0.52, 0.88);
      add_line(g, 0.38, 0.28, 0.52, 0.12);
      break;
    case 2:
      add_arc(g, 0.50, 0.32, 0.22, 0.20, 170.0, -10.0);
      add_line(g, 0.72, 0.36, 0.27, 0.88);
      add_line(g, 0.27, 0.88, 0.75, 0.88);
      break;
    case 3:
      add_arc(g, 0.47, 0.30, 0.20, 0.18, 150.0, -70.0);
      add_arc(g, 0.47, 0.66, 0.22, 0.21, 70.0, -150.0);
      break;
    case 4:
      add_line(g, 0.60, 0.12, 0.26, 0.60);
      add_line(g, 0.26, 0.60, 0.76, 0.60);
      add_line(g, 0.63, 0.34, 0.63, 0.88);
      break;
    case 5:
      add_line(g, 0.70, 0.14, 0.32, 0.14);
      add_line(g, 0.32, 0.14, 0.30, 0.46);
      add_arc(g, 0.47, 0.64, 0.21, 0.20, 120.0, -140.0);
      break;
    case 6:
      add_arc(g, 0.54, 0.42, 0.28, 0.30, 70.0, 180.0);
      add_line(g, 0.26, 0.42, 0.28, 0.64);
      add_arc(g, 0.48, 0.66, 0.20, 0.19, 180.0, -180.0, 20);
      break;
    case 7:
      add_line(g, 0.26, 0.14, 0.74, 0.14);
      add_line(g, 0.74, 0.14, 0.42, 0.88);
      break;
    case 8:
      add_arc(g, 0.50, 0.30, 0.17, 0.16, 90.0, 450.0, 20);
      add_arc(g, 0.50, 0.67, 0.21, 0.20, 90.0, 450.0, 20);
      break;
    case 9:
      add_arc(g, 0.50, 0.33, 0.19, 0.18, 90.0, 450.0, 20);
      add_line(g, 0.69, 0.36, 0.60, 0.88);
      break;
    default:
      throw invalid_index_error("digit must lie in 0..9");
  }
  return g;
}

double point_segment_distance(double px, double py, const Point& a, const Point& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = px - a.x, wy = py - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

aug::RasterImage render_digit(int digit, int side, Rng& rng) {
  Glyph glyph = glyph_template(digit);

  // Per-sample handwriting variation: control-point jitter plus a small
  // whole-glyph affine about the box center.
  const double angle = rng.uniform(-8.0, 8.0) * std::numbers::pi / 180.0;
  const double scale = rng.uniform(0.88, 1.08);
  const double aspect = rng.uniform(0.93, 1.07);
  const double shear = std::tan(rng.uniform(-6.0, 6.0) * std::numbers::pi / 180.0);
  const double tx = rng.uniform(-0.05, 0.05);
  const double ty = rng.uniform(-0.05, 0.05);
  const double ca = std::cos(angle), sa = std::sin(angle);

  for (auto& stroke : glyph) {
    for (auto& p : stroke) {
      double x = p.x + rng.normal(0.0, 0.012) - 0.5;
      double y = p.y + rng.normal(0.0, 0.012) - 0.5;
      x = (x + shear * y) * scale * aspect;
      y = y * scale;
      const double rx = ca * x + sa * y;
      const double ry = -sa * x + ca * y;
      p.x = rx + 0.5 + tx;
      p.y = ry + 0.5 + ty;
    }
  }

  const double thickness = rng.uniform(0.040, 0.062) * side;
  const double peak = rng.uniform(0.82, 1.0);
  const double aa = 0.9;  // antialias ramp, pixels

  aug::RasterImage img = aug::RasterImage::zeros(side, side, 1);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      double best = 1e9;
      for (const auto& stroke : glyph) {
        for (std::size_t i = 0; i + 1 < stroke.size(); ++i) {
          const Point a{stroke[i].x * (side - 1), stroke[i].y * (side - 1)};
          const Point b{stroke[i + 1].x * (side - 1), stroke[i + 1].y * (side - 1)};
          best = std::min(best, point_segment_distance(c, r, a, b));
        }
      }
      const double v = std::clamp((thickness - best) / aa + 0.5, 0.0, 1.0) * peak;
      img.at(r, c, 0) = static_cast<float>(v);
    }
  }
  return img;
}

namespace {

void render_split(int n, int side, Rng& rng, datasets::IdxArray& images,
                  datasets::IdxArray& labels) {
  std::vector<int> classes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) classes[static_cast<std::size_t>(i)] = i % 10;
  rng.shuffle(classes);

  images.magic = datasets::kIdxImagesMagic;
  images.dims = {static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(side),
                 static_cast<std::uint32_t>(side)};
  images.data.resize(static_cast<std::size_t>(n) * side * side);
  labels.magic = datasets::kIdxLabelsMagic;
  labels.dims = {static_cast<std::uint32_t>(n)};
  labels.data.resize(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    const int digit = classes[static_cast<std::size_t>(i)];
    const aug::RasterImage img = render_digit(digit, side, rng);
    labels.data[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(digit);
    std::uint8_t* dst = images.data.data() + static_cast<std::size_t>(i) * side * side;
    for (std::size_t p = 0; p < img.pixels.size(); ++p) {
      dst[p] = static_cast<std::uint8_t>(std::lround(img.pixels[p] * 255.0f));
    }
  }
}

}  // namespace

Corpus render_corpus(const CorpusOptions& options, Rng& rng) {
  if (options.train_n < 10 || options.test_n < 10 || options.side < 8) {
    throw config_error("corpus needs at least 10 samples per split and side >= 8");
  }
  Corpus corpus;
  render_split(options.train_n, options.side, rng, corpus.train_images, corpus.train_labels);
  render_split(options.test_n, options.side, rng, corpus.test_images, corpus.test_labels);
  return corpus;
}

}  // namespace causalaug::digits
