#pragma once

#include "causalaug/datasets.hpp"
#include "causalaug/rng.hpp"

namespace causalaug::digits {

// Deterministic handwritten-style digit corpus rendered from stroke
// templates with per-sample jitter (control-point noise, small affine,
// stroke thickness). Emitted in the same IDX containers as the standard
// digit files, so the whole pipeline downstream of parse_idx is identical
// whether the data came from disk or from this renderer.
struct CorpusOptions {
  int train_n = 12000;
  int test_n = 2000;
  int side = 28;
};

struct Corpus {
  datasets::IdxArray train_images, train_labels;
  datasets::IdxArray test_images, test_labels;
};

/// One rendered digit in [0,1] grayscale.
aug::RasterImage render_digit(int digit, int side, Rng& rng);

/// Balanced corpus (each class appears floor(n/10) or one more time), order
/// shuffled.
Corpus render_corpus(const CorpusOptions& options, Rng& rng);

}  // namespace causalaug::digits
