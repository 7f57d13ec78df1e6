#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "causalaug/rng.hpp"

namespace causalaug::scm {

using Vec = Eigen::RowVectorXd;
using Mat = Eigen::MatrixXd;

// Linear-Gaussian generative process with a hidden confounder:
//
//   c   := N(0, sigma_c^2 I)
//   d   := c * w_cd + N(0, sigma^2 I)
//   y   := c * w_cy + N(0, sigma^2 I)
//   h_d := d * w_dh + N(0, sigma^2 I)
//   h_y := y * w_yh + N(0, sigma^2 I)
//
// Samples are row vectors; node := parent * W + noise.
struct LinearGaussianScm {
  int dim = 0;
  Mat w_cd, w_cy, w_dh, w_yh;  // each dim x dim
  double sigma_c = 1.0;
  double sigma = 0.1;
};

struct ScmSample {
  Vec c, d, y, h_d, h_y;  // length dim each
  Vec x;                  // [h_d, h_y], length 2*dim
  double target = 0.0;    // sum of y entries
};

enum class Node { D, Hd, Hy, Y };

struct StandardNormalNoise {};
struct UniformNoise {
  double lo = 0.0, hi = 0.0;
};
using NoiseDistribution = std::variant<StandardNormalNoise, UniformNoise>;

struct Fixed {
  Vec value;
};
struct Noise {
  NoiseDistribution distribution;
};
using InterventionKind = std::variant<Fixed, Noise>;

// Replaces one node's structural assignment with a fixed vector or a fresh
// noise draw per sample; descendants are generated from the intervened value.
struct InterventionSpec {
  Node node = Node::D;
  InterventionKind kind = Noise{StandardNormalNoise{}};
};

/// SCM with all four weight matrices drawn i.i.d. standard normal.
LinearGaussianScm random_scm(int dim, double sigma_c, double sigma, Rng& rng);

std::vector<ScmSample> sample_observational(const LinearGaussianScm& scm, int n, Rng& rng);

std::vector<ScmSample> sample_interventional(const LinearGaussianScm& scm,
                                             const InterventionSpec& spec, int n, Rng& rng);

/// Stacks samples into (X, target) with X rows = [h_d, h_y].
void to_regression(const std::vector<ScmSample>& samples, Eigen::MatrixXd& x,
                   Eigen::VectorXd& target);

}  // namespace causalaug::scm
