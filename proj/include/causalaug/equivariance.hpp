#pragma once

#include <Eigen/Dense>
#include <vector>

#include "causalaug/rng.hpp"

namespace causalaug::equivariance {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Linear generative map x = C h_d + D h_y + e (column vectors).
struct LinearCausalProcess {
  Mat c;  // n x k
  Mat d;  // n x m
  Vec e;  // n
};

// Permutation stored as an index map p; acting as the matrix A with
// (A x)_i = x_{p(i)}.
class PermutationMatrix {
 public:
  explicit PermutationMatrix(std::vector<int> perm);
  static PermutationMatrix identity(int n);
  static PermutationMatrix random(int n, Rng& rng);

  int size() const { return static_cast<int>(perm_.size()); }
  bool is_identity() const;
  const std::vector<int>& indices() const { return perm_; }

  Vec apply(const Vec& x) const;
  Mat apply_rows(const Mat& m) const;

  /// Matrix product A_this * A_other as a permutation.
  PermutationMatrix compose(const PermutationMatrix& other) const;
  PermutationMatrix inverse() const;

 private:
  std::vector<int> perm_;
};

struct EquivarianceReport {
  double max_abs_residual = 0.0;
  double max_magnitude = 0.0;  // largest |entry| seen among inputs and outputs
  bool condition_ad_eq_d = false;
  bool condition_ae_eq_e = false;
  bool holds = false;  // max_abs_residual <= tolerance passed to the check
};

/// x = C h_d + D h_y + e.
Vec generate_x(const LinearCausalProcess& proc, const Vec& h_d, const Vec& h_y);

/// A x.
Vec augment_linear(const PermutationMatrix& a, const Vec& x);

/// C^-1 A C h_d. C must be square with reciprocal condition estimate at least
/// `min_rcond`; throws singular_matrix_error otherwise.
Vec induced_intervention(const LinearCausalProcess& proc, const PermutationMatrix& a,
                         const Vec& h_d, double min_rcond = 1e-10);

/// Draws `trials` standard-normal (h_d, h_y) pairs and compares the two paths
/// of the diagram: augmenting the generated x versus generating from the
/// induced intervention. Also reports whether A D = D and A e = e hold as
/// exact entrywise equalities.
EquivarianceReport check_equivariance(const LinearCausalProcess& proc, const PermutationMatrix& a,
                                      int trials, double tolerance, Rng& rng);

}  // namespace causalaug::equivariance
