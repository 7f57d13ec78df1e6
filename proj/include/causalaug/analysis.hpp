#pragma once

#include <vector>

namespace causalaug::analysis {

// Finite discrete distribution; entries nonnegative and summing to 1
// within 1e-9 (validated at construction).
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probabilities);

  /// Normalizes nonnegative counts into a distribution.
  static DiscreteDistribution from_counts(const std::vector<double>& counts);

  const std::vector<double>& probabilities() const { return p_; }
  std::size_t size() const { return p_.size(); }

 private:
  std::vector<double> p_;
};

/// Jensen-Shannon divergence, base 2 (so the value lies in [0, 1]),
/// with the 0 * log 0 = 0 convention. Symmetric by construction.
double jsd(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// sqrt(jsd): the metric form, satisfying the triangle inequality.
double jsd_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

struct BoundReport {
  double lhs = 0.0;  // sum of pairwise jsd_distance between label marginals
  double rhs = 0.0;  // 2 * sum of sqrt(per-domain risk)
  bool holds = false;
};

// Joint-risk lower bound under a domain-invariant representation: the sum of
// pairwise label-marginal distances must not exceed twice the sum of square
// roots of the per-domain risks. `holds` is lhs <= rhs + 1e-9.
BoundReport invariance_bound(const std::vector<DiscreteDistribution>& label_marginals,
                             const std::vector<double>& risks);

}  // namespace causalaug::analysis
