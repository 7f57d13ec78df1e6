#include "causalaug/analysis.hpp"

#include <cmath>

#include "causalaug/errors.hpp"

namespace causalaug::analysis {

DiscreteDistribution::DiscreteDistribution(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
  if (p_.empty()) throw invalid_dimension_error("distribution must have at least one entry");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw invalid_dimension_error("distribution entries must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw invalid_dimension_error("distribution entries must sum to 1 (got " +
                                  std::to_string(sum) + ")");
  }
}

DiscreteDistribution DiscreteDistribution::from_counts(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) throw invalid_dimension_error("counts must have positive total");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = counts[i] / total;
  return DiscreteDistribution(std::move(p));
}

double jsd(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const auto& a = p.probabilities();
  const auto& b = q.probabilities();
  if (a.size() != b.size()) {
    throw invalid_dimension_error("jsd: distributions have different support sizes");
  }
  // Summing 0.5*(term_p + term_q) per index keeps jsd(p,q) == jsd(q,p) exact.
  auto term = [](double v, double m) {
    if (v == 0.0) return 0.0;
    return v * std::log2(v / m);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double m = 0.5 * (a[i] + b[i]);
    if (m == 0.0) continue;
    total += 0.5 * (term(a[i], m) + term(b[i], m));
  }
  if (total < 0.0) total = 0.0;  // guard tiny negative rounding
  return total;
}

double jsd_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  return std::sqrt(jsd(p, q));
}

BoundReport invariance_bound(const std::vector<DiscreteDistribution>& label_marginals,
                             const std::vector<double>& risks) {
  if (label_marginals.size() != risks.size()) {
    throw invalid_dimension_error("invariance_bound: marginals and risks differ in length");
  }
  if (label_marginals.size() < 2) {
    throw invalid_dimension_error("invariance_bound: need at least two domains");
  }
  for (double r : risks) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw invalid_dimension_error("invariance_bound: risks must lie in [0, 1]");
    }
  }
  BoundReport report;
  for (std::size_t i = 0; i < label_marginals.size(); ++i) {
    for (std::size_t j = i + 1; j < label_marginals.size(); ++j) {
      report.lhs += jsd_distance(label_marginals[i], label_marginals[j]);
    }
  }
  for (double r : risks) report.rhs += 2.0 * std::sqrt(r);
  report.holds = report.lhs <= report.rhs + 1e-9;
  return report;
}

}  // namespace causalaug::analysis
