#include "causalaug/equivariance.hpp"

#include <algorithm>
#include <cmath>

#include "causalaug/errors.hpp"

namespace causalaug::equivariance {

PermutationMatrix::PermutationMatrix(std::vector<int> perm) : perm_(std::move(perm)) {
  std::vector<bool> seen(perm_.size(), false);
  for (int p : perm_) {
    if (p < 0 || p >= static_cast<int>(perm_.size()) || seen[static_cast<std::size_t>(p)]) {
      throw invalid_dimension_error("permutation is not a bijection on {0..n-1}");
    }
    seen[static_cast<std::size_t>(p)] = true;
  }
}

PermutationMatrix PermutationMatrix::identity(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  return PermutationMatrix(std::move(p));
}

PermutationMatrix PermutationMatrix::random(int n, Rng& rng) {
  const auto order = rng.permutation(static_cast<std::size_t>(n));
  std::vector<int> p(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) p[i] = static_cast<int>(order[i]);
  return PermutationMatrix(std::move(p));
}

bool PermutationMatrix::is_identity() const {
  for (int i = 0; i < size(); ++i) {
    if (perm_[static_cast<std::size_t>(i)] != i) return false;
  }
  return true;
}

Vec PermutationMatrix::apply(const Vec& x) const {
  if (x.size() != size()) throw invalid_dimension_error("permutation size does not match vector");
  Vec out(x.size());
  for (int i = 0; i < size(); ++i) out(i) = x(perm_[static_cast<std::size_t>(i)]);
  return out;
}

Mat PermutationMatrix::apply_rows(const Mat& m) const {
  if (m.rows() != size()) throw invalid_dimension_error("permutation size does not match rows");
  Mat out(m.rows(), m.cols());
  for (int i = 0; i < size(); ++i) out.row(i) = m.row(perm_[static_cast<std::size_t>(i)]);
  return out;
}

PermutationMatrix PermutationMatrix::compose(const PermutationMatrix& other) const {
  if (size() != other.size()) throw invalid_dimension_error("permutation sizes differ");
  // (A1 A2 x)_i = x_{p2(p1(i))}
  std::vector<int> q(perm_.size());
  for (int i = 0; i < size(); ++i) {
    q[static_cast<std::size_t>(i)] =
        other.perm_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
  }
  return PermutationMatrix(std::move(q));
}

PermutationMatrix PermutationMatrix::inverse() const {
  std::vector<int> q(perm_.size());
  for (int i = 0; i < size(); ++i) q[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = i;
  return PermutationMatrix(std::move(q));
}

Vec generate_x(const LinearCausalProcess& proc, const Vec& h_d, const Vec& h_y) {
  if (proc.c.cols() != h_d.size() || proc.d.cols() != h_y.size() ||
      proc.c.rows() != proc.d.rows() || proc.e.size() != proc.c.rows()) {
    throw invalid_dimension_error("generate_x: dimensions do not conform");
  }
  return proc.c * h_d + proc.d * h_y + proc.e;
}

Vec augment_linear(const PermutationMatrix& a, const Vec& x) {
  return a.apply(x);
}

Vec induced_intervention(const LinearCausalProcess& proc, const PermutationMatrix& a,
                         const Vec& h_d, double min_rcond) {
  if (proc.c.rows() != proc.c.cols()) {
    throw invalid_dimension_error("induced intervention needs a square C");
  }
  if (h_d.size() != proc.c.cols() || a.size() != proc.c.rows()) {
    throw invalid_dimension_error("induced intervention: dimensions do not conform");
  }
  if (a.is_identity()) return h_d;  // C^-1 I C = I, no solve needed

  Eigen::PartialPivLU<Mat> lu(proc.c);
  const double rc = lu.rcond();
  if (!(rc >= min_rcond)) throw singular_matrix_error(rc);
  return lu.solve(a.apply(proc.c * h_d));
}

EquivarianceReport check_equivariance(const LinearCausalProcess& proc, const PermutationMatrix& a,
                                      int trials, double tolerance, Rng& rng) {
  if (trials < 1) throw invalid_dimension_error("trials must be >= 1");
  if (a.size() != proc.c.rows()) {
    throw invalid_dimension_error("permutation size does not match process output");
  }

  EquivarianceReport report;
  report.condition_ad_eq_d = a.apply_rows(proc.d) == proc.d;
  report.condition_ae_eq_e = a.apply(proc.e) == proc.e;

  const auto k = proc.c.cols();
  const auto m = proc.d.cols();
  for (int t = 0; t < trials; ++t) {
    Vec h_d(k), h_y(m);
    for (Eigen::Index i = 0; i < k; ++i) h_d(i) = rng.normal();
    for (Eigen::Index i = 0; i < m; ++i) h_y(i) = rng.normal();

    const Vec augmented = augment_linear(a, generate_x(proc, h_d, h_y));
    const Vec intervened = generate_x(proc, induced_intervention(proc, a, h_d), h_y);

    report.max_abs_residual =
        std::max(report.max_abs_residual, (augmented - intervened).cwiseAbs().maxCoeff());
    report.max_magnitude = std::max({report.max_magnitude, h_d.cwiseAbs().maxCoeff(),
                                     h_y.cwiseAbs().maxCoeff(), augmented.cwiseAbs().maxCoeff(),
                                     intervened.cwiseAbs().maxCoeff()});
  }
  report.holds = report.max_abs_residual <= tolerance;
  return report;
}

}  // namespace causalaug::equivariance
