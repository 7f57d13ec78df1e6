#include "causalaug/scm.hpp"

#include "causalaug/errors.hpp"

namespace causalaug::scm {

namespace {

Vec gaussian_row(int dim, double scale, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = scale * rng.normal();
  return v;
}

Vec draw_intervention_value(const InterventionKind& kind, int dim, Rng& rng) {
  if (const auto* fixed = std::get_if<Fixed>(&kind)) {
    if (fixed->value.size() != dim) {
      throw invalid_dimension_error("intervention value has length " +
                                    std::to_string(fixed->value.size()) + ", expected " +
                                    std::to_string(dim));
    }
    return fixed->value;
  }
  const auto& noise = std::get<Noise>(kind);
  Vec v(dim);
  if (std::holds_alternative<StandardNormalNoise>(noise.distribution)) {
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
  } else {
    const auto& u = std::get<UniformNoise>(noise.distribution);
    for (int i = 0; i < dim; ++i) v(i) = rng.uniform(u.lo, u.hi);
  }
  return v;
}

ScmSample generate_one(const LinearGaussianScm& scm, const InterventionSpec* spec, Rng& rng) {
  const int dim = scm.dim;
  ScmSample s;
  s.c = gaussian_row(dim, scm.sigma_c, rng);

  if (spec && spec->node == Node::D) {
    s.d = draw_intervention_value(spec->kind, dim, rng);
  } else {
    s.d = s.c * scm.w_cd + gaussian_row(dim, scm.sigma, rng);
  }

  if (spec && spec->node == Node::Y) {
    s.y = draw_intervention_value(spec->kind, dim, rng);
  } else {
    s.y = s.c * scm.w_cy + gaussian_row(dim, scm.sigma, rng);
  }

  if (spec && spec->node == Node::Hd) {
    s.h_d = draw_intervention_value(spec->kind, dim, rng);
  } else {
    s.h_d = s.d * scm.w_dh + gaussian_row(dim, scm.sigma, rng);
  }

  if (spec && spec->node == Node::Hy) {
    s.h_y = draw_intervention_value(spec->kind, dim, rng);
  } else {
    s.h_y = s.y * scm.w_yh + gaussian_row(dim, scm.sigma, rng);
  }

  s.x.resize(2 * dim);
  s.x << s.h_d, s.h_y;
  s.target = s.y.sum();
  return s;
}

}  // namespace

LinearGaussianScm random_scm(int dim, double sigma_c, double sigma, Rng& rng) {
  if (dim < 1) throw invalid_dimension_error("scm dimension must be >= 1");
  if (sigma_c < 0 || sigma < 0) throw invalid_dimension_error("noise scales must be >= 0");
  LinearGaussianScm scm;
  scm.dim = dim;
  scm.sigma_c = sigma_c;
  scm.sigma = sigma;
  auto draw = [&](Mat& m) {
    m.resize(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) m(r, c) = rng.normal();
  };
  draw(scm.w_cd);
  draw(scm.w_cy);
  draw(scm.w_dh);
  draw(scm.w_yh);
  return scm;
}

std::vector<ScmSample> sample_observational(const LinearGaussianScm& scm, int n, Rng& rng) {
  if (n < 1) throw invalid_dimension_error("sample count must be >= 1");
  std::vector<ScmSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(generate_one(scm, nullptr, rng));
  return out;
}

std::vector<ScmSample> sample_interventional(const LinearGaussianScm& scm,
                                             const InterventionSpec& spec, int n, Rng& rng) {
  if (n < 1) throw invalid_dimension_error("sample count must be >= 1");
  std::vector<ScmSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(generate_one(scm, &spec, rng));
  return out;
}

void to_regression(const std::vector<ScmSample>& samples, Eigen::MatrixXd& x,
                   Eigen::VectorXd& target) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n == 0) {
    x.resize(0, 0);
    target.resize(0);
    return;
  }
  const auto p = samples.front().x.size();
  x.resize(n, p);
  target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = samples[static_cast<std::size_t>(i)].x;
    target(i) = samples[static_cast<std::size_t>(i)].target;
  }
}

}  // namespace causalaug::scm
