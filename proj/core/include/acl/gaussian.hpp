#pragma once

#include <nlohmann/json.hpp>

#include "acl/rng.hpp"
#include "acl/task_space.hpp"

namespace acl {

/// Multivariate normal in task units. When `diagonal` is set, off-diagonal
/// covariance entries are zero and stay zero under updates.
struct GaussianDist {
  Vec mean;
  Mat covariance;
  bool diagonal = false;

  static GaussianDist from_stddev(const Vec& mean, const Vec& stddev);

  std::size_t dims() const { return static_cast<std::size_t>(mean.size()); }
  Vec stddev() const { return covariance.diagonal().cwiseSqrt(); }

  Vec sample(Rng& rng) const;

  nlohmann::json to_json() const;
  static GaussianDist from_json(const nlohmann::json& j);
};

// Draw from N(mean, cov). A jitter is added to the diagonal if cov is not
// numerically positive definite.
Vec sample_gaussian(const Vec& mean, const Mat& cov, Rng& rng);

// Closed-form KL(p || q) between multivariate normals.
double kl_divergence(const GaussianDist& p, const GaussianDist& q);

// KL(p || q) for diagonal normals given as means and variances.
double kl_diagonal(const Vec& mean_p, const Vec& var_p, const Vec& mean_q, const Vec& var_q);

}  // namespace acl
