#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "acl/rng.hpp"
#include "acl/task_space.hpp"

namespace acl {

struct GaussianComponent {
  double weight = 0.0;
  Vec mean;
  Mat covariance;
};

/// Full-covariance Gaussian mixture together with the trace of the EM fit
/// that produced it.
struct GaussianMixture {
  std::vector<GaussianComponent> components;
  // Log-likelihood of the fit data after each EM iteration (first entry is
  // the initialization). Each component density carries the factor
  // exp(-lambda/2 tr(inv(Sigma))) of the covariance regularization lambda,
  // which makes the trace non-decreasing.
  std::vector<double> log_likelihood_trace;

  std::size_t size() const { return components.size(); }
  std::size_t dims() const {
    return components.empty() ? 0 : static_cast<std::size_t>(components.front().mean.size());
  }
  double log_likelihood() const {
    return log_likelihood_trace.empty() ? 0.0 : log_likelihood_trace.back();
  }

  // Rows are points; returns n x k posterior responsibilities.
  Mat responsibilities(const Mat& points) const;
  double log_likelihood(const Mat& points) const;

  // Index drawn in proportion to the component weights.
  std::size_t pick_component(Rng& rng) const;
  Vec sample(Rng& rng) const;

  nlohmann::json to_json() const;
};

struct EmOptions {
  std::size_t max_iterations = 100;
  double relative_tolerance = 1e-6;
  double covariance_regularization = 1e-6;  // lambda, added to every covariance
};

// Fits k components to the rows of `points` by EM, seeded with farthest-point
// initialization. Throws std::invalid_argument when rows < k or k == 0.
GaussianMixture em_fit(const Mat& points, std::size_t k, Rng& rng, const EmOptions& options = {});

// Number of free parameters of a k-component, D-dimensional full-covariance
// mixture.
std::size_t mixture_parameter_count(std::size_t k, std::size_t dims);

double aic(const GaussianMixture& mixture);

// Fits k = 2..k_max (capped at the point count) and keeps the lowest AIC;
// ties keep the smaller k.
GaussianMixture select_k_by_aic(const Mat& points, std::size_t k_max, Rng& rng,
                                const EmOptions& options = {});

// Picks an index with probability proportional to `scores` (negative entries
// count as zero); uniform when every score is zero.
std::size_t pick_proportional(const std::vector<double>& scores, Rng& rng);

// Stacks a list of vectors as the rows of a matrix.
Mat stack_rows(const std::vector<Vec>& rows);

}  // namespace acl
