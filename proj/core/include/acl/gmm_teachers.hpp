#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "acl/gmm.hpp"
#include "acl/teacher.hpp"

namespace acl {

struct AlpGmmParams {
  std::size_t fit_every = 150;  // n
  std::size_t max_k = 10;
  double random_ratio = 0.05;  // r_p
  // Returns are rescaled to [0, 1] over this range before computing ALP.
  double return_low = -100.0;
  double return_high = 300.0;

  static AlpGmmParams from_table(const HyperParams& params);
};

struct CovarGmmParams {
  std::size_t fit_every = 150;  // n
  std::size_t max_k = 15;
  double random_ratio = 0.1;  // r_p
  // Competence normalization range (episodic-return units).
  double return_low = -100.0;
  double return_high = 300.0;
  // Weight components by max(0, cov) instead of |cov|.
  bool positive_covariance = false;

  static CovarGmmParams from_table(const HyperParams& params);
};

struct TaskReturn {
  Vec unit_task;
  double episodic_return = 0.0;
};

// Affine map of [low, high] onto [0, 1], clamped.
double rescale_return(double episodic_return, double low, double high);

// Absolute learning progress of a new (task, return) pair: distance in return
// to the nearest earlier task (Euclidean, unit-normalized coordinates).
// Zero for an empty history.
double alp_of(const Vec& unit_task, double episodic_return, const std::vector<TaskReturn>& history);

// max(0, mean of the last coordinate) per component.
std::vector<double> alp_component_scores(const GaussianMixture& mixture);

// |cov(time, competence)| (or max(0, cov) when `positive_only`) plus a 1e-9
// floor, read from the last two coordinates of each component.
std::vector<double> covar_component_scores(const GaussianMixture& mixture, bool positive_only);

/// ALP-GMM: mixture fitted on recent (task, ALP) points; components are
/// sampled in proportion to their mean ALP.
class AlpGmmTeacher final : public Teacher {
 public:
  AlpGmmTeacher(BoxSpace space, AlpGmmParams params, std::optional<GaussianDist> bootstrap,
                std::uint64_t seed);

  std::string_view name() const override { return "alp-gmm"; }
  Task sample() override;
  void observe(const EpisodeFeedback& feedback) override;
  std::vector<Task> non_exploratory_sample(std::size_t count, std::uint64_t seed) const override;
  nlohmann::json snapshot() const override;

  const std::optional<GaussianMixture>& mixture() const { return mixture_; }
  const std::vector<TaskReturn>& history() const { return history_; }
  const AlpGmmParams& params() const { return params_; }

  // Rows: unit task coordinates followed by ALP.
  Mat window_points() const;

  // Component probabilities used for exploitation sampling.
  std::vector<double> component_scores() const;

 private:
  Task bootstrap_sample(Rng& rng) const;
  Task mixture_sample(Rng& rng) const;

  AlpGmmParams params_;
  std::optional<GaussianDist> bootstrap_;
  std::vector<TaskReturn> history_;  // returns rescaled to [0, 1]
  std::deque<Vec> window_;  // unit task + alp
  std::optional<GaussianMixture> mixture_;
  std::size_t since_fit_ = 0;
};

/// Covar-GMM: mixture fitted on recent (task, time, competence) points;
/// components are sampled by the magnitude of their time-competence covariance.
class CovarGmmTeacher final : public Teacher {
 public:
  CovarGmmTeacher(BoxSpace space, CovarGmmParams params, std::optional<GaussianDist> bootstrap,
                  std::uint64_t seed);

  std::string_view name() const override { return "covar-gmm"; }
  Task sample() override;
  void observe(const EpisodeFeedback& feedback) override;
  std::vector<Task> non_exploratory_sample(std::size_t count, std::uint64_t seed) const override;
  nlohmann::json snapshot() const override;

  double competence(double episodic_return) const;

  // Rows: unit task coordinates, normalized time, competence.
  Mat window_points() const;
  std::vector<double> component_scores() const;

  const std::optional<GaussianMixture>& mixture() const { return mixture_; }
  const CovarGmmParams& params() const { return params_; }

  // Test hook: replaces the window and refits immediately.
  void fit_on(const std::vector<std::pair<Vec, double>>& unit_task_and_return);

 private:
  Task bootstrap_sample(Rng& rng) const;
  Task mixture_sample(Rng& rng) const;
  void refit();

  CovarGmmParams params_;
  std::optional<GaussianDist> bootstrap_;
  std::deque<std::pair<Vec, double>> window_;  // unit task, competence
  std::optional<GaussianMixture> mixture_;
  std::size_t since_fit_ = 0;
};

}  // namespace acl
