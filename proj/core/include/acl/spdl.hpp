#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "acl/teacher.hpp"

namespace acl {

struct SpdlParams {
  std::size_t offset = 200;  // episodes before the first update
  std::size_t step = 100;    // episodes between updates
  std::size_t k_alpha = 0;   // updates run with alpha = 0
  double zeta = 0.05;
  double epsilon = 0.8;  // KL trust region
  // When set, replaces the alpha schedule (infinity jumps to the target).
  std::optional<double> fixed_alpha;

  static SpdlParams from_table(const HyperParams& params);
};

struct DiagGaussian {
  Vec mean;
  Vec var;

  GaussianDist to_dist() const;
  static DiagGaussian from_dist(const GaussianDist& dist);
};

// Exponentially tilted weighted moment fit of `tasks` by values J. The
// temperature is the smallest one keeping the effective sample size at or
// above half the sample count; equal values give the plain moment fit.
DiagGaussian tilted_moment_fit(const std::vector<Vec>& tasks, const std::vector<double>& values);

// Largest step t in [0, 1] along old -> proposal keeping KL(new || old) <= epsilon;
// stops as soon as KL lands in [0.95 epsilon, epsilon].
DiagGaussian kl_trust_region(const DiagGaussian& old_dist, const DiagGaussian& proposal,
                             double epsilon);

struct SpdlUpdateRecord {
  std::size_t episode = 0;
  double alpha = 0.0;
  double mean_value = 0.0;
  double kl_step = 0.0;
  double kl_to_target = 0.0;
  DiagGaussian result;
};

/// SPDL: Gaussian task distribution moved toward high-value tasks and a
/// target distribution under a KL trust region.
class SpdlTeacher final : public Teacher {
 public:
  SpdlTeacher(BoxSpace space, SpdlParams params, const GaussianDist& initial,
              const GaussianDist& target, std::uint64_t seed);

  std::string_view name() const override { return "spdl"; }
  Task sample() override;
  void observe(const EpisodeFeedback& feedback) override;
  std::vector<Task> non_exploratory_sample(std::size_t count, std::uint64_t seed) const override;
  nlohmann::json snapshot() const override;
  void bind_value_estimator(ValueEstimator estimator) override { estimator_ = std::move(estimator); }

  // Runs one update on the pending buffer (skipped when it is empty).
  void update();

  // Test hook: queues a task with its observed return.
  void push_pending(const Task& task, double episodic_return);

  const DiagGaussian& current() const { return current_; }
  const DiagGaussian& target() const { return target_; }
  double alpha() const { return alpha_; }
  std::size_t update_count() const { return updates_; }
  std::size_t pending_count() const { return pending_.size(); }
  const std::vector<SpdlUpdateRecord>& history() const { return history_; }
  const SpdlParams& params() const { return params_; }

 private:
  SpdlParams params_;
  DiagGaussian current_;
  DiagGaussian target_;
  double alpha_ = 0.0;
  std::vector<std::pair<Task, double>> pending_;
  std::size_t updates_ = 0;
  std::size_t observed_ = 0;
  ValueEstimator estimator_;
  std::vector<SpdlUpdateRecord> history_;
};

}  // namespace acl
