#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acl/gaussian.hpp"
#include "acl/rng.hpp"
#include "acl/task_space.hpp"

namespace acl {

// Episodic return above which a task counts as mastered (strict).
inline constexpr double kMasteryThreshold = 230.0;

inline bool is_mastered(double episodic_return, double threshold = kMasteryThreshold) {
  return episodic_return > threshold;
}

enum class EkLevel { None, Low, High };

std::string_view to_string(EkLevel level);
EkLevel parse_ek_level(std::string_view text);  // "no"/"none", "low", "high"

/// Prior knowledge handed to a teacher. None carries nothing; Low carries a
/// mastery threshold and a randomly placed initial distribution; High adds an
/// expert anchor for the initial distribution and a target distribution.
struct ExpertKnowledge {
  EkLevel level = EkLevel::None;
  std::optional<GaussianDist> initial;
  std::optional<GaussianDist> target;
  std::optional<double> mastery_threshold;
};

// Initial distribution: given mean, per-dimension std = 10% of the range.
GaussianDist initial_distribution(const BoxSpace& space, const Vec& mean);
// Initial distribution centred on a uniformly drawn point.
GaussianDist uninformed_initial(const BoxSpace& space, Rng& rng);
// Target distribution: space centre, per-dimension std = range / 4.
GaussianDist default_target(const BoxSpace& space);

// Throws ConfigError for High without an anchor (or an anchor given at
// another level).
ExpertKnowledge ek_setup(const BoxSpace& space, EkLevel level, const std::optional<Task>& anchor,
                         Rng& rng);

struct EpisodeFeedback {
  Task task;
  double episodic_return = 0.0;
  bool mastered = false;
  std::size_t episode_index = 0;
};

// Expected return of a task under the current student, J(pi, c).
using ValueEstimator = std::function<double(const Task&)>;

/// A curriculum teacher: proposes one task per episode and learns from the
/// episodic return the student obtained on it.
class Teacher {
 public:
  virtual ~Teacher() = default;
  Teacher(const Teacher&) = delete;
  Teacher& operator=(const Teacher&) = delete;

  virtual std::string_view name() const = 0;

  // Next training task; always inside space().
  virtual Task sample() = 0;

  virtual void observe(const EpisodeFeedback& feedback) = 0;

  // Tasks from the exploitation part of the sampler only, drawn with a
  // private stream seeded by `seed`. Never mutates the teacher.
  virtual std::vector<Task> non_exploratory_sample(std::size_t count, std::uint64_t seed) const = 0;

  virtual nlohmann::json snapshot() const = 0;

  // Teachers that query the student's value function override this.
  virtual void bind_value_estimator(ValueEstimator /*estimator*/) {}

  const BoxSpace& space() const { return space_; }

 protected:
  Teacher(BoxSpace space, std::uint64_t seed) : space_(std::move(space)), rng_(seed) {}

  BoxSpace space_;
  Rng rng_;
};

/// Anything that can be trained for one episode on a task.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual EpisodeFeedback train_episode(const Task& task) = 0;
};

// Hyperparameter overrides for one teacher, e.g. {"t_H": 180}.
using HyperParams = std::map<std::string, double>;

// Parses "key=value" (throws ConfigError on malformed input).
std::pair<std::string, double> parse_hp_assignment(std::string_view text);

// Extracts the override table of one teacher from {"adr": {...}, ...}.
HyperParams hyperparams_for(const nlohmann::json& table, std::string_view teacher);

// Names accepted by make_teacher, in canonical order.
const std::vector<std::string>& teacher_names();

// Builds a teacher with tuned defaults. Throws ConfigError for unknown or
// out-of-scope names, unknown hyperparameters and missing expert knowledge.
std::unique_ptr<Teacher> make_teacher(std::string_view name, const BoxSpace& space,
                                      const ExpertKnowledge& ek, const HyperParams& params,
                                      std::uint64_t seed);

// One interaction: the teacher proposes, the learner trains, the teacher
// observes. Returns the feedback that was delivered.
EpisodeFeedback teacher_cycle(Teacher& teacher, Learner& learner);

/// Baseline teacher sampling uniformly over the space.
class RandomTeacher final : public Teacher {
 public:
  RandomTeacher(BoxSpace space, std::uint64_t seed) : Teacher(std::move(space), seed) {}

  std::string_view name() const override { return "random"; }
  Task sample() override { return uniform_sample(space_, rng_); }
  void observe(const EpisodeFeedback&) override {}
  std::vector<Task> non_exploratory_sample(std::size_t count, std::uint64_t seed) const override;
  nlohmann::json snapshot() const override { return {{"teacher", "random"}}; }
};

namespace detail {

// Reads `key` from params into `value`, recording it as consumed.
void take(const HyperParams& params, std::string_view key, double& value,
          std::vector<std::string>& consumed);
void take(const HyperParams& params, std::string_view key, std::size_t& value,
          std::vector<std::string>& consumed);
void take(const HyperParams& params, std::string_view key, bool& value,
          std::vector<std::string>& consumed);
// Throws ConfigError naming the first key not in `consumed`.
void reject_unknown(const HyperParams& params, const std::vector<std::string>& consumed,
                    std::string_view teacher);

}  // namespace detail

}  // namespace acl
