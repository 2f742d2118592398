#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acl/procgen.hpp"
#include "acl/rng.hpp"
#include "acl/task_space.hpp"
#include "acl/teacher.hpp"

namespace acl {

enum class DifficultyKind { Stump, StumpShuffled, ParkourNiche };

enum class Embodiment { Default, ShortWalker, Spider, WalkerType, SwimmerType, ClimberType };

std::string_view to_string(Embodiment embodiment);
Embodiment parse_embodiment(std::string_view text);

// Stump Tracks difficulty of (mean height, spacing); negative heights clip to 0.
double stump_difficulty(double mean_height, double spacing);

// Geometry summary of a Parkour terrain used by the difficulty proxy.
struct TerrainFeatures {
  double height_range = 0.0;
  double min_clearance = 0.0;
};
TerrainFeatures terrain_features(const CppnWeights& weights, const std::array<double, 3>& theta);

/// Maps a task to a scalar difficulty in capability units. Tasks with
/// difficulty above the feasibility cap can never be mastered.
struct DifficultyModel {
  DifficultyKind kind = DifficultyKind::Stump;
  std::optional<ShuffleMap> shuffle;
  Embodiment embodiment = Embodiment::Default;
  double feasibility_cap = 2.4;  // c_inf
  std::shared_ptr<const CppnWeights> cppn;

  // Throws std::invalid_argument for tasks of the wrong dimension or a
  // shuffled model without a map.
  double difficulty(const Task& task) const;

  // Penalty given to tasks outside an embodiment's milieu.
  double unfeasible_penalty() const { return feasibility_cap + 10.0; }
  bool unfeasible(const Task& task) const { return difficulty(task) > feasibility_cap; }
};

// Whether the parkour niche of `embodiment` admits (spacing, water level).
bool in_niche(Embodiment embodiment, double creeper_spacing, double water_level);

struct StudentParams {
  double initial_capability = 0.7;  // c0
  double learning_rate = 0.0015;    // eta
  double zpd_width = 0.8;           // w
  double reward_noise = 5.0;        // sigma_R
  double margin = 0.5;              // b
  bool consolidation = true;
  std::vector<std::size_t> resets;  // episode indices where c returns to c0

  // Named learner variants standing in for the two DRL algorithms.
  static StudentParams sac();
  static StudentParams ppo();
  static StudentParams for_learner(std::string_view name);

  nlohmann::json to_json() const;
};

inline constexpr double kMaxReturn = 300.0;
inline constexpr double kMinReturn = -100.0;

struct TrajectoryPoint {
  std::size_t episode = 0;
  double capability = 0.0;
  double difficulty = 0.0;
  double episodic_return = 0.0;
};

/// Scalar-capability learner. Returns depend on the gap between capability
/// and task difficulty; training on tasks just above capability raises it.
class SyntheticStudent {
 public:
  SyntheticStudent(StudentParams params, std::uint64_t seed);

  // Applies a scheduled reset, draws a noisy return, then learns.
  EpisodeFeedback train_episode(const DifficultyModel& model, const Task& task);

  // Noise-free return; never learns or resets.
  double evaluate(const DifficultyModel& model, const Task& task) const;
  double predict_return(const DifficultyModel& model, const Task& task) const {
    return evaluate(model, task);
  }

  // Noise-free return at difficulty d for the current capability.
  double expected_return(double difficulty) const;

  double capability() const { return capability_; }
  std::size_t episodes() const { return episode_; }
  const StudentParams& params() const { return params_; }
  const TrajectoryPoint& last_step() const { return last_; }

 private:
  void learn(double difficulty, double cap);

  StudentParams params_;
  double capability_;
  std::size_t episode_ = 0;
  Rng rng_;
  TrajectoryPoint last_;
};

/// Binds a student to a difficulty model so teachers can drive it through
/// teacher_cycle. Optionally keeps the per-episode trajectory.
class StudentEnv final : public Learner {
 public:
  StudentEnv(SyntheticStudent& student, const DifficultyModel& model, bool keep_trajectory = false)
      : student_(student), model_(model), keep_(keep_trajectory) {}

  EpisodeFeedback train_episode(const Task& task) override;
  ValueEstimator value_estimator() const;

  const std::vector<TrajectoryPoint>& trajectory() const { return trajectory_; }

 private:
  SyntheticStudent& student_;
  const DifficultyModel& model_;
  bool keep_;
  std::vector<TrajectoryPoint> trajectory_;
};

nlohmann::json to_json(const TrajectoryPoint& point);

}  // namespace acl
