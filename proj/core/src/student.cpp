#include "acl/student.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace acl {

namespace {

// Parkour proxy evaluates the profile every fourth column.
constexpr std::size_t kFeatureColumns = kTrackColumns / 4;
constexpr double kFeatureSmoothing = 10.0 / 4.0;

double embodiment_scale(Embodiment e) {
  switch (e) {
    case Embodiment::ShortWalker: return 1.3;
    case Embodiment::Spider: return 0.7;
    default: return 1.0;
  }
}

}  // namespace

std::string_view to_string(Embodiment embodiment) {
  switch (embodiment) {
    case Embodiment::Default: return "default";
    case Embodiment::ShortWalker: return "short_walker";
    case Embodiment::Spider: return "spider";
    case Embodiment::WalkerType: return "walker_type";
    case Embodiment::SwimmerType: return "swimmer_type";
    case Embodiment::ClimberType: return "climber_type";
  }
  return "default";
}

Embodiment parse_embodiment(std::string_view text) {
  for (auto e : {Embodiment::Default, Embodiment::ShortWalker, Embodiment::Spider, Embodiment::WalkerType,
                 Embodiment::SwimmerType, Embodiment::ClimberType}) {
    if (to_string(e) == text) return e;
  }
  throw std::invalid_argument("unknown embodiment '" + std::string(text) + "'");
}

double stump_difficulty(double mean_height, double spacing) {
  const double height = std::max(0.0, mean_height);
  return spacing >= 2.0 ? height : height + (2.0 - spacing);
}

TerrainFeatures terrain_features(const CppnWeights& weights, const std::array<double, 3>& theta) {
  const auto [ground, ceiling] = terrain_profile(weights, theta, kFeatureSmoothing, kFeatureColumns);
  const auto [lo, hi] = std::minmax_element(ground.begin(), ground.end());
  TerrainFeatures f;
  f.height_range = *hi - *lo;
  f.min_clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ground.size(); ++i) f.min_clearance = std::min(f.min_clearance, ceiling[i] - ground[i]);
  return f;
}

bool in_niche(Embodiment embodiment, double creeper_spacing, double water_level) {
  switch (embodiment) {
    case Embodiment::SwimmerType: return water_level >= 0.8;
    case Embodiment::ClimberType: return water_level <= 0.2 && creeper_spacing <= 2.5;
    default: return water_level <= 0.2;
  }
}

double DifficultyModel::difficulty(const Task& task) const {
  switch (kind) {
    case DifficultyKind::Stump:
    case DifficultyKind::StumpShuffled: {
      if (task.dims() != 2) throw std::invalid_argument("stump tasks have 2 coordinates");
      Task t = task;
      if (kind == DifficultyKind::StumpShuffled) {
        if (!shuffle) throw std::invalid_argument("shuffled difficulty model has no shuffle map");
        t = shuffle_interpolate(*shuffle, task);
      }
      return embodiment_scale(embodiment) * stump_difficulty(t[0], t[1]);
    }
    case DifficultyKind::ParkourNiche: {
      if (task.dims() != 6) throw std::invalid_argument("parkour tasks have 6 coordinates");
      const CppnWeights& w = cppn ? *cppn : canonical_cppn();
      const TerrainFeatures f = terrain_features(w, {task[0], task[1], task[2]});
      if (f.min_clearance <= 0.0 || !in_niche(embodiment, task[4], task[5])) return unfeasible_penalty();
      double d = 0.6 * std::max(0.0, f.height_range - 3.5) + std::max(0.0, 2.0 - f.min_clearance);
      // Swimmers float over the relief; climbers need long enough creepers.
      if (embodiment == Embodiment::SwimmerType) d *= 0.6;
      if (embodiment == Embodiment::ClimberType) d += 0.5 * std::max(0.0, 2.0 - task[3]);
      return d;
    }
  }
  return 0.0;
}

StudentParams StudentParams::sac() { return StudentParams{}; }

StudentParams StudentParams::ppo() {
  StudentParams p;
  p.learning_rate *= 0.6;
  p.zpd_width *= 1.5;
  return p;
}

StudentParams StudentParams::for_learner(std::string_view name) {
  if (name == "sac") return sac();
  if (name == "ppo") return ppo();
  throw std::invalid_argument("unknown learner '" + std::string(name) + "' (sac|ppo)");
}

nlohmann::json StudentParams::to_json() const {
  return {{"initial_capability", initial_capability}, {"learning_rate", learning_rate},
          {"zpd_width", zpd_width}, {"reward_noise", reward_noise}, {"margin", margin},
          {"consolidation", consolidation}, {"resets", resets}};
}

SyntheticStudent::SyntheticStudent(StudentParams params, std::uint64_t seed)
    : params_(std::move(params)), capability_(params_.initial_capability), rng_(seed) {
  if (!(params_.margin > 0.0) || !(params_.zpd_width > 0.0) || params_.learning_rate < 0.0 ||
      params_.reward_noise < 0.0) {
    throw std::invalid_argument("student needs positive margin and ZPD width, non-negative rates");
  }
}

double SyntheticStudent::expected_return(double difficulty) const {
  const double level = std::clamp((capability_ - difficulty + params_.margin) / params_.margin, 0.0, 1.0);
  return std::max(kMinReturn, kMaxReturn * level);
}

double SyntheticStudent::evaluate(const DifficultyModel& model, const Task& task) const {
  return expected_return(model.difficulty(task));
}

void SyntheticStudent::learn(double d, double cap) {
  const double c = capability_;
  if (d > c && d <= c + params_.zpd_width) {
    capability_ = std::min(cap, c + params_.learning_rate * (1.0 - (d - c) / params_.zpd_width));
  } else if (d <= c && params_.consolidation) {
    capability_ = std::min(cap, c + 0.1 * params_.learning_rate);
  }
  capability_ = std::max(capability_, c);
}

EpisodeFeedback SyntheticStudent::train_episode(const DifficultyModel& model, const Task& task) {
  if (std::find(params_.resets.begin(), params_.resets.end(), episode_) != params_.resets.end()) {
    capability_ = params_.initial_capability;
  }
  const double d = model.difficulty(task);
  double ret = expected_return(d);
  if (params_.reward_noise > 0.0) ret = std::max(kMinReturn, ret + rng_.normal(0.0, params_.reward_noise));
  last_ = {episode_, capability_, d, ret};
  learn(d, model.feasibility_cap);

  EpisodeFeedback fb;
  fb.task = task;
  fb.episodic_return = ret;
  fb.mastered = is_mastered(ret);
  fb.episode_index = episode_;
  ++episode_;
  return fb;
}

EpisodeFeedback StudentEnv::train_episode(const Task& task) {
  EpisodeFeedback fb = student_.train_episode(model_, task);
  if (keep_) trajectory_.push_back(student_.last_step());
  return fb;
}

ValueEstimator StudentEnv::value_estimator() const {
  return [this](const Task& task) { return student_.predict_return(model_, task); };
}

nlohmann::json to_json(const TrajectoryPoint& p) {
  return {{"episode", p.episode}, {"c", p.capability}, {"d", p.difficulty}, {"R", p.episodic_return}};
}

}  // namespace acl
