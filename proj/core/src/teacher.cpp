#include "acl/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acl/adr.hpp"
#include "acl/errors.hpp"
#include "acl/gmm_teachers.hpp"
#include "acl/riac.hpp"
#include "acl/spdl.hpp"

namespace acl {

std::string_view to_string(EkLevel level) {
  switch (level) {
    case EkLevel::None: return "no";
    case EkLevel::Low: return "low";
    case EkLevel::High: return "high";
  }
  return "no";
}

EkLevel parse_ek_level(std::string_view text) {
  if (text == "no" || text == "none") return EkLevel::None;
  if (text == "low") return EkLevel::Low;
  if (text == "high") return EkLevel::High;
  throw ConfigError("unknown expert knowledge level '" + std::string(text) + "' (no|low|high)");
}

GaussianDist initial_distribution(const BoxSpace& space, const Vec& mean) {
  return GaussianDist::from_stddev(mean, 0.1 * space.range());
}

GaussianDist uninformed_initial(const BoxSpace& space, Rng& rng) {
  return initial_distribution(space, uniform_sample(space, rng).coords);
}

GaussianDist default_target(const BoxSpace& space) {
  return GaussianDist::from_stddev(space.center(), 0.25 * space.range());
}

ExpertKnowledge ek_setup(const BoxSpace& space, EkLevel level, const std::optional<Task>& anchor, Rng& rng) {
  if ((level == EkLevel::High) != anchor.has_value()) {
    throw ConfigError(level == EkLevel::High ? "high expert knowledge needs an anchor task"
                                             : "an anchor task is only used with high expert knowledge");
  }
  ExpertKnowledge ek;
  ek.level = level;
  switch (level) {
    case EkLevel::None:
      break;
    case EkLevel::Low:
      ek.mastery_threshold = kMasteryThreshold;
      ek.initial = uninformed_initial(space, rng);
      break;
    case EkLevel::High:
      if (!space.contains(*anchor)) throw ConfigError("anchor task lies outside the task space");
      ek.mastery_threshold = kMasteryThreshold;
      ek.initial = initial_distribution(space, anchor->coords);
      ek.target = default_target(space);
      break;
  }
  return ek;
}

std::pair<std::string, double> parse_hp_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size()) {
    throw ConfigError("hyperparameter override must look like key=value, got '" + std::string(text) + "'");
  }
  const std::string key(text.substr(0, eq));
  const std::string value(text.substr(eq + 1));
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return {key, v};
  } catch (const std::exception&) {
    throw ConfigError("hyperparameter '" + key + "' needs a numeric value, got '" + value + "'");
  }
}

HyperParams hyperparams_for(const nlohmann::json& table, std::string_view teacher) {
  HyperParams out;
  if (!table.is_object()) throw ConfigError("hyperparameter table must be a JSON object");
  const auto it = table.find(std::string(teacher));
  if (it == table.end()) return out;
  if (!it->is_object()) throw ConfigError("hyperparameters of '" + std::string(teacher) + "' must be an object");
  for (const auto& [key, value] : it->items()) {
    if (value.is_boolean()) {
      out[key] = value.get<bool>() ? 1.0 : 0.0;
    } else if (value.is_number()) {
      out[key] = value.get<double>();
    } else {
      throw ConfigError("hyperparameter '" + key + "' must be numeric");
    }
  }
  return out;
}

const std::vector<std::string>& teacher_names() {
  static const std::vector<std::string> names{"random", "adr", "riac", "covar-gmm", "alp-gmm", "spdl"};
  return names;
}

namespace {

void require_no_params(const HyperParams& params, std::string_view teacher) {
  detail::reject_unknown(params, {}, teacher);
}

// GMM teachers bootstrap from the expert initial distribution only in the
// High setup; otherwise they bootstrap uniformly.
std::optional<GaussianDist> gmm_bootstrap(const ExpertKnowledge& ek) {
  if (ek.level == EkLevel::High) return ek.initial;
  return std::nullopt;
}

}  // namespace

std::unique_ptr<Teacher> make_teacher(std::string_view name, const BoxSpace& space, const ExpertKnowledge& ek,
                                      const HyperParams& params, std::uint64_t seed) {
  if (name == "goal-gan" || name == "goalgan" || name == "setter-solver") {
    throw ConfigError("teacher '" + std::string(name) +
                      "' trains a deep generative model and is not provided by this toolkit");
  }
  if (name == "random") {
    require_no_params(params, name);
    return std::make_unique<RandomTeacher>(space, seed);
  }
  if (name == "adr") {
    if (!ek.initial || !ek.mastery_threshold) {
      throw ConfigError("ADR requires initial distribution and mastery threshold");
    }
    return std::make_unique<AdrTeacher>(space, AdrParams::from_table(params), Task(ek.initial->mean), seed);
  }
  if (name == "riac") {
    return std::make_unique<RiacTeacher>(space, RiacParams::from_table(params), seed);
  }
  if (name == "covar-gmm") {
    return std::make_unique<CovarGmmTeacher>(space, CovarGmmParams::from_table(params), gmm_bootstrap(ek), seed);
  }
  if (name == "alp-gmm") {
    return std::make_unique<AlpGmmTeacher>(space, AlpGmmParams::from_table(params), gmm_bootstrap(ek), seed);
  }
  if (name == "spdl") {
    if (!ek.initial || !ek.target) {
      throw ConfigError("SPDL requires initial distribution and target distribution");
    }
    return std::make_unique<SpdlTeacher>(space, SpdlParams::from_table(params), *ek.initial, *ek.target, seed);
  }
  throw ConfigError("unknown teacher '" + std::string(name) + "'");
}

EpisodeFeedback teacher_cycle(Teacher& teacher, Learner& learner) {
  const Task task = clip(teacher.space(), teacher.sample());
  EpisodeFeedback fb = learner.train_episode(task);
  teacher.observe(fb);
  return fb;
}

std::vector<Task> RandomTeacher::non_exploratory_sample(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Task> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(uniform_sample(space_, rng));
  return out;
}

namespace detail {

namespace {
const double* find_value(const HyperParams& params, std::string_view key, std::vector<std::string>& consumed) {
  consumed.emplace_back(key);
  const auto it = params.find(std::string(key));
  return it == params.end() ? nullptr : &it->second;
}
}  // namespace

void take(const HyperParams& params, std::string_view key, double& value, std::vector<std::string>& consumed) {
  if (const double* v = find_value(params, key, consumed)) value = *v;
}

void take(const HyperParams& params, std::string_view key, std::size_t& value, std::vector<std::string>& consumed) {
  if (const double* v = find_value(params, key, consumed)) {
    if (*v < 0.0 || *v != std::floor(*v)) {
      throw ConfigError("hyperparameter '" + std::string(key) + "' must be a non-negative integer");
    }
    value = static_cast<std::size_t>(*v);
  }
}

void take(const HyperParams& params, std::string_view key, bool& value, std::vector<std::string>& consumed) {
  if (const double* v = find_value(params, key, consumed)) value = *v != 0.0;
}

void reject_unknown(const HyperParams& params, const std::vector<std::string>& consumed, std::string_view teacher) {
  for (const auto& [key, value] : params) {
    if (std::find(consumed.begin(), consumed.end(), key) == consumed.end()) {
      throw ConfigError("unknown hyperparameter '" + key + "' for teacher '" + std::string(teacher) + "'");
    }
  }
}

}  // namespace detail

}  // namespace acl
