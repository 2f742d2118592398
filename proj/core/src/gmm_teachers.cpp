#include "acl/gmm_teachers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acl/errors.hpp"

namespace acl {

AlpGmmParams AlpGmmParams::from_table(const HyperParams& params) {
  AlpGmmParams p;
  std::vector<std::string> used;
  detail::take(params, "n", p.fit_every, used);
  detail::take(params, "max_k", p.max_k, used);
  detail::take(params, "r_p", p.random_ratio, used);
  detail::take(params, "r_lo", p.return_low, used);
  detail::take(params, "r_hi", p.return_high, used);
  detail::reject_unknown(params, used, "alp-gmm");
  if (p.fit_every < 2) throw ConfigError("alp-gmm: n must be at least 2");
  if (p.max_k < 2) throw ConfigError("alp-gmm: max_k must be at least 2");
  if (p.random_ratio < 0.0 || p.random_ratio > 1.0) throw ConfigError("alp-gmm: r_p must lie in [0, 1]");
  if (!(p.return_high > p.return_low)) throw ConfigError("alp-gmm: r_hi must exceed r_lo");
  return p;
}

CovarGmmParams CovarGmmParams::from_table(const HyperParams& params) {
  CovarGmmParams p;
  std::vector<std::string> used;
  detail::take(params, "n", p.fit_every, used);
  detail::take(params, "max_k", p.max_k, used);
  detail::take(params, "r_p", p.random_ratio, used);
  detail::take(params, "r_lo", p.return_low, used);
  detail::take(params, "r_hi", p.return_high, used);
  detail::take(params, "positive_cov", p.positive_covariance, used);
  detail::reject_unknown(params, used, "covar-gmm");
  if (p.fit_every < 2) throw ConfigError("covar-gmm: n must be at least 2");
  if (p.max_k < 2) throw ConfigError("covar-gmm: max_k must be at least 2");
  if (p.random_ratio < 0.0 || p.random_ratio > 1.0) throw ConfigError("covar-gmm: r_p must lie in [0, 1]");
  if (!(p.return_high > p.return_low)) throw ConfigError("covar-gmm: r_hi must exceed r_lo");
  return p;
}

double rescale_return(double episodic_return, double low, double high) {
  return std::clamp((episodic_return - low) / (high - low), 0.0, 1.0);
}

double alp_of(const Vec& unit_task, double episodic_return, const std::vector<TaskReturn>& history) {
  if (history.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  double nearest_return = 0.0;
  for (const auto& h : history) {
    const double d = (h.unit_task - unit_task).squaredNorm();
    if (d < best) {
      best = d;
      nearest_return = h.episodic_return;
    }
  }
  return std::abs(episodic_return - nearest_return);
}

std::vector<double> alp_component_scores(const GaussianMixture& mixture) {
  std::vector<double> out;
  out.reserve(mixture.size());
  for (const auto& c : mixture.components) out.push_back(std::max(0.0, c.mean[c.mean.size() - 1]));
  return out;
}

std::vector<double> covar_component_scores(const GaussianMixture& mixture, bool positive_only) {
  std::vector<double> out;
  out.reserve(mixture.size());
  for (const auto& c : mixture.components) {
    const Eigen::Index n = c.covariance.rows();
    const double cov = c.covariance(n - 2, n - 1);
    out.push_back((positive_only ? std::max(0.0, cov) : std::abs(cov)) + 1e-9);
  }
  return out;
}

namespace {

Task marginal_sample(const BoxSpace& space, const GaussianMixture& gm, const std::vector<double>& scores,
                     Rng& rng) {
  const auto& c = gm.components[pick_proportional(scores, rng)];
  const Eigen::Index dims = static_cast<Eigen::Index>(space.dims());
  const Vec unit = sample_gaussian(c.mean.head(dims), c.covariance.topLeftCorner(dims, dims), rng);
  return clip(space, Task(space.from_unit(unit)));
}

Task gaussian_or_uniform(const BoxSpace& space, const std::optional<GaussianDist>& g, Rng& rng) {
  if (g) return clip(space, Task(g->sample(rng)));
  return uniform_sample(space, rng);
}

nlohmann::json optional_mixture(const std::optional<GaussianMixture>& gm) {
  return gm ? gm->to_json() : nlohmann::json(nullptr);
}

}  // namespace

// ALP-GMM

AlpGmmTeacher::AlpGmmTeacher(BoxSpace space, AlpGmmParams params, std::optional<GaussianDist> bootstrap,
                             std::uint64_t seed)
    : Teacher(std::move(space), seed), params_(params), bootstrap_(std::move(bootstrap)) {
  if (bootstrap_ && bootstrap_->dims() != space_.dims()) {
    throw std::invalid_argument("bootstrap distribution does not match the task space");
  }
}

Task AlpGmmTeacher::bootstrap_sample(Rng& rng) const { return gaussian_or_uniform(space_, bootstrap_, rng); }

Task AlpGmmTeacher::mixture_sample(Rng& rng) const {
  return marginal_sample(space_, *mixture_, component_scores(), rng);
}

Task AlpGmmTeacher::sample() {
  if (!mixture_) return bootstrap_sample(rng_);
  if (rng_.bernoulli(params_.random_ratio)) return uniform_sample(space_, rng_);
  return mixture_sample(rng_);
}

void AlpGmmTeacher::observe(const EpisodeFeedback& feedback) {
  Vec unit = space_.to_unit(feedback.task.coords);
  const double r = rescale_return(feedback.episodic_return, params_.return_low, params_.return_high);
  const double alp = alp_of(unit, r, history_);
  Vec row(unit.size() + 1);
  row << unit, alp;
  history_.push_back({std::move(unit), r});
  window_.push_back(std::move(row));
  while (window_.size() > params_.fit_every) window_.pop_front();
  if (++since_fit_ >= params_.fit_every) {
    mixture_ = select_k_by_aic(window_points(), params_.max_k, rng_);
    since_fit_ = 0;
  }
}

std::vector<Task> AlpGmmTeacher::non_exploratory_sample(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Task> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(mixture_ ? mixture_sample(rng) : bootstrap_sample(rng));
  return out;
}

Mat AlpGmmTeacher::window_points() const { return stack_rows({window_.begin(), window_.end()}); }

std::vector<double> AlpGmmTeacher::component_scores() const {
  return mixture_ ? alp_component_scores(*mixture_) : std::vector<double>{};
}

nlohmann::json AlpGmmTeacher::snapshot() const {
  return {{"teacher", "alp-gmm"},
          {"episodes", history_.size()},
          {"mixture", optional_mixture(mixture_)},
          {"scores", component_scores()}};
}

// Covar-GMM

CovarGmmTeacher::CovarGmmTeacher(BoxSpace space, CovarGmmParams params, std::optional<GaussianDist> bootstrap,
                                 std::uint64_t seed)
    : Teacher(std::move(space), seed), params_(params), bootstrap_(std::move(bootstrap)) {
  if (bootstrap_ && bootstrap_->dims() != space_.dims()) {
    throw std::invalid_argument("bootstrap distribution does not match the task space");
  }
}

double CovarGmmTeacher::competence(double episodic_return) const {
  return rescale_return(episodic_return, params_.return_low, params_.return_high);
}

Mat CovarGmmTeacher::window_points() const {
  if (window_.empty()) return {};
  const auto n = window_.size();
  const Eigen::Index dims = static_cast<Eigen::Index>(space_.dims());
  Mat out(static_cast<Eigen::Index>(n), dims + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.row(r).head(dims) = window_[i].first.transpose();
    out(r, dims) = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    out(r, dims + 1) = window_[i].second;
  }
  return out;
}

std::vector<double> CovarGmmTeacher::component_scores() const {
  return mixture_ ? covar_component_scores(*mixture_, params_.positive_covariance) : std::vector<double>{};
}

Task CovarGmmTeacher::bootstrap_sample(Rng& rng) const { return gaussian_or_uniform(space_, bootstrap_, rng); }

Task CovarGmmTeacher::mixture_sample(Rng& rng) const {
  return marginal_sample(space_, *mixture_, component_scores(), rng);
}

Task CovarGmmTeacher::sample() {
  if (!mixture_) return bootstrap_sample(rng_);
  if (rng_.bernoulli(params_.random_ratio)) return uniform_sample(space_, rng_);
  return mixture_sample(rng_);
}

void CovarGmmTeacher::refit() {
  mixture_ = select_k_by_aic(window_points(), params_.max_k, rng_);
  since_fit_ = 0;
}

void CovarGmmTeacher::observe(const EpisodeFeedback& feedback) {
  window_.emplace_back(space_.to_unit(feedback.task.coords), competence(feedback.episodic_return));
  while (window_.size() > params_.fit_every) window_.pop_front();
  if (++since_fit_ >= params_.fit_every) refit();
}

void CovarGmmTeacher::fit_on(const std::vector<std::pair<Vec, double>>& unit_task_and_return) {
  window_.clear();
  for (const auto& [unit, ret] : unit_task_and_return) window_.emplace_back(unit, competence(ret));
  refit();
}

std::vector<Task> CovarGmmTeacher::non_exploratory_sample(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Task> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(mixture_ ? mixture_sample(rng) : bootstrap_sample(rng));
  return out;
}

nlohmann::json CovarGmmTeacher::snapshot() const {
  return {{"teacher", "covar-gmm"}, {"mixture", optional_mixture(mixture_)}, {"scores", component_scores()}};
}

}  // namespace acl
