#include "acl/spdl.hpp"

#include <algorithm>
#include <cmath>

#include "acl/errors.hpp"
#include "acl/gmm.hpp"

namespace acl {

namespace {

constexpr double kVarianceFloor = 1e-8;

double kl(const DiagGaussian& p, const DiagGaussian& q) { return kl_diagonal(p.mean, p.var, q.mean, q.var); }

DiagGaussian lerp(const DiagGaussian& a, const DiagGaussian& b, double t) {
  return {a.mean + t * (b.mean - a.mean), a.var + t * (b.var - a.var)};
}

double effective_sample_size(const Vec& w) { return w.sum() * w.sum() / w.squaredNorm(); }

Vec tilt_weights(const Vec& values, double max_value, double eta) {
  return ((values.array() - max_value) / eta).exp().matrix();
}

}  // namespace

SpdlParams SpdlParams::from_table(const HyperParams& params) {
  SpdlParams p;
  std::vector<std::string> used;
  detail::take(params, "offset", p.offset, used);
  detail::take(params, "step", p.step, used);
  detail::take(params, "k_alpha", p.k_alpha, used);
  detail::take(params, "zeta", p.zeta, used);
  detail::take(params, "epsilon", p.epsilon, used);
  double alpha = -1.0;
  detail::take(params, "alpha", alpha, used);
  detail::reject_unknown(params, used, "spdl");
  if (params.count("alpha")) {
    if (!(alpha >= 0.0)) throw ConfigError("spdl: alpha must be non-negative");
    p.fixed_alpha = alpha;
  }
  if (p.step < 1) throw ConfigError("spdl: step must be at least 1");
  if (p.epsilon < 0.0) throw ConfigError("spdl: epsilon must be non-negative");
  if (p.zeta < 0.0) throw ConfigError("spdl: zeta must be non-negative");
  return p;
}

GaussianDist DiagGaussian::to_dist() const {
  GaussianDist g;
  g.mean = mean;
  g.covariance = var.asDiagonal();
  g.diagonal = true;
  return g;
}

DiagGaussian DiagGaussian::from_dist(const GaussianDist& dist) {
  return {dist.mean, dist.covariance.diagonal().cwiseMax(kVarianceFloor)};
}

DiagGaussian tilted_moment_fit(const std::vector<Vec>& tasks, const std::vector<double>& values) {
  if (tasks.empty() || tasks.size() != values.size()) {
    throw std::invalid_argument("tilted_moment_fit needs one value per task and at least one task");
  }
  const auto n = static_cast<double>(tasks.size());
  const Vec j = Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
  const double top = j.maxCoeff();
  const double spread = top - j.minCoeff();

  Vec w = Vec::Ones(j.size());
  if (spread > 0.0) {
    double lo = 1e-6 * spread;
    double hi = 1e6 * spread;
    if (effective_sample_size(tilt_weights(j, top, lo)) >= 0.5 * n) {
      hi = lo;
    } else {
      for (int it = 0; it < 100; ++it) {
        const double mid = std::sqrt(lo * hi);
        (effective_sample_size(tilt_weights(j, top, mid)) >= 0.5 * n ? hi : lo) = mid;
        if (hi / lo < 1.0 + 1e-9) break;
      }
    }
    w = tilt_weights(j, top, hi);
  }
  w /= w.sum();

  const Mat x = stack_rows(tasks);
  DiagGaussian out;
  out.mean = x.transpose() * w;
  const Mat centred = x.rowwise() - out.mean.transpose();
  out.var = (centred.array().square().matrix().transpose() * w).cwiseMax(kVarianceFloor);
  return out;
}

DiagGaussian kl_trust_region(const DiagGaussian& old_dist, const DiagGaussian& proposal, double epsilon) {
  if (kl(proposal, old_dist) <= epsilon) return proposal;
  if (epsilon <= 0.0) return old_dist;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double k = kl(lerp(old_dist, proposal, mid), old_dist);
    if (k > epsilon) {
      hi = mid;
    } else if (k >= 0.95 * epsilon) {
      return lerp(old_dist, proposal, mid);
    } else {
      lo = mid;
    }
  }
  return lerp(old_dist, proposal, lo);
}

SpdlTeacher::SpdlTeacher(BoxSpace space, SpdlParams params, const GaussianDist& initial, const GaussianDist& target,
                         std::uint64_t seed)
    : Teacher(std::move(space), seed),
      params_(std::move(params)),
      current_(DiagGaussian::from_dist(initial)),
      target_(DiagGaussian::from_dist(target)) {
  if (initial.dims() != space_.dims() || target.dims() != space_.dims()) {
    throw std::invalid_argument("SPDL distributions do not match the task space");
  }
}

Task SpdlTeacher::sample() { return clip(space_, Task(current_.to_dist().sample(rng_))); }

void SpdlTeacher::observe(const EpisodeFeedback& feedback) {
  pending_.emplace_back(feedback.task, feedback.episodic_return);
  ++observed_;
  if (observed_ >= params_.offset && (observed_ - params_.offset) % params_.step == 0) update();
}

void SpdlTeacher::push_pending(const Task& task, double episodic_return) {
  pending_.emplace_back(task, episodic_return);
}

void SpdlTeacher::update() {
  if (pending_.empty()) return;
  std::vector<Vec> tasks;
  std::vector<double> values;
  tasks.reserve(pending_.size());
  values.reserve(pending_.size());
  for (const auto& [task, ret] : pending_) {
    tasks.push_back(task.coords);
    values.push_back(estimator_ ? estimator_(task) : ret);
  }
  double mean_value = 0.0;
  for (const double v : values) mean_value += v;
  mean_value /= static_cast<double>(values.size());

  const DiagGaussian fitted = tilted_moment_fit(tasks, values);

  if (params_.fixed_alpha) {
    alpha_ = *params_.fixed_alpha;
  } else if (updates_ < params_.k_alpha) {
    alpha_ = 0.0;
  } else {
    alpha_ = std::max(0.0, params_.zeta * mean_value / std::max(kl(current_, target_), 1e-6));
  }

  DiagGaussian blended;
  if (std::isinf(alpha_)) {
    blended = target_;
  } else {
    blended.mean = (fitted.mean + alpha_ * target_.mean) / (1.0 + alpha_);
    blended.var = ((fitted.var + alpha_ * target_.var) / (1.0 + alpha_)).cwiseMax(kVarianceFloor);
  }

  const DiagGaussian old = current_;
  current_ = kl_trust_region(old, blended, params_.epsilon);
  current_.var = current_.var.cwiseMax(kVarianceFloor);
  ++updates_;
  history_.push_back({observed_, alpha_, mean_value, kl(current_, old), kl(current_, target_), current_});
  pending_.clear();
}

std::vector<Task> SpdlTeacher::non_exploratory_sample(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  const GaussianDist dist = current_.to_dist();
  std::vector<Task> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(clip(space_, Task(dist.sample(rng))));
  return out;
}

nlohmann::json SpdlTeacher::snapshot() const {
  return {{"teacher", "spdl"},
          {"mean", std::vector<double>(current_.mean.data(), current_.mean.data() + current_.mean.size())},
          {"var", std::vector<double>(current_.var.data(), current_.var.data() + current_.var.size())},
          {"alpha", alpha_},
          {"updates", updates_}};
}

}  // namespace acl
