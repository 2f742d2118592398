#include "acl/adr.hpp"

#include <algorithm>

#include "acl/errors.hpp"

namespace acl {

AdrParams AdrParams::from_table(const HyperParams& params) {
  AdrParams p;
  std::vector<std::string> used;
  detail::take(params, "t_L", p.low_threshold, used);
  detail::take(params, "t_H", p.high_threshold, used);
  detail::take(params, "p_b", p.boundary_prob, used);
  detail::take(params, "m", p.buffer_size, used);
  detail::take(params, "delta", p.step, used);
  detail::reject_unknown(params, used, "adr");
  if (p.boundary_prob < 0.0 || p.boundary_prob > 1.0) throw ConfigError("adr: p_b must lie in [0, 1]");
  if (p.buffer_size < 1) throw ConfigError("adr: m must be at least 1");
  if (p.step <= 0.0) throw ConfigError("adr: delta must be positive");
  if (p.high_threshold < p.low_threshold) throw ConfigError("adr: t_H must not be below t_L");
  return p;
}

AdrTeacher::AdrTeacher(BoxSpace space, AdrParams params, const Task& anchor, std::uint64_t seed)
    : Teacher(std::move(space), seed),
      params_(params),
      buffers_low_(space_.dims()),
      buffers_high_(space_.dims()) {
  if (anchor.dims() != space_.dims()) throw std::invalid_argument("ADR anchor does not match the task space");
  phi_low_ = clip(space_, anchor).coords;
  phi_high_ = phi_low_;
}

Task AdrTeacher::sample() {
  Vec out(phi_low_.size());
  for (Eigen::Index d = 0; d < out.size(); ++d) out[d] = rng_.uniform(phi_low_[d], phi_high_[d]);
  probe_.reset();
  if (rng_.bernoulli(params_.boundary_prob)) {
    const std::size_t dim = rng_.index(space_.dims());
    const BoundarySide side = rng_.bernoulli(0.5) ? BoundarySide::High : BoundarySide::Low;
    const auto d = static_cast<Eigen::Index>(dim);
    out[d] = side == BoundarySide::Low ? phi_low_[d] : phi_high_[d];
    probe_ = AdrProbe{dim, side};
  }
  return Task(std::move(out));
}

void AdrTeacher::observe(const EpisodeFeedback& feedback) {
  ++observed_;
  if (!probe_) return;
  const AdrProbe probe = *probe_;
  probe_.reset();
  auto& buffer = (probe.side == BoundarySide::Low ? buffers_low_ : buffers_high_)[probe.dim];
  buffer.push_back(feedback.episodic_return);
  if (buffer.size() < params_.buffer_size) return;
  double sum = 0.0;
  for (const double r : buffer) sum += r;
  const double mean = sum / static_cast<double>(buffer.size());
  buffer.clear();
  update_boundary(probe.dim, probe.side, mean);
}

void AdrTeacher::update_boundary(std::size_t dim, BoundarySide side, double mean_return) {
  const auto d = static_cast<Eigen::Index>(dim);
  const double lo = space_.lower(dim);
  const double hi = space_.upper(dim);
  AdrEvent ev{observed_, dim, side, mean_return, 0.0, 0.0, false};
  if (side == BoundarySide::Low) {
    double v = phi_low_[d];
    ev.old_value = v;
    if (mean_return < params_.low_threshold) {
      v += params_.step;
    } else if (mean_return > params_.low_threshold) {
      v -= params_.step;
    }
    const double clamped = std::clamp(v, lo, phi_high_[d]);
    ev.clamped = clamped != v;
    phi_low_[d] = clamped;
    ev.new_value = clamped;
  } else {
    double v = phi_high_[d];
    ev.old_value = v;
    if (mean_return < params_.low_threshold) {
      v -= params_.step;
    } else if (mean_return > params_.high_threshold) {
      v += params_.step;
    }
    const double clamped = std::clamp(v, phi_low_[d], hi);
    ev.clamped = clamped != v;
    phi_high_[d] = clamped;
    ev.new_value = clamped;
  }
  events_.push_back(ev);
}

std::vector<Task> AdrTeacher::non_exploratory_sample(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<Task> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec t(phi_low_.size());
    for (Eigen::Index d = 0; d < t.size(); ++d) t[d] = rng.uniform(phi_low_[d], phi_high_[d]);
    out.emplace_back(std::move(t));
  }
  return out;
}

nlohmann::json AdrTeacher::snapshot() const {
  return {{"teacher", "adr"},
          {"phi_low", std::vector<double>(phi_low_.data(), phi_low_.data() + phi_low_.size())},
          {"phi_high", std::vector<double>(phi_high_.data(), phi_high_.data() + phi_high_.size())},
          {"boundary_moves", events_.size()}};
}

}  // namespace acl
