#include "acl/riac.hpp"

#include <cmath>

#include "acl/errors.hpp"
#include "acl/gmm.hpp"

namespace acl {

RiacParams RiacParams::from_table(const HyperParams& params) {
  RiacParams p;
  std::vector<std::string> used;
  detail::take(params, "max_s", p.max_region_size, used);
  detail::take(params, "n", p.split_candidates, used);
  detail::take(params, "min_d", p.min_width_ratio, used);
  detail::take(params, "explore", p.explore_probability, used);
  detail::reject_unknown(params, used, "riac");
  if (p.max_region_size < 2) throw ConfigError("riac: max_s must be at least 2");
  if (p.split_candidates < 1) throw ConfigError("riac: n must be at least 1");
  if (p.min_width_ratio <= 0.0 || p.min_width_ratio >= 0.5) throw ConfigError("riac: min_d must lie in (0, 0.5)");
  if (p.explore_probability < 0.0 || p.explore_probability > 1.0) {
    throw ConfigError("riac: explore must lie in [0, 1]");
  }
  return p;
}

double region_alp(const std::deque<RegionRecord>& records) {
  const std::size_t n = records.size();
  if (n < 2) return 0.0;
  const std::size_t old_count = n / 2;
  double old_sum = 0.0;
  double new_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) (i < old_count ? old_sum : new_sum) += records[i].episodic_return;
  return std::abs(new_sum / static_cast<double>(n - old_count) - old_sum / static_cast<double>(old_count));
}

bool Region::contains(const Task& task) const {
  for (Eigen::Index d = 0; d < low.size(); ++d) {
    if (task.coords[d] < low[d] || task.coords[d] > high[d]) return false;
  }
  return true;
}

RiacTeacher::RiacTeacher(BoxSpace space, RiacParams params, std::uint64_t seed)
    : Teacher(std::move(space), seed), params_(params), root_(std::make_unique<Region>()) {
  root_->low = space_.lower();
  root_->high = space_.upper();
}

bool RiacTeacher::width_ok(std::size_t dim, double lo, double hi) const {
  const double range = space_.upper(dim) - space_.lower(dim);
  return (hi - lo) / range >= params_.min_width_ratio - 1e-12;
}

namespace {

void collect_leaves(const Region& region, std::vector<const Region*>& out) {
  if (region.is_leaf()) {
    out.push_back(&region);
    return;
  }
  collect_leaves(*region.left, out);
  collect_leaves(*region.right, out);
}

nlohmann::json region_json(const Region& r) {
  nlohmann::json j{{"low", std::vector<double>(r.low.data(), r.low.data() + r.low.size())},
                   {"high", std::vector<double>(r.high.data(), r.high.data() + r.high.size())},
                   {"alp", r.alp},
                   {"records", r.records.size()}};
  if (!r.is_leaf()) {
    j["split_dim"] = r.split_dim;
    j["split_value"] = r.split_value;
    j["children"] = {region_json(*r.left), region_json(*r.right)};
  }
  return j;
}

}  // namespace

std::vector<SplitCandidate> RiacTeacher::draw_candidates(const Region& region, Rng& rng) const {
  std::vector<SplitCandidate> out;
  const std::size_t dims = space_.dims();
  for (std::size_t i = 0; i < params_.split_candidates; ++i) {
    const std::size_t dim = rng.index(dims);
    const auto d = static_cast<Eigen::Index>(dim);
    const double min_width = params_.min_width_ratio * (space_.upper(dim) - space_.lower(dim));
    const double lo = region.low[d] + min_width;
    const double hi = region.high[d] - min_width;
    if (hi < lo) continue;
    const double value = rng.uniform(lo, hi);
    if (!width_ok(dim, region.low[d], value) || !width_ok(dim, value, region.high[d])) continue;
    std::deque<RegionRecord> left;
    std::deque<RegionRecord> right;
    for (const auto& r : region.records) (r.task[dim] < value ? left : right).push_back(r);
    out.push_back({dim, value, std::abs(region_alp(left) - region_alp(right))});
  }
  return out;
}

void RiacTeacher::apply_split(Region& region, std::size_t dim, double value) {
  const auto d = static_cast<Eigen::Index>(dim);
  region.left = std::make_unique<Region>();
  region.right = std::make_unique<Region>();
  region.left->low = region.low;
  region.left->high = region.high;
  region.left->high[d] = value;
  region.right->low = region.low;
  region.right->low[d] = value;
  region.right->high = region.high;
  region.split_dim = static_cast<int>(dim);
  region.split_value = value;
  for (auto& r : region.records) (r.task[dim] < value ? region.left : region.right)->records.push_back(std::move(r));
  region.records.clear();
  region.left->alp = region_alp(region.left->records);
  region.right->alp = region_alp(region.right->records);
}

Region& RiacTeacher::leaf_for(const Task& task) {
  Region* node = root_.get();
  while (!node->is_leaf()) {
    node = task[static_cast<std::size_t>(node->split_dim)] < node->split_value ? node->left.get() : node->right.get();
  }
  return *node;
}

void RiacTeacher::try_split(Region& leaf) {
  const auto candidates = draw_candidates(leaf, rng_);
  if (candidates.empty()) {
    const std::size_t drop = leaf.records.size() / 2;
    leaf.records.erase(leaf.records.begin(), leaf.records.begin() + static_cast<std::ptrdiff_t>(drop));
    leaf.alp = region_alp(leaf.records);
    return;
  }
  const SplitCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.score > best->score) best = &c;
  }
  apply_split(leaf, best->dim, best->value);
}

void RiacTeacher::observe(const EpisodeFeedback& feedback) {
  const Task task = clip(space_, feedback.task);
  Region& leaf = leaf_for(task);
  leaf.records.push_back({task, feedback.episodic_return});
  leaf.alp = region_alp(leaf.records);
  if (leaf.records.size() >= params_.max_region_size) try_split(leaf);
}

Task RiacTeacher::sample_leaf(const Region& leaf, Rng& rng) const {
  Vec out(leaf.low.size());
  for (Eigen::Index d = 0; d < out.size(); ++d) out[d] = rng.uniform(leaf.low[d], leaf.high[d]);
  return Task(std::move(out));
}

Task RiacTeacher::sample() {
  const auto leaves = this->leaves();
  if (rng_.bernoulli(params_.explore_probability)) return sample_leaf(*leaves[rng_.index(leaves.size())], rng_);
  std::vector<double> scores;
  scores.reserve(leaves.size());
  for (const Region* l : leaves) scores.push_back(l->alp + 1e-9);
  return sample_leaf(*leaves[pick_proportional(scores, rng_)], rng_);
}

std::vector<Task> RiacTeacher::non_exploratory_sample(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  const auto leaves = this->leaves();
  std::vector<double> scores;
  for (const Region* l : leaves) scores.push_back(l->alp + 1e-9);
  std::vector<Task> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_leaf(*leaves[pick_proportional(scores, rng)], rng));
  return out;
}

std::vector<const Region*> RiacTeacher::leaves() const {
  std::vector<const Region*> out;
  collect_leaves(*root_, out);
  return out;
}

nlohmann::json RiacTeacher::snapshot() const {
  return {{"teacher", "riac"}, {"leaves", leaves().size()}, {"tree", region_json(*root_)}};
}

}  // namespace acl
