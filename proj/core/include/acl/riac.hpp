#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "acl/teacher.hpp"

namespace acl {

struct RiacParams {
  std::size_t max_region_size = 150;  // max_s
  std::size_t split_candidates = 75;  // n
  double min_width_ratio = 0.1;       // min_d
  double explore_probability = 0.1;

  static RiacParams from_table(const HyperParams& params);
};

struct RegionRecord {
  Task task;
  double episodic_return = 0.0;
};

// |mean(newest half) - mean(oldest half)| of the returns; 0 with < 2 records.
double region_alp(const std::deque<RegionRecord>& records);

struct Region {
  Vec low;
  Vec high;
  std::deque<RegionRecord> records;
  double alp = 0.0;
  std::unique_ptr<Region> left;
  std::unique_ptr<Region> right;
  int split_dim = -1;
  double split_value = 0.0;

  bool is_leaf() const { return !left; }
  bool contains(const Task& task) const;
  double volume() const { return (high - low).prod(); }
};

struct SplitCandidate {
  std::size_t dim = 0;
  double value = 0.0;
  double score = 0.0;  // |ALP_left - ALP_right|
};

/// RIAC: recursive hyperbox splitting driven by per-region learning progress.
class RiacTeacher final : public Teacher {
 public:
  RiacTeacher(BoxSpace space, RiacParams params, std::uint64_t seed);

  std::string_view name() const override { return "riac"; }
  Task sample() override;
  void observe(const EpisodeFeedback& feedback) override;
  std::vector<Task> non_exploratory_sample(std::size_t count, std::uint64_t seed) const override;
  nlohmann::json snapshot() const override;

  std::vector<const Region*> leaves() const;
  const Region& root() const { return *root_; }
  const RiacParams& params() const { return params_; }

  // Whether a child interval [lo, hi] on `dim` respects min_d.
  bool width_ok(std::size_t dim, double lo, double hi) const;

  // Candidate splits drawn for `region`; invalid ones are already dropped.
  std::vector<SplitCandidate> draw_candidates(const Region& region, Rng& rng) const;

  // Test hook: splits a leaf at the given place, routing its records.
  static void apply_split(Region& region, std::size_t dim, double value);

 private:
  Region& leaf_for(const Task& task);
  void try_split(Region& leaf);
  Task sample_leaf(const Region& leaf, Rng& rng) const;

  RiacParams params_;
  std::unique_ptr<Region> root_;
};

}  // namespace acl
