#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "acl/teacher.hpp"

namespace acl {

struct AdrParams {
  double low_threshold = 0.0;     // t_L
  double high_threshold = 180.0;  // t_H
  double boundary_prob = 0.7;     // p_b
  std::size_t buffer_size = 10;   // m
  double step = 0.1;              // Delta, task units

  static AdrParams from_table(const HyperParams& params);
};

enum class BoundarySide { Low, High };

struct AdrProbe {
  std::size_t dim = 0;
  BoundarySide side = BoundarySide::Low;
};

/// One boundary move, kept for the boundary history export.
struct AdrEvent {
  std::size_t episode = 0;
  std::size_t dim = 0;
  BoundarySide side = BoundarySide::Low;
  double mean_return = 0.0;
  double old_value = 0.0;
  double new_value = 0.0;
  bool clamped = false;
};

/// ADR: uniform box sampling whose per-dimension boundaries grow or shrink
/// according to returns collected on boundary probes.
class AdrTeacher final : public Teacher {
 public:
  AdrTeacher(BoxSpace space, AdrParams params, const Task& anchor, std::uint64_t seed);

  std::string_view name() const override { return "adr"; }
  Task sample() override;
  void observe(const EpisodeFeedback& feedback) override;
  std::vector<Task> non_exploratory_sample(std::size_t count, std::uint64_t seed) const override;
  nlohmann::json snapshot() const override;

  const Vec& phi_low() const { return phi_low_; }
  const Vec& phi_high() const { return phi_high_; }
  const std::optional<AdrProbe>& pending_probe() const { return probe_; }
  const std::vector<std::vector<double>>& buffers_low() const { return buffers_low_; }
  const std::vector<std::vector<double>>& buffers_high() const { return buffers_high_; }
  const std::vector<AdrEvent>& events() const { return events_; }
  const AdrParams& params() const { return params_; }

 private:
  void update_boundary(std::size_t dim, BoundarySide side, double mean_return);

  AdrParams params_;
  Vec phi_low_;
  Vec phi_high_;
  std::vector<std::vector<double>> buffers_low_;
  std::vector<std::vector<double>> buffers_high_;
  std::optional<AdrProbe> probe_;
  std::vector<AdrEvent> events_;
  std::size_t observed_ = 0;
};

}  // namespace acl
