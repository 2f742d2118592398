#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "acl/rng.hpp"

namespace acl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A point in a task space, in task units.
struct Task {
  Vec coords;

  Task() = default;
  explicit Task(Vec c) : coords(std::move(c)) {}
  Task(std::initializer_list<double> values);

  std::size_t dims() const { return static_cast<std::size_t>(coords.size()); }
  double operator[](std::size_t d) const { return coords[static_cast<Eigen::Index>(d)]; }
  bool operator==(const Task& other) const;
};

/// Axis-aligned box [lower, upper] with lower < upper in every dimension.
class BoxSpace {
 public:
  BoxSpace(Vec lower, Vec upper);
  BoxSpace(std::initializer_list<std::pair<double, double>> bounds);

  std::size_t dims() const { return static_cast<std::size_t>(lower_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  double lower(std::size_t d) const { return lower_[static_cast<Eigen::Index>(d)]; }
  double upper(std::size_t d) const { return upper_[static_cast<Eigen::Index>(d)]; }
  Vec range() const { return upper_ - lower_; }
  Vec center() const { return 0.5 * (lower_ + upper_); }
  double volume() const { return range().prod(); }

  bool contains(const Task& task) const;

  // Affine maps between task units and the unit cube.
  Vec to_unit(const Vec& coords) const;
  Vec from_unit(const Vec& unit) const;

  nlohmann::json to_json() const;
  static BoxSpace from_json(const nlohmann::json& j);

 private:
  Vec lower_;
  Vec upper_;
};

Task uniform_sample(const BoxSpace& space, Rng& rng);

// Clamps every coordinate into the box. Throws std::invalid_argument on a
// dimension mismatch.
Task clip(const BoxSpace& space, const Task& task);

/// Per-dimension tiling of a box into k equal intervals together with a
/// permutation of those intervals. Applying the map moves a coordinate from
/// its tile to the tile at the same position in the shuffled list.
struct ShuffleMap {
  using Interval = std::pair<double, double>;

  std::size_t k = 1;
  std::vector<std::vector<Interval>> original;
  std::vector<std::vector<Interval>> shuffled;

  std::size_t dims() const { return original.size(); }

  nlohmann::json to_json() const;
  static ShuffleMap from_json(const nlohmann::json& j);
};

// Throws std::invalid_argument when k == 0.
ShuffleMap build_shuffle(const BoxSpace& space, std::size_t k, Rng& rng);

// Piecewise-affine move of each coordinate from its original tile into the
// matching shuffled tile. A coordinate on a tile edge belongs to the first
// tile (in scan order) whose closed interval contains it. Throws
// std::invalid_argument for tasks outside the map's box.
Task shuffle_interpolate(const ShuffleMap& map, const Task& task);

// Inverse of shuffle_interpolate on tile interiors.
Task invert_shuffle(const ShuffleMap& map, const Task& task);

}  // namespace acl
