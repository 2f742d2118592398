#include "acl/task_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace acl {

namespace {

void require_dims(const BoxSpace& space, const Task& task) {
  if (task.dims() != space.dims()) {
    throw std::invalid_argument("task has " + std::to_string(task.dims()) +
                                " coordinates, space has " + std::to_string(space.dims()));
  }
}

// Slack granted to coordinates that overshoot a bound through rounding.
constexpr double kEdgeSlack = 1e-9;

double map_interval(double x, const ShuffleMap::Interval& from, const ShuffleMap::Interval& to) {
  if (from == to) return x;
  const double t = (x - from.first) / (from.second - from.first);
  return to.first + t * (to.second - to.first);
}

// Index of the first closed interval containing x. Coordinates within
// kEdgeSlack of the outer bounds are clamped into the first/last tile.
std::size_t find_tile(const std::vector<ShuffleMap::Interval>& tiles, double x) {
  for (std::size_t j = 0; j < tiles.size(); ++j) {
    if (tiles[j].first <= x && x <= tiles[j].second) return j;
  }
  const double lo = tiles.front().first;
  const double hi = tiles.back().second;
  const double slack = kEdgeSlack * (hi - lo);
  if (x < lo && x >= lo - slack) return 0;
  if (x > hi && x <= hi + slack) return tiles.size() - 1;
  throw std::invalid_argument("coordinate " + std::to_string(x) + " lies outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

Task apply(const ShuffleMap& map, const Task& task, bool forward) {
  if (task.dims() != map.dims()) {
    throw std::invalid_argument("task dimension does not match shuffle map");
  }
  Vec out(task.coords.size());
  for (std::size_t d = 0; d < map.dims(); ++d) {
    const auto& from = forward ? map.original[d] : map.shuffled[d];
    const auto& to = forward ? map.shuffled[d] : map.original[d];
    if (forward) {
      const std::size_t j = find_tile(from, task[d]);
      out[static_cast<Eigen::Index>(d)] = map_interval(task[d], from[j], to[j]);
    } else {
      // The shuffled list is not sorted; scan it in its own order.
      std::size_t j = from.size();
      for (std::size_t i = 0; i < from.size(); ++i) {
        if (from[i].first <= task[d] && task[d] <= from[i].second) {
          j = i;
          break;
        }
      }
      if (j == from.size()) {
        // Out by rounding only: fall back to the tile covering the clamped value.
        const double lo = map.original[d].front().first;
        const double hi = map.original[d].back().second;
        const double slack = kEdgeSlack * (hi - lo);
        if (task[d] < lo - slack || task[d] > hi + slack) {
          throw std::invalid_argument("coordinate outside shuffle map bounds");
        }
        const double clamped = std::clamp(task[d], lo, hi);
        for (std::size_t i = 0; i < from.size(); ++i) {
          if (from[i].first <= clamped && clamped <= from[i].second) {
            j = i;
            break;
          }
        }
      }
      out[static_cast<Eigen::Index>(d)] = map_interval(task[d], from[j], to[j]);
    }
  }
  return Task(std::move(out));
}

}  // namespace

Task::Task(std::initializer_list<double> values) : coords(static_cast<Eigen::Index>(values.size())) {
  Eigen::Index i = 0;
  for (double v : values) coords[i++] = v;
}

bool Task::operator==(const Task& other) const {
  return coords.size() == other.coords.size() && coords == other.coords;
}

BoxSpace::BoxSpace(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0) throw std::invalid_argument("task space needs at least one dimension");
  if (lower_.size() != upper_.size()) {
    throw std::invalid_argument("lower and upper bounds differ in length");
  }
  for (Eigen::Index d = 0; d < lower_.size(); ++d) {
    if (!(lower_[d] < upper_[d]) || !std::isfinite(lower_[d]) || !std::isfinite(upper_[d])) {
      throw std::invalid_argument("dimension " + std::to_string(d) +
                                  " needs finite lower < upper");
    }
  }
}

BoxSpace::BoxSpace(std::initializer_list<std::pair<double, double>> bounds)
    : BoxSpace([&] {
        Vec lo(static_cast<Eigen::Index>(bounds.size()));
        Eigen::Index i = 0;
        for (const auto& b : bounds) lo[i++] = b.first;
        return lo;
      }(),
               [&] {
                 Vec hi(static_cast<Eigen::Index>(bounds.size()));
                 Eigen::Index i = 0;
                 for (const auto& b : bounds) hi[i++] = b.second;
                 return hi;
               }()) {}

bool BoxSpace::contains(const Task& task) const {
  if (task.dims() != dims()) return false;
  return (task.coords.array() >= lower_.array()).all() &&
         (task.coords.array() <= upper_.array()).all();
}

Vec BoxSpace::to_unit(const Vec& coords) const {
  return ((coords - lower_).array() / range().array()).matrix();
}

Vec BoxSpace::from_unit(const Vec& unit) const {
  return lower_ + (unit.array() * range().array()).matrix();
}

nlohmann::json BoxSpace::to_json() const {
  nlohmann::json j;
  j["lower"] = std::vector<double>(lower_.data(), lower_.data() + lower_.size());
  j["upper"] = std::vector<double>(upper_.data(), upper_.data() + upper_.size());
  return j;
}

BoxSpace BoxSpace::from_json(const nlohmann::json& j) {
  const auto lo = j.at("lower").get<std::vector<double>>();
  const auto hi = j.at("upper").get<std::vector<double>>();
  return BoxSpace(Eigen::Map<const Vec>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                  Eigen::Map<const Vec>(hi.data(), static_cast<Eigen::Index>(hi.size())));
}

Task uniform_sample(const BoxSpace& space, Rng& rng) {
  Vec c(static_cast<Eigen::Index>(space.dims()));
  for (std::size_t d = 0; d < space.dims(); ++d) {
    c[static_cast<Eigen::Index>(d)] = rng.uniform(space.lower(d), space.upper(d));
  }
  return Task(std::move(c));
}

Task clip(const BoxSpace& space, const Task& task) {
  require_dims(space, task);
  return Task(task.coords.cwiseMax(space.lower()).cwiseMin(space.upper()));
}

ShuffleMap build_shuffle(const BoxSpace& space, std::size_t k, Rng& rng) {
  if (k == 0) throw std::invalid_argument("shuffle needs at least one cut per dimension");
  ShuffleMap map;
  map.k = k;
  for (std::size_t d = 0; d < space.dims(); ++d) {
    const double lo = space.lower(d);
    const double size = std::abs(space.upper(d) - lo) / static_cast<double>(k);
    std::vector<ShuffleMap::Interval> tiles;
    tiles.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double a = lo + static_cast<double>(j) * size;
      // Last edge pinned to the exact bound so the tiling has no gap.
      const double b = (j + 1 == k) ? space.upper(d) : lo + static_cast<double>(j + 1) * size;
      tiles.emplace_back(a, b);
    }
    auto perm = tiles;
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.index(i)]);
    }
    map.original.push_back(std::move(tiles));
    map.shuffled.push_back(std::move(perm));
  }
  return map;
}

Task shuffle_interpolate(const ShuffleMap& map, const Task& task) { return apply(map, task, true); }

Task invert_shuffle(const ShuffleMap& map, const Task& task) { return apply(map, task, false); }

nlohmann::json ShuffleMap::to_json() const {
  auto encode = [](const std::vector<std::vector<Interval>>& all) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& dim : all) {
      nlohmann::json row = nlohmann::json::array();
      for (const auto& [lo, hi] : dim) row.push_back({lo, hi});
      out.push_back(std::move(row));
    }
    return out;
  };
  return {{"k", k}, {"dims", dims()}, {"original", encode(original)}, {"shuffled", encode(shuffled)}};
}

ShuffleMap ShuffleMap::from_json(const nlohmann::json& j) {
  auto decode = [](const nlohmann::json& all) {
    std::vector<std::vector<Interval>> out;
    for (const auto& dim : all) {
      std::vector<Interval> row;
      for (const auto& pair : dim) row.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
      out.push_back(std::move(row));
    }
    return out;
  };
  ShuffleMap map;
  map.k = j.at("k").get<std::size_t>();
  map.original = decode(j.at("original"));
  map.shuffled = decode(j.at("shuffled"));
  if (map.original.size() != j.at("dims").get<std::size_t>() ||
      map.shuffled.size() != map.original.size()) {
    throw std::invalid_argument("shuffle map dims field disagrees with interval lists");
  }
  for (std::size_t d = 0; d < map.original.size(); ++d) {
    if (map.original[d].size() != map.k || map.shuffled[d].size() != map.k) {
      throw std::invalid_argument("shuffle map needs k intervals per dimension");
    }
  }
  return map;
}

}  // namespace acl
