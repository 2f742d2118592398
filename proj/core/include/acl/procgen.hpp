#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "acl/rng.hpp"
#include "acl/task_space.hpp"

namespace acl {

// Track geometry shared by Stump Tracks and Parkour (world units).
inline constexpr std::size_t kTrackColumns = 200;
inline constexpr double kTrackLength = 100.0;
inline constexpr double kStartpadGround = 0.0;
inline constexpr double kStartpadCeiling = 5.0;
inline constexpr double kGroundFloor = -10.0;  // lowest reachable ground, water level 0
inline constexpr double kCreeperWidth = 0.25;
inline constexpr double kObstacleStddev = 0.1;  // height noise of stumps and creepers
// Multiplies raw CPPN outputs into world units.
inline constexpr double kCppnHeightScale = 0.08;

/// Fixed-weight CPPN: (x, theta1..3) -> (ground y, ceiling y). Each layer is
/// stored as an out x (in + 1) row-major matrix whose last column is the bias.
struct CppnWeights {
  static constexpr std::array<std::size_t, 6> kWidths{4, 64, 64, 64, 64, 2};

  std::vector<Mat> layers;
  std::uint64_t seed = 0;

  std::size_t parameter_count() const;

  // Canonical binary form: "CPPN", u16 version, u32 layer count, then per
  // layer u32 rows, u32 cols and rows*cols little-endian f64.
  std::vector<std::uint8_t> serialize() const;
  static CppnWeights deserialize(const std::vector<std::uint8_t>& bytes);
  void save(const std::filesystem::path& path) const;
  static CppnWeights load(const std::filesystem::path& path);
};

inline constexpr std::uint64_t kCanonicalCppnSeed = 42;

// Entries i.i.d. N(0, 1), drawn layer by layer in row-major order.
CppnWeights init_cppn_weights(std::uint64_t seed);

// Process-wide weights generated from kCanonicalCppnSeed.
const CppnWeights& canonical_cppn();

// (ground, ceiling) raw CPPN outputs.
std::pair<double, double> cppn_forward(const CppnWeights& weights, double x,
                                       const std::array<double, 3>& theta);

enum class CppnSpace { Easy, Medium, Hard };
CppnSpace parse_cppn_space(std::string_view text);
std::string_view to_string(CppnSpace space);
// Theta bounds of each difficulty setup.
BoxSpace theta_bounds(CppnSpace space);

// 6D Parkour task space: theta (3), creeper height, creeper spacing, water level.
BoxSpace parkour_space(CppnSpace space = CppnSpace::Medium);

struct TerrainSpec {
  std::array<double, 3> theta{0.0, 0.0, 0.0};
  double creeper_height = 0.0;   // mu_c in [0, 4]
  double creeper_spacing = 5.0;  // Delta_c in [0, 5]
  double water_level = 0.0;      // tau in [0, 1]
  double smoothing = 10.0;       // delta
  std::size_t columns = kTrackColumns;

  // Throws std::invalid_argument when outside the bounds of `space` or the
  // creeper/water ranges.
  void validate(CppnSpace space) const;

  // Reads a 6D Parkour task.
  static TerrainSpec from_task(const Task& task);
};

struct Creeper {
  double x = 0.0;
  double height = 0.0;
  double width = kCreeperWidth;
};

struct Terrain {
  std::vector<double> ground;
  std::vector<double> ceiling;
  std::vector<Creeper> creepers;
  double water_y = kGroundFloor;

  // Horizontal position of column i.
  double column_x(std::size_t i) const;

  double min_clearance() const;  // min(ceiling - ground)
  nlohmann::json to_json() const;
};

// Raw CPPN profile sampled at x_i = i / smoothing, aligned to the startpads.
std::pair<std::vector<double>, std::vector<double>> terrain_profile(const CppnWeights& weights,
                                                                   const std::array<double, 3>& theta,
                                                                   double smoothing,
                                                                   std::size_t columns);

Terrain generate_terrain(const TerrainSpec& spec, const CppnWeights& weights, Rng& rng);

struct Stump {
  double x = 0.0;
  double height = 0.0;
};

struct StumpTrackSpec {
  double mean_height = 0.0;  // mu_s
  double spacing = 0.0;      // Delta_s
  std::vector<Stump> stumps;

  nlohmann::json to_json() const;
};

// Stumps every `spacing` along the track, heights N(mean, 0.1) clamped at 0.
// Negative means are accepted only with allow_negative. Throws
// std::invalid_argument for spacing <= 0.
StumpTrackSpec generate_stumps(double mean_height, double spacing, bool allow_negative, Rng& rng);

/// Fixed world-to-pixel transform used by the SVG renderer.
struct Viewport {
  static constexpr double kWidthPx = 1000.0;
  static constexpr double kHeightPx = 400.0;
  static constexpr double kWorldXMin = 0.0;
  static constexpr double kWorldXMax = kTrackLength;
  static constexpr double kWorldYMin = -15.0;
  static constexpr double kWorldYMax = 25.0;

  static double px_x(double world_x) {
    return (world_x - kWorldXMin) / (kWorldXMax - kWorldXMin) * kWidthPx;
  }
  static double px_y(double world_y) {
    return kHeightPx - (world_y - kWorldYMin) / (kWorldYMax - kWorldYMin) * kHeightPx;
  }
};

std::string render_svg(const Terrain& terrain);
std::string render_svg(const StumpTrackSpec& track);

}  // namespace acl
