#include "acl/procgen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace acl {

namespace {

constexpr std::uint16_t kWeightsVersion = 1;

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  out.insert(out.end(), std::begin(bytes), std::end(bytes));
}

template <typename T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("truncated CPPN weights file");
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

std::size_t CppnWeights::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.size());
  return n;
}

std::vector<std::uint8_t> CppnWeights::serialize() const {
  std::vector<std::uint8_t> out{'C', 'P', 'P', 'N'};
  put_le<std::uint16_t>(out, kWeightsVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(layers.size()));
  for (const auto& layer : layers) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(layer.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(layer.cols()));
    for (Eigen::Index r = 0; r < layer.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.cols(); ++c) put_le<double>(out, layer(r, c));
  }
  return out;
}

CppnWeights CppnWeights::deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), "CPPN", 4) != 0) {
    throw std::runtime_error("not a CPPN weights file");
  }
  std::size_t pos = 4;
  const auto version = get_le<std::uint16_t>(bytes, pos);
  if (version != kWeightsVersion) {
    throw std::runtime_error("unsupported CPPN weights version " + std::to_string(version));
  }
  const auto count = get_le<std::uint32_t>(bytes, pos);
  if (count != kWidths.size() - 1) throw std::runtime_error("unexpected CPPN layer count");
  CppnWeights w;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto rows = get_le<std::uint32_t>(bytes, pos);
    const auto cols = get_le<std::uint32_t>(bytes, pos);
    if (rows != kWidths[i + 1] || cols != kWidths[i] + 1) {
      throw std::runtime_error("CPPN layer " + std::to_string(i) + " has the wrong shape");
    }
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get_le<double>(bytes, pos);
    w.layers.push_back(std::move(m));
  }
  if (pos != bytes.size()) throw std::runtime_error("trailing bytes in CPPN weights file");
  return w;
}

void CppnWeights::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

CppnWeights CppnWeights::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

CppnWeights init_cppn_weights(std::uint64_t seed) {
  Rng rng(seed);
  CppnWeights w;
  w.seed = seed;
  for (std::size_t i = 0; i + 1 < CppnWeights::kWidths.size(); ++i) {
    Mat m(static_cast<Eigen::Index>(CppnWeights::kWidths[i + 1]),
          static_cast<Eigen::Index>(CppnWeights::kWidths[i] + 1));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal();
    w.layers.push_back(std::move(m));
  }
  return w;
}

const CppnWeights& canonical_cppn() {
  static const CppnWeights weights = init_cppn_weights(kCanonicalCppnSeed);
  return weights;
}

std::pair<double, double> cppn_forward(const CppnWeights& weights, double x,
                                       const std::array<double, 3>& theta) {
  Vec h(4);
  h << x, theta[0], theta[1], theta[2];
  for (std::size_t i = 0; i < weights.layers.size(); ++i) {
    const Mat& layer = weights.layers[i];
    const Eigen::Index in = layer.cols() - 1;
    Vec z = layer.leftCols(in) * h + layer.col(in);
    if (i + 1 == weights.layers.size()) {
      h = std::move(z);
    } else if (i % 2 == 0) {
      h = z.array().tanh().matrix();
    } else {
      h = z.unaryExpr([](double v) { return softplus(v); });
    }
  }
  return {h[0], h[1]};
}

CppnSpace parse_cppn_space(std::string_view text) {
  if (text == "easy") return CppnSpace::Easy;
  if (text == "medium") return CppnSpace::Medium;
  if (text == "hard") return CppnSpace::Hard;
  throw std::invalid_argument("unknown CPPN space '" + std::string(text) + "' (easy|medium|hard)");
}

std::string_view to_string(CppnSpace space) {
  switch (space) {
    case CppnSpace::Easy: return "easy";
    case CppnSpace::Medium: return "medium";
    case CppnSpace::Hard: return "hard";
  }
  return "medium";
}

BoxSpace theta_bounds(CppnSpace space) {
  switch (space) {
    case CppnSpace::Easy: return BoxSpace{{-0.25, -0.05}, {0.8, 1.0}, {0.0, 0.2}};
    case CppnSpace::Medium: return BoxSpace{{-0.35, 0.05}, {0.6, 1.0}, {-0.1, 0.3}};
    case CppnSpace::Hard: return BoxSpace{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};
  }
  throw std::invalid_argument("bad CPPN space");
}

BoxSpace parkour_space(CppnSpace space) {
  const BoxSpace theta = theta_bounds(space);
  Vec lo(6), hi(6);
  lo << theta.lower(), 0.0, 0.0, 0.0;
  hi << theta.upper(), 4.0, 5.0, 1.0;
  return BoxSpace(lo, hi);
}

void TerrainSpec::validate(CppnSpace space) const {
  const BoxSpace bounds = theta_bounds(space);
  if (!bounds.contains(Task{theta[0], theta[1], theta[2]})) {
    throw std::invalid_argument("theta outside the " + std::string(to_string(space)) + " bounds");
  }
  if (creeper_height < 0.0 || creeper_height > 4.0) throw std::invalid_argument("creeper height outside [0, 4]");
  if (creeper_spacing < 0.0 || creeper_spacing > 5.0) throw std::invalid_argument("creeper spacing outside [0, 5]");
  if (water_level < 0.0 || water_level > 1.0) throw std::invalid_argument("water level outside [0, 1]");
  if (!(smoothing > 0.0)) throw std::invalid_argument("smoothing must be positive");
  if (columns < 2) throw std::invalid_argument("terrain needs at least two columns");
}

TerrainSpec TerrainSpec::from_task(const Task& task) {
  if (task.dims() != 6) throw std::invalid_argument("parkour tasks have 6 coordinates");
  TerrainSpec spec;
  spec.theta = {task[0], task[1], task[2]};
  spec.creeper_height = task[3];
  spec.creeper_spacing = task[4];
  spec.water_level = task[5];
  return spec;
}

double Terrain::column_x(std::size_t i) const {
  return kTrackLength * static_cast<double>(i) / static_cast<double>(ground.size());
}

double Terrain::min_clearance() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ground.size(); ++i) m = std::min(m, ceiling[i] - ground[i]);
  return m;
}

nlohmann::json Terrain::to_json() const {
  nlohmann::json creeper_list = nlohmann::json::array();
  for (const auto& c : creepers) creeper_list.push_back({{"x", c.x}, {"h", c.height}, {"w", c.width}});
  return {{"ground", ground}, {"ceiling", ceiling}, {"creepers", creeper_list}, {"water_y", water_y}};
}

std::pair<std::vector<double>, std::vector<double>> terrain_profile(const CppnWeights& weights,
                                                                   const std::array<double, 3>& theta,
                                                                   double smoothing,
                                                                   std::size_t columns) {
  std::vector<double> ground(columns), ceiling(columns);
  for (std::size_t i = 0; i < columns; ++i) {
    const auto [y, yc] = cppn_forward(weights, static_cast<double>(i) / smoothing, theta);
    ground[i] = kCppnHeightScale * y;
    ceiling[i] = kCppnHeightScale * yc;
  }
  const double y0 = ground.front();
  const double yc0 = ceiling.front();
  for (auto& y : ground) y = y + kStartpadGround - y0;
  for (auto& y : ceiling) y = y + kStartpadCeiling - yc0;
  return {std::move(ground), std::move(ceiling)};
}

Terrain generate_terrain(const TerrainSpec& spec, const CppnWeights& weights, Rng& rng) {
  Terrain t;
  std::tie(t.ground, t.ceiling) = terrain_profile(weights, spec.theta, spec.smoothing, spec.columns);
  const double pitch = spec.creeper_spacing + kCreeperWidth;
  for (std::size_t j = 0;; ++j) {
    const double x = static_cast<double>(j) * pitch;
    if (x >= kTrackLength) break;
    t.creepers.push_back({x, std::max(0.0, rng.normal(spec.creeper_height, kObstacleStddev)), kCreeperWidth});
  }
  const double top = *std::max_element(t.ceiling.begin(), t.ceiling.end());
  t.water_y = kGroundFloor + spec.water_level * (top - kGroundFloor);
  return t;
}

nlohmann::json StumpTrackSpec::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : stumps) list.push_back({{"x", s.x}, {"h", s.height}});
  return {{"mean_height", mean_height}, {"spacing", spacing}, {"stumps", list}};
}

StumpTrackSpec generate_stumps(double mean_height, double spacing, bool allow_negative, Rng& rng) {
  if (!(spacing > 0.0)) throw std::invalid_argument("stump spacing must be positive");
  if (mean_height < 0.0 && !allow_negative) {
    throw std::invalid_argument("negative stump height needs the clipping variant");
  }
  StumpTrackSpec track;
  track.mean_height = mean_height;
  track.spacing = spacing;
  for (std::size_t j = 1;; ++j) {
    const double x = static_cast<double>(j) * spacing;
    if (x >= kTrackLength) break;
    track.stumps.push_back({x, std::max(0.0, rng.normal(mean_height, kObstacleStddev))});
  }
  return track;
}

namespace {

std::string svg_header() {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << Viewport::kWidthPx
     << "\" height=\"" << Viewport::kHeightPx << "\" viewBox=\"0 0 " << Viewport::kWidthPx << ' '
     << Viewport::kHeightPx << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << Viewport::kWidthPx << "\" height=\"" << Viewport::kHeightPx
     << "\" fill=\"#f4f1ea\"/>\n";
  return os.str();
}

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys, std::string_view id,
                     std::string_view colour) {
  std::ostringstream os;
  os << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ' ';
    os << fmt(Viewport::px_x(xs[i])) << ',' << fmt(Viewport::px_y(ys[i]));
  }
  os << "\"/>\n";
  return os.str();
}

}  // namespace

std::string render_svg(const Terrain& terrain) {
  std::ostringstream os;
  os << svg_header();
  const double water_top = Viewport::px_y(terrain.water_y);
  const double water_bottom = Viewport::px_y(kGroundFloor);
  if (water_bottom > water_top) {
    os << "<rect id=\"water\" x=\"0\" y=\"" << fmt(water_top) << "\" width=\"" << fmt(Viewport::kWidthPx)
       << "\" height=\"" << fmt(water_bottom - water_top) << "\" fill=\"#4a90d9\" fill-opacity=\"0.35\"/>\n";
  }
  std::vector<double> xs(terrain.ground.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = terrain.column_x(i);
  os << polyline(xs, terrain.ground, "ground", "#5b4a32");
  os << polyline(xs, terrain.ceiling, "ceiling", "#444444");
  os << "<g id=\"creepers\" fill=\"#3c8d2f\">\n";
  for (const auto& c : terrain.creepers) {
    // Creepers hang from the ceiling column they start under.
    const std::size_t col = std::min(terrain.ceiling.size() - 1,
                                     static_cast<std::size_t>(c.x / kTrackLength * static_cast<double>(terrain.ceiling.size())));
    const double top = terrain.ceiling[col];
    const double y0 = Viewport::px_y(top);
    const double y1 = Viewport::px_y(top - c.height);
    os << "<rect x=\"" << fmt(Viewport::px_x(c.x)) << "\" y=\"" << fmt(y0) << "\" width=\""
       << fmt(Viewport::px_x(c.x + c.width) - Viewport::px_x(c.x)) << "\" height=\"" << fmt(y1 - y0) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string render_svg(const StumpTrackSpec& track) {
  std::ostringstream os;
  os << svg_header();
  os << polyline({0.0, kTrackLength}, {kStartpadGround, kStartpadGround}, "ground", "#5b4a32");
  os << "<g id=\"stumps\" fill=\"#8b5a2b\">\n";
  for (const auto& s : track.stumps) {
    const double y0 = Viewport::px_y(kStartpadGround + s.height);
    const double y1 = Viewport::px_y(kStartpadGround);
    os << "<rect x=\"" << fmt(Viewport::px_x(s.x)) << "\" y=\"" << fmt(y0) << "\" width=\""
       << fmt(Viewport::px_x(s.x + 0.5) - Viewport::px_x(s.x)) << "\" height=\"" << fmt(y1 - y0) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace acl
