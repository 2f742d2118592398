#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "acl/harness.hpp"
#include "acl/stats.hpp"

namespace acl {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string plot_curves_svg(const RunGroups& groups, std::string_view title) {
  std::size_t max_episode = 1;
  for (const auto& [teacher, runs] : groups) {
    for (const auto& run : runs) {
      if (!run.empty()) max_episode = std::max(max_episode, run.back().episode);
    }
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double episode) { return kLeft + episode / static_cast<double>(max_episode) * plot_w; };
  auto py = [&](double pct) { return kTop + (1.0 - std::clamp(pct, 0.0, 100.0) / 100.0) * plot_h; };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << escape(title)
     << "</text>\n";

  for (int tick = 0; tick <= 100; tick += 20) {
    const double y = py(tick);
    os << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << y
       << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double ep = static_cast<double>(max_episode) * i / 4.0;
    os << "<text x=\"" << px(ep) << "\" y=\"" << kTop + plot_h + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << std::llround(ep) << "</text>\n";
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">episodes</text>\n";
  os << "<text transform=\"translate(18," << kTop + plot_h / 2
     << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">% mastered test tasks</text>\n";

  std::size_t colour = 0;
  for (const auto& [teacher, runs] : groups) {
    if (runs.empty() || runs.front().empty()) continue;
    const char* stroke = kPalette[colour % kPalette.size()];
    const std::size_t points = runs.front().size();
    std::vector<double> xs, means, ses;
    for (std::size_t i = 0; i < points; ++i) {
      std::vector<double> scores;
      for (const auto& run : runs) {
        if (i < run.size()) scores.push_back(run[i].pct_mastered);
      }
      xs.push_back(px(static_cast<double>(runs.front()[i].episode)));
      means.push_back(mean(scores));
      ses.push_back(standard_error(scores));
    }
    os << "<g id=\"curve-" << escape(teacher) << "\">\n<polygon fill=\"" << stroke << "\" fill-opacity=\"0.2\" points=\"";
    for (std::size_t i = 0; i < points; ++i) os << xs[i] << ',' << py(means[i] + ses[i]) << ' ';
    for (std::size_t i = points; i-- > 0;) os << xs[i] << ',' << py(means[i] - ses[i]) << ' ';
    os << "\"/>\n<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << stroke << "\" points=\"";
    for (std::size_t i = 0; i < points; ++i) os << xs[i] << ',' << py(means[i]) << ' ';
    os << "\"/>\n</g>\n";
    const double ly = kTop + 14.0 + 20.0 * static_cast<double>(colour);
    os << "<line x1=\"" << kLeft + plot_w + 14 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + plot_w + 38 << "\" y2=\""
       << ly << "\" stroke-width=\"3\" stroke=\"" << stroke << "\"/>\n";
    os << "<text x=\"" << kLeft + plot_w + 44 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
       << escape(teacher) << " (" << runs.size() << ")</text>\n";
    ++colour;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace acl
