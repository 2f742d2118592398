#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracle {

// Hand-stepped ADR boundaries: one buffer per (dimension, side), boundary
// moves applied only when a buffer fills.
struct AdrBoundaries {
  std::vector<double> space_low, space_high, phi_low, phi_high;
  std::vector<std::vector<double>> buf_low, buf_high;
  double t_low, t_high, step;
  std::size_t m;

  AdrBoundaries(std::vector<double> lo, std::vector<double> hi, std::vector<double> anchor, double tl, double th,
                double delta, std::size_t buffer)
      : space_low(std::move(lo)), space_high(std::move(hi)), phi_low(anchor), phi_high(anchor),
        buf_low(anchor.size()), buf_high(anchor.size()), t_low(tl), t_high(th), step(delta), m(buffer) {}

  void feed(std::size_t dim, bool upper, double ret) {
    auto& buf = upper ? buf_high[dim] : buf_low[dim];
    buf.push_back(ret);
    if (buf.size() < m) return;
    const double p = std::accumulate(buf.begin(), buf.end(), 0.0) / static_cast<double>(buf.size());
    buf.clear();
    if (!upper) {
      double v = phi_low[dim];
      if (p < t_low) v = v + step;
      if (p > t_low) v = v - step;
      if (v < space_low[dim]) v = space_low[dim];
      if (v > phi_high[dim]) v = phi_high[dim];
      phi_low[dim] = v;
    } else {
      double v = phi_high[dim];
      if (p < t_low) v = v - step;
      else if (p > t_high) v = v + step;
      if (v > space_high[dim]) v = space_high[dim];
      if (v < phi_low[dim]) v = phi_low[dim];
      phi_high[dim] = v;
    }
  }
};

}  // namespace oracle
