#include "aslip/terrain.hpp"

#include <cmath>
#include <stdexcept>

namespace aslip {

namespace {

// splitmix64; counter-based so noise has O(1) random access.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t idx) {
  const std::uint64_t h = mix64(seed ^ mix64(idx));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double shape_value(const TerrainSegment& s, double xi) {
  switch (s.kind) {
    case TerrainSegment::Kind::Flat:
      return 0.0;
    case TerrainSegment::Kind::Slope:
      return std::tan(s.p1) * xi;
    case TerrainSegment::Kind::Sine:
      return s.p1 * std::sin(2.0 * M_PI * xi / s.p2);
    case TerrainSegment::Kind::Stairs:
      return s.p1 * std::floor(xi / s.p2);
  }
  return 0.0;
}

}  // namespace

TerrainProfile::TerrainProfile(std::vector<TerrainSegment> segments,
                               double noise_magnitude, std::uint64_t noise_seed,
                               double smoothing_window, double x_start,
                               double noise_grid)
    : segments_(std::move(segments)),
      noise_magnitude_(noise_magnitude),
      noise_grid_(noise_grid),
      noise_seed_(noise_seed),
      smoothing_window_(smoothing_window),
      x_start_(x_start) {
  if (segments_.empty()) throw std::invalid_argument("terrain: no segments");
  if (smoothing_window_ <= 0.0)
    throw std::invalid_argument("terrain: smoothing_window must be > 0");
  if (noise_grid_ <= 0.0)
    throw std::invalid_argument("terrain: noise_grid must be > 0");
  double x = x_start_;
  double offset = segments_.front().kind == TerrainSegment::Kind::Flat
                      ? segments_.front().p1
                      : 0.0;
  for (const auto& s : segments_) {
    if (s.length <= 0.0) throw std::invalid_argument("terrain: segment length");
    seg_start_x_.push_back(x);
    seg_offset_.push_back(offset);
    offset += shape_value(s, s.length);
    x += s.length;
  }
  total_length_ = x - x_start_;
}

double TerrainProfile::segment_height(double x) const {
  // clamp: constant extrapolation just inside the boundary for the smoother
  if (x < x_start_) x = x_start_;
  if (x > x_max()) x = x_max();
  std::size_t i = segments_.size() - 1;
  while (i > 0 && x < seg_start_x_[i]) --i;
  return seg_offset_[i] + shape_value(segments_[i], x - seg_start_x_[i]);
}

double TerrainProfile::noise_at(double x) const {
  if (noise_magnitude_ == 0.0) return 0.0;
  const double u = (x - x_start_) / noise_grid_;
  const double fi = std::floor(u);
  const auto idx = static_cast<std::uint64_t>(static_cast<std::int64_t>(fi));
  const double frac = u - fi;
  const double n0 = (2.0 * uniform01(noise_seed_, idx) - 1.0) * noise_magnitude_;
  const double n1 =
      (2.0 * uniform01(noise_seed_, idx + 1) - 1.0) * noise_magnitude_;
  return n0 + frac * (n1 - n0);
}

double TerrainProfile::height_at(double x) const {
  if (x < x_start_ || x > x_max())
    throw std::out_of_range("terrain: x outside configured range");
  return segment_height(x) + noise_at(x);
}

double TerrainProfile::clean_height_at(double x) const {
  if (x < x_start_ || x > x_max())
    throw std::out_of_range("terrain: x outside configured range");
  return segment_height(x);
}

double TerrainProfile::smoothed_height_at(double x) const {
  if (x < x_start_ || x > x_max())
    throw std::out_of_range("terrain: x outside configured range");
  constexpr int kSamples = 101;
  const double w = smoothing_window_;
  const double h = w / (kSamples - 1);
  double sum = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double xi = x - 0.5 * w + i * h;
    const double weight = (i == 0 || i == kSamples - 1) ? 0.5 : 1.0;
    sum += weight * segment_height(xi);
  }
  return sum * h / w;
}

double TerrainProfile::smoothed_slope_at(double x) const {
  const double w = smoothing_window_;
  return (segment_height(x + 0.5 * w) - segment_height(x - 0.5 * w)) / w;
}

}  // namespace aslip
