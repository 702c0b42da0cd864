#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aslip {

/// One terrain primitive. Each segment contributes a shape function with
/// f(0) = 0 over its horizontal extent, so composites are continuous at
/// joints by construction (the running vertical offset carries over).
struct TerrainSegment {
  enum class Kind { Flat, Slope, Sine, Stairs };
  Kind kind = Kind::Flat;
  double p1 = 0.0;      // flat: height (first segment only), slope: angle [rad],
                        // sine: amplitude [m], stairs: rise [m]
  double p2 = 0.0;      // sine: wavelength [m], stairs: run [m]
  double length = 1.0;  // horizontal extent [m]
};

/// Piecewise ground-height profile with deterministic bounded noise and a
/// moving-average smoothed estimate. Immutable after construction; safe to
/// share across concurrent runs.
class TerrainProfile {
 public:
  TerrainProfile(std::vector<TerrainSegment> segments,
                 double noise_magnitude = 0.0, std::uint64_t noise_seed = 0,
                 double smoothing_window = 0.4, double x_start = 0.0,
                 double noise_grid = kDefaultNoiseGrid);

  /// True ground height including noise. Throws std::out_of_range outside
  /// [x_min, x_max].
  double height_at(double x) const;

  /// Noise-free ground height.
  double clean_height_at(double x) const;

  /// Centered moving average of the noise-free height (trapezoid, 101
  /// samples). The integrand clamps to the profile range near the edges.
  double smoothed_height_at(double x) const;

  /// d/dx of the moving average; exact since the filter is a box average.
  double smoothed_slope_at(double x) const;

  double x_min() const { return x_start_; }
  double x_max() const { return x_start_ + total_length_; }
  double noise_magnitude() const { return noise_magnitude_; }
  double noise_grid() const { return noise_grid_; }
  double smoothing_window() const { return smoothing_window_; }
  const std::vector<TerrainSegment>& segments() const { return segments_; }

  /// Spatial sample spacing of the noise lattice (linear interpolation in
  /// between). Sets the correlation length of the roughness.
  static constexpr double kDefaultNoiseGrid = 0.01;  // m

 private:
  double segment_height(double x) const;
  double noise_at(double x) const;

  std::vector<TerrainSegment> segments_;
  std::vector<double> seg_start_x_;   // absolute x of each segment start
  std::vector<double> seg_offset_;    // accumulated height at segment start
  double noise_magnitude_;
  double noise_grid_;
  std::uint64_t noise_seed_;
  double smoothing_window_;
  double x_start_;
  double total_length_;
};

}  // namespace aslip
