#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphdesign/sphere.hpp"

namespace sphd {

/// Points with positive weights summing to 4 pi.
struct QuadraturePointSet {
  std::vector<SphericalPoint> points;
  std::vector<double> weights;
  std::optional<int> declared_degree;
  // max over 1 <= l <= declared_degree of (4 pi / N) |W_lm| when certified.
  std::optional<double> certification;
  std::string generator;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

/// Free coordinates (theta_2..theta_N, phi_3..phi_N) of a point set whose
/// first point sits at the north pole and whose second point has phi = 0.
struct GaugedConfiguration {
  std::vector<double> free_vars;

  std::size_t point_count() const { return (free_vars.size() + 3) / 2; }
};

struct GaugeResult {
  GaugedConfiguration config;
  bool degenerate = false;  // points 1 and 2 coincide or are antipodal
};

constexpr std::size_t gauge_dimension(std::size_t n) { return n >= 2 ? 2 * n - 3 : 0; }

QuadraturePointSet equal_weight_set(std::vector<SphericalPoint> points, std::string generator);

QuadraturePointSet spiral_points(std::size_t n);
QuadraturePointSet uniform_random_points(std::size_t n, std::uint64_t seed);
/// Midpoint subdivision of the icosahedron, 10 * 4^level + 2 vertices.
QuadraturePointSet icosahedral_points(int level);

/// Rotates the set so that point 1 is the north pole and point 2 lies on the
/// prime meridian, then returns the free coordinates.
GaugeResult fix_gauge(std::span<const SphericalPoint> points);
std::vector<SphericalPoint> unfix_gauge(const GaugedConfiguration& cfg, std::size_t n);

/// Min pairwise Euclidean distance. Uses a sorted sweep in z, exact result.
double separation_distance(std::span<const SphericalPoint> points);

}  // namespace sphd
