#include "sphdesign/pointsets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "sphdesign/random.hpp"

namespace sphd {

namespace {

double wrap_phi(double phi) {
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return phi;
}

using Mat3 = std::array<Vec3, 3>;

Vec3 rotate(const Mat3& r, const Vec3& v) {
  return {dot(r[0], v), dot(r[1], v), dot(r[2], v)};
}

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Rotation taking unit vector u onto +z.
Mat3 rotation_to_north(const Vec3& u) {
  const double c = u[2];
  if (c > 1.0 - 1e-15) return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  if (c < -1.0 + 1e-15) return {{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
  // Axis k = u x z / |u x z|, angle acos(c); Rodrigues formula.
  Vec3 k = cross(u, {0.0, 0.0, 1.0});
  const double s = norm(k);
  for (auto& x : k) x /= s;
  Mat3 r{};
  const Mat3 kx{{{0, -k[2], k[1]}, {k[2], 0, -k[0]}, {-k[1], k[0], 0}}};
  const Mat3 kx2 = mul(kx, kx);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = (i == j ? 1.0 : 0.0) + s * kx[i][j] + (1.0 - c) * kx2[i][j];
  return r;
}

Mat3 rotation_about_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

}  // namespace

QuadraturePointSet equal_weight_set(std::vector<SphericalPoint> points, std::string generator) {
  QuadraturePointSet q;
  q.weights.assign(points.size(), points.empty() ? 0.0 : kFourPi / static_cast<double>(points.size()));
  q.points = std::move(points);
  q.generator = std::move(generator);
  return q;
}

QuadraturePointSet spiral_points(std::size_t n) {
  if (n == 0) throw std::invalid_argument("spiral_points: N must be positive");
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const double nn = static_cast<double>(n);
  std::vector<SphericalPoint> pts(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double q = 2.0 * static_cast<double>(i) - (nn + 1.0);
    pts[i - 1] = {std::acos(q / nn), wrap_phi(kPi * q / golden)};
  }
  return equal_weight_set(std::move(pts), "spiral");
}

QuadraturePointSet uniform_random_points(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("uniform_random_points: N must be positive");
  Rng rng(seed);
  std::vector<SphericalPoint> pts(n);
  for (auto& p : pts) {
    const double k = rng.uniform();
    const double q = rng.uniform();
    p = {std::acos(1.0 - 2.0 * k), wrap_phi(2.0 * kPi * q)};
  }
  auto set = equal_weight_set(std::move(pts), "uniform");
  set.seed = seed;
  return set;
}

QuadraturePointSet icosahedral_points(int level) {
  if (level < 0) throw std::invalid_argument("icosahedral_points: negative level");
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0},
                         {0, -1, g}, {0, 1, g}, {0, -1, -g}, {0, 1, -g},
                         {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  std::vector<std::array<std::size_t, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& p : v) {
    const double r = norm(p);
    for (auto& x : p) x /= r;
  }
  for (int lv = 0; lv < level; ++lv) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
    auto midpoint = [&](std::size_t a, std::size_t b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      Vec3 m{v[a][0] + v[b][0], v[a][1] + v[b][1], v[a][2] + v[b][2]};
      const double r = norm(m);
      for (auto& x : m) x /= r;
      v.push_back(m);
      mid.emplace(key, v.size() - 1);
      return v.size() - 1;
    };
    std::vector<std::array<std::size_t, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const std::size_t ab = midpoint(f[0], f[1]);
      const std::size_t bc = midpoint(f[1], f[2]);
      const std::size_t ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  std::vector<SphericalPoint> pts;
  pts.reserve(v.size());
  for (const auto& p : v) pts.push_back(cart_to_sph(p));
  return equal_weight_set(std::move(pts), "icosahedral");
}

GaugeResult fix_gauge(std::span<const SphericalPoint> points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("fix_gauge: need at least two points");
  GaugeResult res;
  const Mat3 r1 = rotation_to_north(sph_to_cart(points[0]));
  const Vec3 x2 = rotate(r1, sph_to_cart(points[1]));
  const double rho = std::hypot(x2[0], x2[1]);
  Mat3 r = r1;
  if (rho < 1e-14) {
    res.degenerate = true;
  } else {
    r = mul(rotation_about_z(-std::atan2(x2[1], x2[0])), r1);
  }
  auto& fv = res.config.free_vars;
  fv.assign(gauge_dimension(n), 0.0);
  for (std::size_t p = 1; p < n; ++p) {
    const SphericalPoint q = cart_to_sph(rotate(r, sph_to_cart(points[p])));
    fv[p - 1] = q.theta;
    if (p >= 2) fv[n - 1 + (p - 2)] = q.phi;
  }
  return res;
}

std::vector<SphericalPoint> unfix_gauge(const GaugedConfiguration& cfg, std::size_t n) {
  if (cfg.free_vars.size() != gauge_dimension(n))
    throw std::invalid_argument("unfix_gauge: configuration length does not match N");
  std::vector<SphericalPoint> pts(n);
  for (std::size_t p = 1; p < n; ++p) {
    const double th = cfg.free_vars[p - 1];
    const double ph = p >= 2 ? cfg.free_vars[n - 1 + (p - 2)] : 0.0;
    pts[p] = normalize({th, ph});
  }
  return pts;
}

double separation_distance(std::span<const SphericalPoint> points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("separation_distance: need at least two points");
  std::vector<Vec3> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = sph_to_cart(points[i]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a][2] < x[b][2]; });
  double best = 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = x[order[i]];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3& b = x[order[j]];
      if (b[2] - a[2] >= best) break;
      const Vec3 d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
      best = std::min(best, norm(d));
    }
  }
  return best;
}

}  // namespace sphd
