#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sphdesign/objective.hpp"
#include "sphdesign/pointset_io.hpp"
#include "sphdesign/pointsets.hpp"
#include "support.hpp"

using namespace sphd;

namespace {

double brute_separation(const std::vector<SphericalPoint>& pts) {
  double best = 1e300;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const auto a = sph_to_cart(pts[i]), b = sph_to_cart(pts[j]);
      best = std::min(best, std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]));
    }
  return best;
}

double weight_sum(const QuadraturePointSet& s) {
  double w = 0.0;
  for (double x : s.weights) w += x;
  return w;
}

void check_ranges(const QuadraturePointSet& s) {
  for (const auto& p : s.points) {
    CHECK(p.theta >= 0.0);
    CHECK(p.theta <= kPi);
    CHECK(p.phi >= 0.0);
    CHECK(p.phi < 2 * kPi);
  }
}

std::vector<SphericalPoint> rotate(const std::vector<SphericalPoint>& pts, double a, double b, double c) {
  // Z(a) Y(b) Z(c)
  const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b), cc = std::cos(c), sc = std::sin(c);
  const double R[3][3] = {{ca * cb * cc - sa * sc, -ca * cb * sc - sa * cc, ca * sb},
                          {sa * cb * cc + ca * sc, -sa * cb * sc + ca * cc, sa * sb},
                          {-sb * cc, sb * sc, cb}};
  std::vector<SphericalPoint> out;
  for (const auto& p : pts) {
    const auto x = sph_to_cart(p);
    Vec3 y{};
    for (int i = 0; i < 3; ++i) y[i] = R[i][0] * x[0] + R[i][1] * x[1] + R[i][2] * x[2];
    out.push_back(cart_to_sph(y));
  }
  return out;
}

}  // namespace

TEST_SUITE("pointsets") {

TEST_CASE("spiral formula") {
  CHECK(spiral_points(1).points[0].theta == doctest::Approx(kPi / 2));
  const auto s = spiral_points(121);
  CHECK(s.size() == 121);
  CHECK(s.points[60].theta == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(s.points[61].theta == doctest::Approx(std::acos(2.0 / 121.0)).epsilon(1e-15));
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int n : {1, 17, 60, 121}) {
    const double phi = std::fmod(kPi * (2.0 * n - 122.0) / golden, 2 * kPi);
    const double expect = phi < 0 ? phi + 2 * kPi : phi;
    CHECK(s.points[n - 1].phi == doctest::Approx(expect).epsilon(1e-13));
    CHECK(s.points[n - 1].theta == doctest::Approx(std::acos((2.0 * n - 122.0) / 121.0)).epsilon(1e-15));
  }
  CHECK(separation_distance(s.points) > 0.0);
  CHECK(separation_distance(s.points) == doctest::Approx(brute_separation(s.points)).epsilon(1e-15));
  CHECK(weight_sum(s) == doctest::Approx(kFourPi).epsilon(1e-14));
  check_ranges(s);
}

TEST_CASE("uniform random points") {
  const auto a = uniform_random_points(500, 42), b = uniform_random_points(500, 42);
  CHECK(a.points == b.points);
  CHECK(uniform_random_points(500, 43).points != a.points);
  check_ranges(a);
  const std::size_t n = 100000;
  const auto big = uniform_random_points(n, 9);
  double zsum = 0.0;
  std::size_t north = 0;
  for (const auto& p : big.points) {
    zsum += std::cos(p.theta);
    north += p.theta < kPi / 2 ? 1 : 0;
  }
  CHECK(std::abs(zsum / n) <= 3.0 / std::sqrt(3.0 * n));
  CHECK(std::abs(double(north) / n - 0.5) <= 3.0 * 0.5 / std::sqrt(double(n)));
  CHECK(weight_sum(big) == doctest::Approx(kFourPi).epsilon(1e-12));
}

TEST_CASE("icosahedral points") {
  const auto l0 = icosahedral_points(0);
  CHECK(l0.size() == 12);
  const double chord = 4.0 / std::sqrt(10.0 + 2.0 * std::sqrt(5.0));
  CHECK(separation_distance(l0.points) == doctest::Approx(chord).epsilon(1e-14));
  CHECK(brute_separation(l0.points) == doctest::Approx(chord).epsilon(1e-14));
  for (int level = 0; level <= 4; ++level) {
    const auto s = icosahedral_points(level);
    CHECK(s.size() == 10 * (std::size_t(1) << (2 * level)) + 2);
    for (const auto& p : s.points) CHECK(std::abs(norm(sph_to_cart(p)) - 1.0) <= 1e-14);
    CHECK(separation_distance(s.points) > 0.0);
    check_ranges(s);
  }
  CHECK(icosahedral_points(1).size() == 42);
  // Vertex sets of a regular polyhedron integrate degree-5 harmonics exactly.
  CHECK(quadrature_defect(l0, 5) <= 1e-14);
}

TEST_CASE("separation distance") {
  CHECK(separation_distance(std::vector<SphericalPoint>{{0.0, 0.0}, {kPi, 0.0}}) == doctest::Approx(2.0));
  const auto s = spiral_points(400);
  CHECK(separation_distance(s.points) == doctest::Approx(brute_separation(s.points)).epsilon(1e-15));
  const auto u = uniform_random_points(300, 5);
  CHECK(separation_distance(u.points) == doctest::Approx(brute_separation(u.points)).epsilon(1e-15));
}

TEST_CASE("gauge of an already gauged set is verbatim") {
  std::vector<SphericalPoint> pts{{0.0, 0.0}, {0.7, 0.0}, {1.1, 2.0}, {2.5, 4.0}, {1.9, 0.3}};
  const auto g = fix_gauge(pts);
  CHECK_FALSE(g.degenerate);
  const std::vector<double> expect{0.7, 1.1, 2.5, 1.9, 2.0, 4.0, 0.3};
  REQUIRE(g.config.free_vars.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(g.config.free_vars[i] == doctest::Approx(expect[i]).epsilon(1e-15));
  CHECK(fix_gauge(std::vector<SphericalPoint>{{0.3, 0.1}, {2.0, 1.0}}).config.free_vars.size() == 1);
  CHECK(gauge_dimension(2) == 1);
}

TEST_CASE("gauge round trip preserves geometry and the objective") {
  const auto s = uniform_random_points(60, 17);
  const auto g = fix_gauge(s.points);
  const auto back = unfix_gauge(g.config, s.size());
  CHECK(back[0].theta == 0.0);
  CHECK(back[1].phi == 0.0);
  for (std::size_t i = 0; i < s.size(); i += 7)
    for (std::size_t j = 0; j < s.size(); j += 5)
      CHECK(dot(sph_to_cart(back[i]), sph_to_cart(back[j])) ==
            doctest::Approx(dot(sph_to_cart(s.points[i]), sph_to_cart(s.points[j]))).epsilon(1e-13));
  const double a0 = objective_value(weyl_sums(s.points, 6));
  CHECK(objective(g.config, 6).value == doctest::Approx(a0).epsilon(1e-13));
  const auto rotated = rotate(s.points, 0.4, 1.3, -2.2);
  CHECK(objective(fix_gauge(rotated).config, 6).value == doctest::Approx(a0).epsilon(1e-12));
}

TEST_CASE("degenerate gauge is signalled") {
  const auto anti = fix_gauge(std::vector<SphericalPoint>{{0.4, 1.0}, {kPi - 0.4, 1.0 + kPi}, {1.0, 1.0}});
  CHECK(anti.degenerate);
  const auto same = fix_gauge(std::vector<SphericalPoint>{{0.4, 1.0}, {0.4, 1.0}, {1.0, 1.0}});
  CHECK(same.degenerate);
  CHECK(same.config.free_vars.size() == 3);
}

TEST_CASE("csv and envelope round trip bit exactly") {
  auto s = uniform_random_points(50, 3);
  s.declared_degree = 4;
  s.certification = 1.5e-13;
  const auto dir = std::filesystem::temp_directory_path() / "sphd_pointset_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "u.csv";
  write_pointset(s, path, {{"manifest", {{"hash", "abc"}}}});
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "# manifest=abc");
  const auto r = read_pointset(path);
  CHECK(r.points == s.points);
  CHECK(r.weights == s.weights);
  CHECK(r.declared_degree == 4);
  CHECK(*r.certification == 1.5e-13);
  CHECK(r.generator == s.generator);
  CHECK(r.seed == 3);
  CHECK_THROWS_AS(read_pointset(dir / "missing.csv"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped designs carry their certification") {
  for (int t : {16, 32, 64, 200}) {
    const auto d = testing::shipped_design(t);
    CHECK(d.size() == std::size_t(t + 1) * (t + 1));
    REQUIRE(d.declared_degree.has_value());
    CHECK(*d.declared_degree == t);
    CHECK(quadrature_defect(d, t) <= 1e-10);
    CHECK(weight_sum(d) == doctest::Approx(kFourPi).epsilon(1e-12));
  }
}

}  // TEST_SUITE
