#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sphdesign/objective.hpp"
#include "sphdesign/pointsets.hpp"
#include "support.hpp"

using namespace sphd;

namespace {

GaugedConfiguration random_config(std::size_t n, Rng& rng) {
  std::vector<SphericalPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(testing::random_point(rng));
  return fix_gauge(pts).config;
}

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double rel(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

// Direct Weyl sums from sph_harmonic, independent of the batched sweep.
std::vector<complex> direct_weyl(const std::vector<SphericalPoint>& pts, int t) {
  std::vector<complex> w(harmonic_count(t));
  for (const auto& p : pts)
    for (int l = 0; l <= t; ++l)
      for (int m = -l; m <= l; ++m) w[harmonic_offset(l, m)] += sph_harmonic({l, m}, p).value;
  return w;
}

}  // namespace

TEST_SUITE("objective") {

TEST_CASE("weyl sums") {
  Rng rng(1);
  const auto s = uniform_random_points(37, 4);
  const auto w = weyl_sums(s.points, 7);
  CHECK(w.at(0, 0).real() == doctest::Approx(37.0 / std::sqrt(kFourPi)).epsilon(1e-14));
  const auto ref = direct_weyl(s.points, 7);
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(w.sums[k] - ref[k]) <= 1e-13);
  const auto anti = weyl_sums(std::vector<SphericalPoint>{{0.8, 0.3}, {kPi - 0.8, 0.3 + kPi}}, 1);
  for (int m = -1; m <= 1; ++m) CHECK(std::abs(anti.at(1, m)) <= 1e-15);
  CHECK(weyl_sums(spiral_points(121).points, 10).max_abs_nonconstant() > 1e-6);
}

TEST_CASE("objective special values") {
  Rng rng(2);
  CHECK(objective(random_config(9, rng), 0).value == 0.0);
  CHECK(objective(GaugedConfiguration{}, 1).value == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("objective equals the Weyl sum formula") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cfg = random_config(20, rng);
    const auto pts = unfix_gauge(cfg, 20);
    const auto ref = direct_weyl(pts, 6);
    double s = 0.0;
    for (const auto& x : ref) s += std::norm(x);
    const double expect = kFourPi / (20.0 * 20.0) * s - 1.0;
    CHECK(objective(cfg, 6).value == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("objective is nonnegative") {
  Rng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 49);
    const int t = static_cast<int>(rng.uniform() * 9);
    worst = std::min(worst, objective(random_config(n, rng), t).value);
  }
  CHECK(worst >= -1e-14);
}

TEST_CASE("gradient agrees with central differences") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 28);
    const int t = 1 + static_cast<int>(rng.uniform() * 8);
    const auto cfg = random_config(n, rng);
    const auto g = objective(cfg, t).gradient;
    std::vector<double> fd(g.size());
    const double h = 1e-6;
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto p = cfg, m = cfg;
      p.free_vars[i] += h;
      m.free_vars[i] -= h;
      fd[i] = (objective(p, t).value - objective(m, t).value) / (2 * h);
    }
    CHECK(rel(g, fd) <= 1e-6);
  }
}

TEST_CASE("hess_vec agrees with differenced gradients") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 28);
    const int t = 1 + static_cast<int>(rng.uniform() * 8);
    const auto cfg = random_config(n, rng);
    const auto v = random_vec(cfg.free_vars.size(), rng);
    const double h = 1e-5;
    auto p = cfg, m = cfg;
    for (std::size_t i = 0; i < v.size(); ++i) {
      p.free_vars[i] += h * v[i];
      m.free_vars[i] -= h * v[i];
    }
    const auto gp = objective(p, t).gradient, gm = objective(m, t).gradient;
    std::vector<double> fd(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) fd[i] = (gp[i] - gm[i]) / (2 * h);
    CHECK(rel(hess_vec(cfg, t, HessianMode::full, v), fd) <= 1e-5);
  }
}

TEST_CASE("hessian symmetry, semidefiniteness and zero direction") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cfg = random_config(25, rng);
    const auto u = random_vec(cfg.free_vars.size(), rng), v = random_vec(cfg.free_vars.size(), rng);
    const auto hu = hess_vec(cfg, 6, HessianMode::full, u), hv = hess_vec(cfg, 6, HessianMode::full, v);
    CHECK(std::abs(dotv(hv, u) - dotv(v, hu)) <= 1e-10 * std::max(1.0, std::abs(dotv(hv, u))));
    CHECK(dotv(v, hess_vec(cfg, 6, HessianMode::approximation, v)) >= -1e-12);
    for (double x : hess_vec(cfg, 6, HessianMode::full, std::vector<double>(u.size()))) CHECK(x == 0.0);
  }
  CHECK_THROWS_AS(hess_vec(random_config(5, rng), 3, HessianMode::full, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("full and approximate Hessians agree at a design") {
  const auto d = testing::shipped_design(16);
  const auto cfg = fix_gauge(d.points).config;
  Rng rng(8);
  const auto v = random_vec(cfg.free_vars.size(), rng);
  const auto full = hess_vec(cfg, 16, HessianMode::full, v);
  const auto approx = hess_vec(cfg, 16, HessianMode::approximation, v);
  CHECK(rel(full, approx) <= 1e-8);
}

TEST_CASE("stateful evaluator matches the free functions") {
  Rng rng(9);
  const auto cfg = random_config(30, rng);
  DesignObjective obj(30, 5);
  const auto e = obj.evaluate(cfg);
  CHECK(e.value == objective(cfg, 5).value);
  CHECK(obj.value(cfg) == doctest::Approx(e.value).epsilon(1e-14));
  const auto v = random_vec(cfg.free_vars.size(), rng);
  CHECK(obj.hess_vec(v, HessianMode::full) == hess_vec(cfg, 5, HessianMode::full, v));
}

TEST_CASE("zero objective iff vanishing Weyl sums") {
  const auto d = testing::shipped_design(16);
  const auto w = weyl_sums(d.points, 16);
  CHECK(objective_value(w) <= 1e-24);
  CHECK(w.max_abs_nonconstant() <= 1e-12 * d.size());
  const auto s = spiral_points(289);
  const auto ws = weyl_sums(s.points, 16);
  CHECK(objective_value(ws) > 1e-12);
  CHECK(ws.max_abs_nonconstant() > 1e-12);
}

TEST_CASE("quadrature defect equals scaled Weyl sums for equal weights") {
  const auto s = spiral_points(200);
  const auto w = weyl_sums(s.points, 9);
  CHECK(quadrature_defect(s, 9) == doctest::Approx(kFourPi / 200.0 * w.max_abs_nonconstant()).epsilon(1e-13));
  CHECK(quadrature_defect(testing::gauss_product_rule(12), 12) <= 1e-14);
}

}  // TEST_SUITE
