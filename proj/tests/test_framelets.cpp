#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

#include "sphdesign/framelets.hpp"
#include "support.hpp"

using namespace sphd;

namespace {

QuadratureLadder design_ladder() {
  QuadratureLadder l;
  for (int t : {16, 32, 64}) {
    l.rules.push_back(testing::shipped_design(t));
    l.degrees.push_back(t);
  }
  return l;
}

const QuadratureLadder& ladder() {
  static const QuadratureLadder l = design_ladder();
  return l;
}

FilterBank degenerate_bank() {
  return FilterBank("identity", [](double) { return 1.0; }, {[](double) { return 0.0; }});
}

double spectral_norm(std::span<const complex> c) {
  double s = 0.0;
  for (const auto& x : c) s += std::norm(x);
  return std::sqrt(s);
}

// Mask products written out per level: alpha_j(l) = prod_{i >= j} a(l / t_{i+1}).
double alpha_oracle(const FilterBank& bank, const QuadratureLadder& lad, int j, int l) {
  const int top = lad.levels() - 1;
  if (l > lad.degrees[static_cast<std::size_t>(top)] || l > lad.degrees[static_cast<std::size_t>(j)]) return 0.0;
  double p = 1.0;
  for (int i = j; i <= top; ++i) p *= bank.a_hat(static_cast<double>(l) / lad.degrees[static_cast<std::size_t>(i + 1)]);
  return p;
}

double beta_oracle(const FilterBank& bank, const QuadratureLadder& lad, int s, int j, int l) {
  const int top = lad.levels() - 1;
  if (l > lad.degrees[static_cast<std::size_t>(top)]) return 0.0;
  double p = bank.b_hat(s, static_cast<double>(l) / lad.degrees[static_cast<std::size_t>(j + 1)]);
  for (int i = j + 1; i <= top; ++i) p *= bank.a_hat(static_cast<double>(l) / lad.degrees[static_cast<std::size_t>(i + 1)]);
  return p;
}

}  // namespace

TEST_SUITE("framelets") {

TEST_CASE("partition of unity for the shipped banks") {
  for (const char* id : {"standard1", "standard2", "standard3", "cosine"}) {
    const auto bank = FilterBank::by_name(id);
    CAPTURE(id);
    CHECK(bank.partition_defect(10001) <= 1e-12);
    CHECK(bank.a_hat(0.0) == doctest::Approx(1.0));
    for (int s = 0; s < bank.high_pass_count(); ++s) CHECK(std::abs(bank.b_hat(s, 0.0)) <= 1e-15);
  }
  CHECK(FilterBank::standard(3).high_pass_count() == 3);
  CHECK_THROWS_AS(FilterBank::standard(4), std::invalid_argument);
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(2.0) == 1.0);
  for (double x = 0.0; x <= 1.0; x += 0.01) CHECK(std::abs(smooth_step(x) + smooth_step(1.0 - x) - 1.0) <= 1e-14);
}

TEST_CASE("masks follow the cascade products") {
  for (int n = 1; n <= 3; ++n) {
    const auto bank = FilterBank::standard(n);
    const auto c = build_masks(bank, ladder());
    REQUIRE(c.levels() == 2);
    for (int j = 0; j < c.levels(); ++j) {
      REQUIRE(c.alpha[static_cast<std::size_t>(j)].size() == static_cast<std::size_t>(ladder().degrees[static_cast<std::size_t>(j)] + 1));
      for (int l = 0; l <= ladder().degrees[static_cast<std::size_t>(j)]; ++l)
        CHECK(std::abs(c.alpha[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] - alpha_oracle(bank, ladder(), j, l)) <= 1e-15);
      for (int s = 0; s < n; ++s) {
        const auto& b = c.beta[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
        for (std::size_t l = 0; l < b.size(); ++l) {
          CHECK(std::abs(b[l] - beta_oracle(bank, ladder(), s, j, static_cast<int>(l))) <= 1e-15);
          if (static_cast<int>(l) > ladder().band()) CHECK(b[l] == 0.0);
        }
      }
    }
    for (int l = 0; l <= ladder().band(); ++l) CHECK(c.energy(l) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("degenerate bank gives truncated identities") {
  const auto c = build_masks(degenerate_bank(), ladder());
  for (std::size_t j = 0; j < c.alpha.size(); ++j)
    for (std::size_t l = 0; l < c.alpha[j].size(); ++l) CHECK(c.alpha[j][l] == (static_cast<int>(l) <= ladder().band() ? 1.0 : 0.0));
  for (const auto& bs : c.beta)
    for (const auto& bj : bs)
      for (double x : bj) CHECK(x == 0.0);
}

TEST_CASE("degenerate top-level atom is the scaled reproducing kernel") {
  const auto c = build_masks(degenerate_bank(), ladder());
  const auto& rule = ladder().rules[1];
  Rng rng(31);
  for (std::size_t k : {0u, 17u, 500u}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto x = testing::random_point(rng);
      const double g = dot(sph_to_cart(x), sph_to_cart(rule.points[k]));
      double kernel = 0.0;
      for (int l = 0; l <= 32; ++l) kernel += (2 * l + 1) / kFourPi * boost::math::legendre_p(l, g);
      const complex a = atom_eval(AtomKind::phi, 1, 0, k, x, c, ladder());
      CHECK(std::abs(a - std::sqrt(rule.weights[k]) * kernel) <= 1e-12);
    }
  }
}

TEST_CASE("atom inner products with harmonics") {
  const auto c = build_masks(FilterBank::standard(2), ladder());
  const auto gauss = testing::gauss_product_rule(54);
  for (auto [kind, level, s, k] : {std::tuple{AtomKind::phi, 0, 0, std::size_t{3}},
                                   std::tuple{AtomKind::psi, 0, 1, std::size_t{40}},
                                   std::tuple{AtomKind::psi, 1, 0, std::size_t{200}}}) {
    std::vector<complex> vals;
    for (const auto& p : gauss.points) vals.push_back(atom_eval(kind, level, s, k, p, c, ladder()));
    const auto ip = analysis_apply(vals, gauss.points, gauss.weights, 20);
    const bool phi = kind == AtomKind::phi;
    const auto& rule = ladder().rules[static_cast<std::size_t>(phi ? level : level + 1)];
    const auto& mask = phi ? c.alpha[static_cast<std::size_t>(level)] : c.beta[static_cast<std::size_t>(s)][static_cast<std::size_t>(level)];
    for (int l = 0; l <= 20; ++l)
      for (int m = -l; m <= l; ++m) {
        const double a = static_cast<std::size_t>(l) < mask.size() ? mask[static_cast<std::size_t>(l)] : 0.0;
        const complex expect = std::sqrt(rule.weights[k]) * a * sph_harmonic({l, m}, rule.points[k]).value;
        // <Y, atom> with the inner product conjugate-linear in its first slot.
        CHECK(std::abs(std::conj(ip[harmonic_offset(l, m)]) - expect) <= 1e-12);
      }
  }
  CHECK_THROWS_AS(atom_eval(AtomKind::phi, 2, 0, 0, {0, 0}, c, ladder()), std::out_of_range);
  CHECK_THROWS_AS(atom_eval(AtomKind::psi, 0, 2, 0, {0, 0}, c, ladder()), std::out_of_range);
  CHECK_THROWS_AS(atom_eval(AtomKind::phi, 0, 0, 289, {0, 0}, c, ladder()), std::out_of_range);
}

TEST_CASE("atom energies by reduction and by quadrature") {
  const auto c = build_masks(FilterBank::standard(1), ladder());
  const auto e = atom_energies(c, ladder());
  const auto gauss = testing::gauss_product_rule(66);
  auto direct = [&](AtomKind kind, int level, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < gauss.size(); ++i)
      s += gauss.weights[i] * std::norm(atom_eval(kind, level, 0, k, gauss.points[i], c, ladder()));
    return s;
  };
  auto closed = [&](const std::vector<double>& mask, double w) {
    double s = 0.0;
    for (std::size_t l = 0; l < mask.size(); ++l) s += mask[l] * mask[l] * (2.0 * l + 1) / kFourPi;
    return w * s;
  };
  CHECK(e.v[5].real() == doctest::Approx(direct(AtomKind::phi, 0, 5)).epsilon(1e-10));
  CHECK(e.v[5].real() == doctest::Approx(closed(c.alpha[0], ladder().rules[0].weights[5])).epsilon(1e-13));
  CHECK(e.w[0][0][7].real() == doctest::Approx(direct(AtomKind::psi, 0, 7)).epsilon(1e-10));
  CHECK(e.w[1][0][99].real() == doctest::Approx(direct(AtomKind::psi, 1, 99)).epsilon(1e-10));
  CHECK(e.w[1][0][99].real() == doctest::Approx(closed(c.beta[0][1], ladder().rules[2].weights[99])).epsilon(1e-13));
}

TEST_CASE("decomposition of simple signals") {
  const auto c = build_masks(FilterBank::standard(3), ladder());
  const std::size_t n = harmonic_count(ladder().band());
  const auto zero = decompose(std::vector<complex>(n), c, ladder());
  CHECK(coefficient_energy(zero) == 0.0);
  CHECK(spectral_norm(reconstruct(zero, c, ladder())) == 0.0);
  std::vector<complex> y00(n);
  y00[0] = 1.0;
  const auto d = decompose(y00, c, ladder());
  double high = 0.0;
  for (const auto& lev : d.w)
    for (const auto& ch : lev)
      for (const auto& x : ch) high += std::norm(x);
  CHECK(high <= 1e-28);
  CHECK(coefficient_energy(d) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.v.size() == ladder().rules[0].size());
  CHECK(d.w.size() == 2);
  CHECK(d.w[1].size() == 3);
  CHECK(d.w[1][2].size() == ladder().rules[2].size());
  CHECK_THROWS_AS(decompose(std::vector<complex>(n + 1), c, ladder()), std::invalid_argument);
}

TEST_CASE("tight frame round trip and Parseval") {
  for (int nb = 1; nb <= 3; ++nb) {
    const auto c = build_masks(FilterBank::standard(nb), ladder());
    Rng rng(40 + nb);
    double worst_rt = 0.0, worst_parseval = 0.0, worst_low = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto f = testing::random_coeffs(ladder().band(), rng);
      const auto d = decompose(f, c, ladder());
      worst_rt = std::max(worst_rt, testing::rel_diff(reconstruct(d, c, ladder()), f));
      const double nf = spectral_norm(f);
      worst_parseval = std::max(worst_parseval, std::abs(coefficient_energy(d) - nf * nf) / (nf * nf));
      // Also on the low band of the coarsest rule.
      auto low = testing::random_coeffs(ladder().degrees[0] / 2, rng);
      low.resize(f.size());
      const double nl = spectral_norm(low);
      worst_low = std::max(worst_low, std::abs(coefficient_energy(decompose(low, c, ladder())) - nl * nl) / (nl * nl));
    }
    CHECK(worst_rt <= 1e-10);
    CHECK(worst_parseval <= 1e-10);
    CHECK(worst_low <= 1e-10);
  }
}

TEST_CASE("level energies follow the masks") {
  const auto c = build_masks(FilterBank::standard(2), ladder());
  const std::size_t n = harmonic_count(ladder().band());
  for (int l : {0, 3, 6, 10, 16, 20, 31, 32}) {
    std::vector<complex> f(n);
    f[harmonic_offset(l, l / 2)] = {0.6, -0.8};
    const auto d = decompose(f, c, ladder());
    double ev = 0.0;
    for (const auto& x : d.v) ev += std::norm(x);
    const double a = static_cast<std::size_t>(l) < c.alpha[0].size() ? c.alpha[0][static_cast<std::size_t>(l)] : 0.0;
    CHECK(std::abs(ev - a * a) <= 1e-12);
    for (std::size_t j = 0; j < d.w.size(); ++j)
      for (std::size_t s = 0; s < d.w[j].size(); ++s) {
        double e = 0.0;
        for (const auto& x : d.w[j][s]) e += std::norm(x);
        const double b = c.beta[s][j][static_cast<std::size_t>(l)];
        CHECK(std::abs(e - b * b) <= 1e-12);
      }
  }
}

TEST_CASE("perturbing one coefficient is bounded by the atom norm") {
  const auto c = build_masks(FilterBank::standard(1), ladder());
  Rng rng(50);
  const auto f = testing::random_coeffs(ladder().band(), rng);
  auto d = decompose(f, c, ladder());
  const auto base = reconstruct(d, c, ladder());
  const auto e = atom_energies(c, ladder());
  const double eps = 1e-3;
  for (auto [j, k] : {std::pair{0, std::size_t{11}}, std::pair{1, std::size_t{2000}}}) {
    auto p = d;
    p.w[static_cast<std::size_t>(j)][0][k] += eps;
    const auto g = reconstruct(p, c, ladder());
    std::vector<complex> diff(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) diff[i] = g[i] - base[i];
    const double atom = std::sqrt(e.w[static_cast<std::size_t>(j)][0][k].real());
    CHECK(spectral_norm(diff) <= eps * atom * (1 + 1e-10));
    CHECK(spectral_norm(diff) > 0.0);
  }
}

TEST_CASE("bank files") {
  const auto dir = std::filesystem::temp_directory_path() / "sphd_framelet_files";
  std::filesystem::create_directories(dir);
  {
    const auto bank = FilterBank::standard(2);
    std::ofstream out(dir / "bank.csv");
    out.precision(17);
    out << "xi,a,b1,b2\n";
    for (int i = 0; i <= 10000; ++i) {
      const double xi = i / 10000.0;
      out << xi << ',' << bank.a_hat(xi) << ',' << bank.b_hat(0, xi) << ',' << bank.b_hat(1, xi) << '\n';
    }
  }
  const auto loaded = FilterBank::from_csv(dir / "bank.csv");
  CHECK(loaded.high_pass_count() == 2);
  CHECK(loaded.partition_defect(10001) <= 1e-12);
  CHECK(loaded.a_hat(0.2) == doctest::Approx(FilterBank::standard(2).a_hat(0.2)).epsilon(1e-12));
  // Halfway between two samples the value is their mean.
  const double mid = 0.5 * (FilterBank::standard(2).b_hat(1, 0.3) + FilterBank::standard(2).b_hat(1, 0.3001));
  CHECK(loaded.b_hat(1, 0.30005) == doctest::Approx(mid).epsilon(1e-12));
  {
    std::ofstream out(dir / "bad.csv");
    out << "xi,a,b\n0,1,0\n0.5,0.5,0.5\n1,0,1\n";
  }
  const auto bad = FilterBank::from_csv(dir / "bad.csv");
  CHECK(bad.partition_defect() > 0.4);
  CHECK_THROWS_AS(build_masks(bad, ladder()), std::invalid_argument);
  CHECK_THROWS_AS(build_masks(FilterBank::cosine(), QuadratureLadder{}), std::invalid_argument);
  CHECK_THROWS_AS(FilterBank::from_csv(dir / "none.csv"), std::runtime_error);
  {
    std::ofstream out(dir / "junk.csv");
    out << "xi,a,b\n0,x,0\n";
  }
  CHECK_THROWS_AS(FilterBank::from_csv(dir / "junk.csv"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("coefficient files round trip bit exactly") {
  const auto c = build_masks(FilterBank::standard(3), ladder());
  Rng rng(60);
  const auto d = decompose(testing::random_coeffs(ladder().band(), rng), c, ladder());
  const auto path = std::filesystem::temp_directory_path() / "sphd_coeffs.csv";
  write_coefficients(d, path);
  const auto r = read_coefficients(path);
  CHECK(r.v == d.v);
  REQUIRE(r.w.size() == d.w.size());
  for (std::size_t j = 0; j < d.w.size(); ++j) CHECK(r.w[j] == d.w[j]);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_coefficients(path), std::runtime_error);
}

TEST_CASE("ladder validation") {
  QuadratureLadder one;
  one.rules.push_back(testing::shipped_design(16));
  one.degrees.push_back(16);
  CHECK_THROWS_AS(one.validate(), std::invalid_argument);
  auto skip = design_ladder();
  skip.degrees[2] = 60;
  CHECK_THROWS_AS(skip.validate(), std::invalid_argument);
  auto neg = design_ladder();
  neg.rules[1].weights[3] = -1.0;
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
  CHECK_THROWS_AS(build_masks(FilterBank::standard(1), neg), std::invalid_argument);
  CHECK(ladder().band() == 32);
  CHECK(ladder().max_defect() <= 1e-10);
}

TEST_CASE("truncated cosine bank is not tight") {
  const auto c = build_masks(FilterBank::cosine(), ladder());
  double worst = 0.0;
  for (int l = 0; l <= ladder().band(); ++l) worst = std::max(worst, std::abs(c.energy(l) - 1.0));
  CHECK(worst > 0.1);
}

}  // TEST_SUITE
