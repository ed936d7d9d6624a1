#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "sphdesign/pointset_io.hpp"
#include "sphdesign/pointsets.hpp"
#include "sphdesign/random.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return SPHD_DATA_DIR; }

inline sphd::QuadraturePointSet shipped_design(int t) {
  return sphd::read_pointset(data_dir() / "designs" / ("spiral_design_t" + std::to_string(t) + ".csv"));
}

/// Gauss-Legendre nodes in cos(theta) times equispaced phi; exact for
/// polynomials of degree <= 2 n - 1 in z and < nphi in phi.
inline sphd::QuadraturePointSet gauss_product_rule(int degree) {
  const int n = degree / 2 + 1;
  const int nphi = degree + 1;
  std::vector<double> z;
  for (double r : boost::math::legendre_p_zeros<double>(n)) {
    z.push_back(r);
    if (r != 0.0) z.push_back(-r);
  }
  sphd::QuadraturePointSet set;
  for (double x : z) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    for (int k = 0; k < nphi; ++k) {
      set.points.push_back({std::acos(x), 2.0 * sphd::kPi * k / nphi});
      set.weights.push_back(w * 2.0 * sphd::kPi / nphi);
    }
  }
  set.generator = "gauss";
  return set;
}

inline std::vector<sphd::complex> random_coeffs(int t, sphd::Rng& rng) {
  std::vector<sphd::complex> c((t + 1) * (t + 1));
  for (auto& x : c) x = {rng.normal(), rng.normal()};
  return c;
}

inline sphd::SphericalPoint random_point(sphd::Rng& rng) {
  return {std::acos(1.0 - 2.0 * rng.uniform()), 2.0 * sphd::kPi * rng.uniform()};
}

inline double rel_diff(const std::vector<sphd::complex>& a, const std::vector<sphd::complex>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace testing
