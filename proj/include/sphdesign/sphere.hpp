#pragma once

// Spherical coordinates, associated Legendre functions and complex spherical
// harmonics on the 2-sphere, plus matrix-free synthesis and analysis.
//
// Conventions:
//   x(theta, phi) = (sin theta cos phi, sin theta sin phi, cos theta)
//   P_l^m(z)      = (1 - z^2)^{m/2} d^m/dz^m P_l(z)          (no phase factor)
//   Y_l^m         = (-1)^m sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(cos theta) e^{i m phi},  m >= 0
//   Y_l^{-m}      = (-1)^m conj(Y_l^m)
// The (-1)^m in Y is the Condon-Shortley phase. Coefficient vectors over
// I_t = {(l, m): 0 <= l <= t, |m| <= l} are stored at offset l*l + l + m.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sphd {

using complex = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

struct SphericalPoint {
  double theta = 0.0;  // colatitude
  double phi = 0.0;    // longitude

  friend bool operator==(const SphericalPoint&, const SphericalPoint&) = default;
};

struct HarmonicIndex {
  int ell = 0;
  int m = 0;
};

/// Value and angular partial derivatives of one Y_l^m at one point.
struct HarmonicSample {
  complex value;
  complex d_theta;
  complex d_phi;
  complex d2_theta;
  complex d2_phi;
  complex d2_theta_phi;
};

Vec3 sph_to_cart(SphericalPoint p);
SphericalPoint cart_to_sph(const Vec3& v);

/// Maps any (theta, phi) pair to the same point with theta in [0, pi] and
/// phi in [0, 2 pi).
SphericalPoint normalize(SphericalPoint p);

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

constexpr std::size_t harmonic_count(int t) {
  return static_cast<std::size_t>(t + 1) * static_cast<std::size_t>(t + 1);
}
constexpr std::size_t harmonic_offset(int ell, int m) {
  return static_cast<std::size_t>(ell * ell + ell + m);
}
/// Inverse of harmonic_offset.
HarmonicIndex harmonic_index(std::size_t offset);

/// Unnormalized associated Legendre function P_l^m(z), evaluated through the
/// normalized upward recurrence. Throws std::domain_error for |z| > 1,
/// m < 0 or m > l.
double assoc_legendre(int ell, int m, double z);

/// Y_l^m and its first and second partial derivatives in (theta, phi).
/// Derivatives at the poles are the analytic limits.
HarmonicSample sph_harmonic(HarmonicIndex idx, SphericalPoint p);

/// out[i] = sum over I_t of coeffs[(l,m)] Y_l^m(points[i]).
/// Throws std::invalid_argument when coeffs.size() is not a perfect square.
std::vector<complex> synthesis_apply(std::span<const complex> coeffs,
                                     std::span<const SphericalPoint> points);

/// out[(l,m)] = sum_i weights[i] conj(Y_l^m(points[i])) values[i] for
/// (l,m) in I_t. Empty weights means unit weights.
std::vector<complex> analysis_apply(std::span<const complex> values,
                                    std::span<const SphericalPoint> points,
                                    std::span<const double> weights, int t);

}  // namespace sphd
