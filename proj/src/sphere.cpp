#include "sphdesign/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "legendre_sweep.hpp"
#include "sphdesign/parallel.hpp"

namespace sphd {

using detail::kBlock;
using detail::LegendreSweep;
using detail::LegendreTables;

Vec3 sph_to_cart(SphericalPoint p) {
  const double s = std::sin(p.theta);
  return {s * std::cos(p.phi), s * std::sin(p.phi), std::cos(p.theta)};
}

SphericalPoint cart_to_sph(const Vec3& v) {
  const double r = norm(v);
  if (r == 0.0) return {};
  const double z = std::clamp(v[2] / r, -1.0, 1.0);
  double phi = std::atan2(v[1], v[0]);
  if (phi < 0.0) phi += 2.0 * kPi;
  return {std::acos(z), phi};
}

SphericalPoint normalize(SphericalPoint p) {
  double th = std::remainder(p.theta, 2.0 * kPi);  // (-pi, pi]
  double ph = p.phi;
  if (th < 0.0) {
    th = -th;
    ph += kPi;
  }
  ph = std::fmod(ph, 2.0 * kPi);
  if (ph < 0.0) ph += 2.0 * kPi;
  if (ph >= 2.0 * kPi) ph = 0.0;
  return {th, ph};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

HarmonicIndex harmonic_index(std::size_t offset) {
  int ell = static_cast<int>(std::sqrt(static_cast<double>(offset)));
  while (static_cast<std::size_t>(ell) * ell > offset) --ell;
  while (static_cast<std::size_t>(ell + 1) * (ell + 1) <= offset) ++ell;
  return {ell, static_cast<int>(offset) - ell * ell - ell};
}

namespace {

double normalized_legendre(int ell, int m, double cos_t, double sin_t) {
  double pmm = 1.0 / std::sqrt(kFourPi);
  for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sin_t;
  if (ell == m) return pmm;
  double prev = pmm;
  double cur = std::sqrt(2.0 * m + 3.0) * cos_t * pmm;
  for (int l = m + 2; l <= ell; ++l) {
    const double ll = l, mm = m;
    const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
    const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
    const double next = a * (cos_t * cur - b * prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

int degree_from_size(std::size_t n) {
  const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (n == 0 || r * r != n)
    throw std::invalid_argument("coefficient vector length " + std::to_string(n) +
                                " is not (t+1)^2");
  return static_cast<int>(r) - 1;
}

}  // namespace

double assoc_legendre(int ell, int m, double z) {
  if (!(std::abs(z) <= 1.0)) throw std::domain_error("assoc_legendre: |z| > 1");
  if (ell < 0 || m < 0 || m > ell) throw std::domain_error("assoc_legendre: need 0 <= m <= l");
  const double s = std::sqrt((1.0 - z) * (1.0 + z));
  const double pbar = normalized_legendre(ell, m, z, s);
  const double log_scale = 0.5 * (std::lgamma(ell + m + 1.0) - std::lgamma(ell - m + 1.0));
  return pbar * std::sqrt(kFourPi / (2.0 * ell + 1.0)) * std::exp(log_scale);
}

HarmonicSample sph_harmonic(HarmonicIndex idx, SphericalPoint p) {
  const int am = std::abs(idx.m);
  if (idx.ell < 0 || am > idx.ell) throw std::domain_error("sph_harmonic: need |m| <= l");
  LegendreTables tables(idx.ell);
  LegendreSweep sweep(tables);
  sweep.reset(&p.theta, 1);
  for (int m = 0; m <= am; ++m) sweep.next();
  alignas(64) double d1[kBlock], d2[kBlock];
  sweep.d1(idx.ell, d1);
  sweep.d2(idx.ell, d2);
  const double sign = (am % 2 == 0) ? 1.0 : -1.0;
  const complex e = std::polar(sign, am * p.phi);
  const complex im(0.0, am);
  HarmonicSample s;
  s.value = sweep.p(idx.ell)[0] * e;
  s.d_theta = d1[0] * e;
  s.d2_theta = d2[0] * e;
  s.d_phi = im * s.value;
  s.d2_phi = -double(am) * am * s.value;
  s.d2_theta_phi = im * s.d_theta;
  if (idx.m < 0) {
    auto flip = [&](complex& c) { c = sign * std::conj(c); };
    flip(s.value);
    flip(s.d_theta);
    flip(s.d_phi);
    flip(s.d2_theta);
    flip(s.d2_phi);
    flip(s.d2_theta_phi);
  }
  return s;
}

std::vector<complex> synthesis_apply(std::span<const complex> coeffs,
                                     std::span<const SphericalPoint> points) {
  const int t = degree_from_size(coeffs.size());
  std::vector<complex> out(points.size());
  const std::size_t blocks = (points.size() + kBlock - 1) / kBlock;
  LegendreTables tables(t);
  run_chunks(make_chunks(blocks), [&](std::size_t, ChunkRange r) {
    LegendreSweep sweep(tables);
    detail::PhaseSweep phase;
    std::array<double, kBlock> th{}, ph{};
    std::array<double, kBlock> re{}, im{};
    for (std::size_t blk = r.begin; blk < r.end; ++blk) {
      const std::size_t base = blk * kBlock;
      const int count = static_cast<int>(std::min<std::size_t>(kBlock, points.size() - base));
      for (int i = 0; i < kBlock; ++i) {
        th[i] = i < count ? points[base + i].theta : 0.0;
        ph[i] = i < count ? points[base + i].phi : 0.0;
        re[i] = im[i] = 0.0;
      }
      sweep.reset(th.data(), count);
      phase.reset(ph.data(), count);
      for (int m = 0; m <= t; ++m) {
        sweep.next();
        phase.next();
        std::array<double, kBlock> ur{}, ui{}, vr{}, vi{};
        for (int l = m; l <= t; ++l) {
          const double* p = sweep.p(l);
          const complex cp = coeffs[harmonic_offset(l, m)];
          const complex cn = coeffs[harmonic_offset(l, -m)];
          for (int i = 0; i < kBlock; ++i) {
            ur[i] += p[i] * cp.real();
            ui[i] += p[i] * cp.imag();
            vr[i] += p[i] * cn.real();
            vi[i] += p[i] * cn.imag();
          }
        }
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (int i = 0; i < kBlock; ++i) {
          const double c = phase.c()[i], s = phase.s()[i];
          // sign * u e^{i m phi}
          re[i] += sign * (ur[i] * c - ui[i] * s);
          im[i] += sign * (ur[i] * s + ui[i] * c);
          if (m > 0) {
            // v e^{-i m phi}
            re[i] += vr[i] * c + vi[i] * s;
            im[i] += vi[i] * c - vr[i] * s;
          }
        }
      }
      for (int i = 0; i < count; ++i) out[base + i] = {re[i], im[i]};
    }
  });
  return out;
}

std::vector<complex> analysis_apply(std::span<const complex> values,
                                    std::span<const SphericalPoint> points,
                                    std::span<const double> weights, int t) {
  if (values.size() != points.size())
    throw std::invalid_argument("analysis_apply: values and points differ in length");
  if (!weights.empty() && weights.size() != points.size())
    throw std::invalid_argument("analysis_apply: weights and points differ in length");
  if (t < 0) throw std::invalid_argument("analysis_apply: negative degree");
  const std::size_t nc = harmonic_count(t);
  const std::size_t blocks = (points.size() + kBlock - 1) / kBlock;
  const auto chunks = make_chunks(blocks);
  std::vector<std::vector<complex>> partial(chunks.size());
  LegendreTables tables(t);
  run_chunks(chunks, [&](std::size_t ci, ChunkRange r) {
    auto& acc = partial[ci];
    acc.assign(nc, complex{});
    LegendreSweep sweep(tables);
    detail::PhaseSweep phase;
    std::array<double, kBlock> th{}, ph{}, vr{}, vi{};
    for (std::size_t blk = r.begin; blk < r.end; ++blk) {
      const std::size_t base = blk * kBlock;
      const int count = static_cast<int>(std::min<std::size_t>(kBlock, points.size() - base));
      for (int i = 0; i < kBlock; ++i) {
        const bool live = i < count;
        th[i] = live ? points[base + i].theta : 0.0;
        ph[i] = live ? points[base + i].phi : 0.0;
        const complex v = live ? values[base + i] * (weights.empty() ? 1.0 : weights[base + i])
                               : complex{};
        vr[i] = v.real();
        vi[i] = v.imag();
      }
      sweep.reset(th.data(), count);
      phase.reset(ph.data(), count);
      for (int m = 0; m <= t; ++m) {
        sweep.next();
        phase.next();
        std::array<double, kBlock> gr{}, gi{}, hr{}, hi{};
        for (int i = 0; i < kBlock; ++i) {
          const double c = phase.c()[i], s = phase.s()[i];
          gr[i] = vr[i] * c + vi[i] * s;  // v e^{-i m phi}
          gi[i] = vi[i] * c - vr[i] * s;
          hr[i] = vr[i] * c - vi[i] * s;  // v e^{+i m phi}
          hi[i] = vi[i] * c + vr[i] * s;
        }
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (int l = m; l <= t; ++l) {
          const double* p = sweep.p(l);
          double a = 0, b = 0, c = 0, d = 0;
#pragma omp simd reduction(+ : a, b, c, d)
          for (int i = 0; i < kBlock; ++i) {
            a += p[i] * gr[i];
            b += p[i] * gi[i];
            c += p[i] * hr[i];
            d += p[i] * hi[i];
          }
          acc[harmonic_offset(l, m)] += complex(sign * a, sign * b);
          if (m > 0) acc[harmonic_offset(l, -m)] += complex(c, d);
        }
      }
    }
  });
  std::vector<complex> out(nc);
  for (const auto& acc : partial)
    for (std::size_t k = 0; k < nc; ++k) out[k] += acc[k];
  return out;
}

}  // namespace sphd
