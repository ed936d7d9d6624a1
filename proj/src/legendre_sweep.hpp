#pragma once

// Blocked recurrence for the normalized associated Legendre functions
//   Pbar_l^m(theta) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(cos theta)
// advancing one order m at a time over a block of points, for all l in
// [m, t]. sin(theta) is used with its sign, so any real theta is accepted.
//
// Theta derivatives are linear combinations of neighbouring orders:
//   dPbar^m  = d1lo(l) Pbar^{m-1} + d1hi(l) Pbar^{m+1}
//   d2Pbar^m = d2lo(l) Pbar^{m-2} + d2mid(l) Pbar^m + d2hi(l) Pbar^{m+2}
// which stay finite at the poles. The sweep keeps orders m-2..m+2 resident.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sphdesign/sphere.hpp"

namespace sphd::detail {

inline constexpr int kBlock = 32;

class LegendreTables {
 public:
  explicit LegendreTables(int t) : degree_(t), stride_(t + 1) {
    const std::size_t rows = static_cast<std::size_t>(t + 3);
    const std::size_t n = static_cast<std::size_t>(stride_) * rows;
    for (auto* v : {&a_, &ab_, &d1lo_, &d1hi_, &d2lo_, &d2mid_, &d2hi_}) v->assign(n, 0.0);
    diag_.assign(rows, 0.0);
    sub_.assign(rows, 0.0);
    for (int m = 0; m <= t + 2; ++m) {
      diag_[m] = m == 0 ? 0.0 : std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      sub_[m] = std::sqrt(2.0 * m + 3.0);
      for (int l = m + 2; l <= t; ++l) {
        const double ll = l, mm = m;
        const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
        const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                   (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
        a_[at(m, l)] = a;
        ab_[at(m, l)] = a * b;
      }
    }
    // First derivative coefficients for orders 0..t+1.
    auto lo1 = [](int m, int l) {
      if (m == 0 || l < m) return 0.0;
      return 0.5 * std::sqrt((l + m) * (l - m + 1.0));
    };
    auto hi1 = [](int m, int l) {
      if (l < m) return 0.0;
      if (m == 0) return -std::sqrt(l * (l + 1.0));
      return -0.5 * std::sqrt((l - m) * (l + m + 1.0));
    };
    for (int m = 0; m <= t + 1; ++m) {
      for (int l = 0; l <= t; ++l) {
        d1lo_[at(m, l)] = lo1(m, l);
        d1hi_[at(m, l)] = hi1(m, l);
      }
    }
    // d2^m = lo1(m) d1^{m-1} + hi1(m) d1^{m+1}, expanded in Pbar.
    for (int m = 0; m <= t; ++m) {
      for (int l = m; l <= t; ++l) {
        const double g1 = lo1(m, l), g2 = hi1(m, l);
        const double lo_prev = m >= 1 ? lo1(m - 1, l) : 0.0;
        const double hi_prev = m >= 1 ? hi1(m - 1, l) : 0.0;
        d2lo_[at(m, l)] = g1 * lo_prev;
        d2mid_[at(m, l)] = g1 * hi_prev + g2 * lo1(m + 1, l);
        d2hi_[at(m, l)] = g2 * hi1(m + 1, l);
      }
    }
  }

  int degree() const { return degree_; }
  const double* a_row(int m) const { return a_.data() + at(m, 0); }
  const double* ab_row(int m) const { return ab_.data() + at(m, 0); }
  const double* d1lo(int m) const { return d1lo_.data() + at(m, 0); }
  const double* d1hi(int m) const { return d1hi_.data() + at(m, 0); }
  const double* d2lo(int m) const { return d2lo_.data() + at(m, 0); }
  const double* d2mid(int m) const { return d2mid_.data() + at(m, 0); }
  const double* d2hi(int m) const { return d2hi_.data() + at(m, 0); }
  double diag(int m) const { return diag_[m]; }
  double sub(int m) const { return sub_[m]; }

 private:
  std::size_t at(int m, int l) const {
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(stride_) +
           static_cast<std::size_t>(l);
  }

  int degree_;
  int stride_;
  std::vector<double> a_, ab_, d1lo_, d1hi_, d2lo_, d2mid_, d2hi_, diag_, sub_;
};

/// Columns are stored ell-major: entry (l, i) of a column lives at l*kBlock+i.
class LegendreSweep {
 public:
  explicit LegendreSweep(const LegendreTables& tables) : tab_(tables), t_(tables.degree()) {
    const std::size_t len = static_cast<std::size_t>(t_ + 1) * kBlock;
    for (auto& c : ring_) c.assign(len, 0.0);
    zero_.assign(len, 0.0);
  }

  /// Starts a new block. Unused lanes (count < kBlock) get theta = 0.
  void reset(const double* theta, int count) {
    for (int i = 0; i < kBlock; ++i) {
      const double th = i < count ? theta[i] : 0.0;
      cos_[i] = std::cos(th);
      sin_[i] = std::sin(th);
      diag_[i] = 1.0 / std::sqrt(kFourPi);
    }
    m_ = -1;
    built_ = -1;
  }

  /// Advances to the next order; the first call after reset() selects m = 0.
  void next() {
    ++m_;
    while (built_ < m_ + 2) build(++built_);
  }

  int order() const { return m_; }

  /// Column of order q, valid for m-2 <= q <= m+2. Orders outside [0, t]
  /// are zero.
  const double* column(int q) const {
    if (q < 0 || q > t_) return zero_.data();
    return ring_[static_cast<std::size_t>(q) % 5].data();
  }
  const double* p(int l) const { return column(m_) + static_cast<std::size_t>(l) * kBlock; }

  /// Row l of dPbar^m and d2Pbar^m for the current order.
  void d1(int l, double* out) const {
    const std::size_t o = static_cast<std::size_t>(l) * kBlock;
    const double* lo = column(m_ - 1) + o;
    const double* hi = column(m_ + 1) + o;
    const double a = tab_.d1lo(m_)[l], b = tab_.d1hi(m_)[l];
    for (int i = 0; i < kBlock; ++i) out[i] = a * lo[i] + b * hi[i];
  }
  void d2(int l, double* out) const {
    const std::size_t o = static_cast<std::size_t>(l) * kBlock;
    const double* lo = column(m_ - 2) + o;
    const double* mid = column(m_) + o;
    const double* hi = column(m_ + 2) + o;
    const double a = tab_.d2lo(m_)[l], b = tab_.d2mid(m_)[l], c = tab_.d2hi(m_)[l];
    for (int i = 0; i < kBlock; ++i) out[i] = a * lo[i] + b * mid[i] + c * hi[i];
  }

  const LegendreTables& tables() const { return tab_; }

 private:
  void build(int q) {
    if (q > t_) return;  // column() maps it to the zero column
    auto& col = ring_[static_cast<std::size_t>(q) % 5];
    // The slot last held order q-5, nonzero from row q-5 on.
    const int lz = std::max(0, q - 5);
    std::fill(col.begin() + static_cast<std::ptrdiff_t>(lz) * kBlock,
              col.begin() + static_cast<std::ptrdiff_t>(q) * kBlock, 0.0);
    if (q > 0) {
      const double f = tab_.diag(q);
      for (int i = 0; i < kBlock; ++i) diag_[i] *= f * sin_[i];
    }
    double* __restrict c0 = col.data() + static_cast<std::size_t>(q) * kBlock;
    alignas(64) double cs[kBlock], x1[kBlock], x2[kBlock];
    for (int i = 0; i < kBlock; ++i) {
      cs[i] = cos_[i];
      x2[i] = diag_[i];
      c0[i] = x2[i];
    }
    if (q + 1 > t_) return;
    const double s = tab_.sub(q);
    double* __restrict c1 = c0 + kBlock;
    for (int i = 0; i < kBlock; ++i) {
      x1[i] = s * cs[i] * x2[i];
      c1[i] = x1[i];
    }
    const double* a = tab_.a_row(q);
    const double* ab = tab_.ab_row(q);
    for (int l = q + 2; l <= t_; ++l) {
      double* __restrict out = col.data() + static_cast<std::size_t>(l) * kBlock;
      const double al = a[l], abl = ab[l];
      for (int i = 0; i < kBlock; ++i) {
        // a (cos x1 - b x2), arranged so only one FMA depends on x1.
        const double v = (al * cs[i]) * x1[i] - abl * x2[i];
        x2[i] = x1[i];
        x1[i] = v;
        out[i] = v;
      }
    }
  }

  const LegendreTables& tab_;
  int t_;
  int m_ = -1;
  int built_ = -1;
  alignas(64) std::array<double, kBlock> cos_{}, sin_{}, diag_{};
  std::array<std::vector<double>, 5> ring_;
  std::vector<double> zero_;
};

/// cos(m phi) and sin(m phi) per lane for m = 0, 1, 2, ..., by rotation,
/// recomputed directly every kReanchor orders to bound rounding drift.
class PhaseSweep {
 public:
  static constexpr int kReanchor = 16;

  void reset(const double* phi, int count) {
    for (int i = 0; i < kBlock; ++i) {
      phi_[i] = i < count ? phi[i] : 0.0;
      c1_[i] = std::cos(phi_[i]);
      s1_[i] = std::sin(phi_[i]);
    }
    m_ = -1;
  }

  void next() {
    ++m_;
    if (m_ % kReanchor == 0) {
      for (int i = 0; i < kBlock; ++i) {
        c_[i] = std::cos(m_ * phi_[i]);
        s_[i] = std::sin(m_ * phi_[i]);
      }
      return;
    }
    for (int i = 0; i < kBlock; ++i) {
      const double c = c_[i] * c1_[i] - s_[i] * s1_[i];
      const double s = s_[i] * c1_[i] + c_[i] * s1_[i];
      c_[i] = c;
      s_[i] = s;
    }
  }

  const double* c() const { return c_.data(); }
  const double* s() const { return s_.data(); }

 private:
  int m_ = -1;
  alignas(64) std::array<double, kBlock> phi_{}, c1_{}, s1_{}, c_{}, s_{};
};

}  // namespace sphd::detail
