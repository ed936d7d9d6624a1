#include "sphdesign/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "legendre_sweep.hpp"
#include "sphdesign/parallel.hpp"

namespace sphd {

using detail::kBlock;
using detail::LegendreSweep;
using detail::LegendreTables;

namespace {

struct Angles {
  std::vector<double> theta, phi;
};

Angles angles_from(const GaugedConfiguration& cfg, std::size_t n) {
  if (cfg.free_vars.size() != gauge_dimension(n))
    throw std::invalid_argument("configuration length does not match point count");
  Angles a;
  a.theta.assign(n, 0.0);
  a.phi.assign(n, 0.0);
  for (std::size_t p = 1; p < n; ++p) a.theta[p] = cfg.free_vars[p - 1];
  for (std::size_t p = 2; p < n; ++p) a.phi[p] = cfg.free_vars[n - 1 + (p - 2)];
  return a;
}

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

// S_lm = sum_i e^{i m phi_i} Pbar_l^m(theta_i) for m >= 0, or with a
// direction (vt, vp) the directional derivative
//   dS_lm = sum_i e^{i m phi_i} (dPbar_l^m vt_i + i m Pbar_l^m vp_i).
// Output is m-major: index m*(t+1) + l.
void forward(const LegendreTables& tab, const Angles& a, const double* vt, const double* vp,
             std::vector<double>& s_re, std::vector<double>& s_im) {
  const int t = tab.degree();
  const std::size_t stride = static_cast<std::size_t>(t + 1);
  const std::size_t nc = stride * stride;
  const std::size_t n = a.theta.size();
  const bool dir = vt != nullptr;
  const auto chunks = make_chunks(block_count(n));
  std::vector<std::vector<double>> part(chunks.size());
  run_chunks(chunks, [&](std::size_t ci, ChunkRange r) {
    auto& acc = part[ci];
    acc.assign(2 * nc, 0.0);
    double* ar = acc.data();
    double* ai = ar + nc;
    LegendreSweep sweep(tab);
    detail::PhaseSweep phase;
    alignas(64) double th[kBlock], ph[kBlock], wt[kBlock], wp[kBlock];
    alignas(64) double pr[kBlock], pi[kBlock], dr[kBlock], di[kBlock];
    for (std::size_t blk = r.begin; blk < r.end; ++blk) {
      const std::size_t base = blk * kBlock;
      const int count = static_cast<int>(std::min<std::size_t>(kBlock, n - base));
      for (int i = 0; i < kBlock; ++i) {
        const bool live = i < count;
        th[i] = live ? a.theta[base + i] : 0.0;
        ph[i] = live ? a.phi[base + i] : 0.0;
        wt[i] = live && dir ? vt[base + i] : 0.0;
        wp[i] = live ? (dir ? vp[base + i] : 1.0) : 0.0;
      }
      sweep.reset(th, count);
      phase.reset(ph, count);
      for (int m = 0; m <= t; ++m) {
        sweep.next();
        phase.next();
        for (int i = 0; i < kBlock; ++i) {
          const double c = phase.c()[i], s = phase.s()[i];
          if (dir) {
            dr[i] = wt[i] * c;
            di[i] = wt[i] * s;
            pr[i] = -m * wp[i] * s;
            pi[i] = m * wp[i] * c;
          } else {
            pr[i] = wp[i] * c;
            pi[i] = wp[i] * s;
          }
        }
        double* out_r = ar + static_cast<std::size_t>(m) * stride;
        double* out_i = ai + static_cast<std::size_t>(m) * stride;
        if (!dir) {
          for (int l = m; l <= t; ++l) {
            const double* p = sweep.p(l);
            double sr = 0.0, si = 0.0;
#pragma omp simd reduction(+ : sr, si)
            for (int i = 0; i < kBlock; ++i) {
              sr += p[i] * pr[i];
              si += p[i] * pi[i];
            }
            out_r[l] += sr;
            out_i[l] += si;
          }
        } else {
          const double* pc = sweep.column(m);
          const double* lo = sweep.column(m - 1);
          const double* hi = sweep.column(m + 1);
          const double* c_lo = tab.d1lo(m);
          const double* c_hi = tab.d1hi(m);
          for (int l = std::max(m, 1); l <= t; ++l) {
            const std::size_t o = static_cast<std::size_t>(l) * kBlock;
            const double a1 = c_lo[l], b1 = c_hi[l];
            double sr = 0.0, si = 0.0;
#pragma omp simd reduction(+ : sr, si)
            for (int i = 0; i < kBlock; ++i) {
              const double d = a1 * lo[o + i] + b1 * hi[o + i];
              const double p = pc[o + i];
              sr += p * pr[i] + d * dr[i];
              si += p * pi[i] + d * di[i];
            }
            out_r[l] += sr;
            out_i[l] += si;
          }
        }
      }
    }
  });
  s_re.assign(nc, 0.0);
  s_im.assign(nc, 0.0);
  for (const auto& acc : part) {
    for (std::size_t k = 0; k < nc; ++k) {
      s_re[k] += acc[k];
      s_im[k] += acc[nc + k];
    }
  }
}

struct AdjointOut {
  double* g_theta;
  double* g_phi;
  double* h_tt = nullptr;
  double* h_tp = nullptr;
  double* h_pp = nullptr;
};

// For every point, scale * Re sum_{l>=1,m} conj(X_lm) dY_lm(x_i) in theta and
// phi, where X has the Weyl-sum symmetry and is passed as S (m >= 0, m-major)
// with X_lm = (-1)^m S_lm. With blocks, also the second derivatives.
void adjoint(const LegendreTables& tab, const Angles& a, const std::vector<double>& s_re,
             const std::vector<double>& s_im, double scale, const AdjointOut& out) {
  const int t = tab.degree();
  const std::size_t stride = static_cast<std::size_t>(t + 1);
  const std::size_t n = a.theta.size();
  const bool blocks = out.h_tt != nullptr;
  run_chunks(make_chunks(block_count(n)), [&](std::size_t, ChunkRange r) {
    LegendreSweep sweep(tab);
    detail::PhaseSweep phase;
    alignas(64) double th[kBlock], ph[kBlock];
    alignas(64) double gt[kBlock], gp[kBlock], htt[kBlock], htp[kBlock], hpp[kBlock];
    alignas(64) double A[kBlock], B[kBlock], A1[kBlock], B1[kBlock], A2[kBlock], B2[kBlock];
    for (std::size_t blk = r.begin; blk < r.end; ++blk) {
      const std::size_t base = blk * kBlock;
      const int count = static_cast<int>(std::min<std::size_t>(kBlock, n - base));
      for (int i = 0; i < kBlock; ++i) {
        th[i] = i < count ? a.theta[base + i] : 0.0;
        ph[i] = i < count ? a.phi[base + i] : 0.0;
        gt[i] = gp[i] = htt[i] = htp[i] = hpp[i] = 0.0;
      }
      sweep.reset(th, count);
      phase.reset(ph, count);
      for (int m = 0; m <= t; ++m) {
        sweep.next();
        phase.next();
        std::fill_n(A, kBlock, 0.0);
        std::fill_n(B, kBlock, 0.0);
        std::fill_n(A1, kBlock, 0.0);
        std::fill_n(B1, kBlock, 0.0);
        std::fill_n(A2, kBlock, 0.0);
        std::fill_n(B2, kBlock, 0.0);
        const double* xr = s_re.data() + static_cast<std::size_t>(m) * stride;
        const double* xi = s_im.data() + static_cast<std::size_t>(m) * stride;
        const double* pc = sweep.column(m);
        const double* lo = sweep.column(m - 1);
        const double* hi = sweep.column(m + 1);
        const double* lo2 = sweep.column(m - 2);
        const double* hi2 = sweep.column(m + 2);
        const double* c_lo = tab.d1lo(m);
        const double* c_hi = tab.d1hi(m);
        const double* e_lo = tab.d2lo(m);
        const double* e_mid = tab.d2mid(m);
        const double* e_hi = tab.d2hi(m);
        for (int l = std::max(m, 1); l <= t; ++l) {
          const std::size_t o = static_cast<std::size_t>(l) * kBlock;
          const double sr = xr[l], si = xi[l];
          const double a1 = c_lo[l], b1 = c_hi[l];
          if (blocks) {
            const double a2 = e_lo[l], b2 = e_mid[l], c2 = e_hi[l];
#pragma omp simd
            for (int i = 0; i < kBlock; ++i) {
              const double p = pc[o + i];
              const double d = a1 * lo[o + i] + b1 * hi[o + i];
              const double dd = a2 * lo2[o + i] + b2 * p + c2 * hi2[o + i];
              A[i] += sr * d;
              B[i] += si * d;
              A1[i] += sr * p;
              B1[i] += si * p;
              A2[i] += sr * dd;
              B2[i] += si * dd;
            }
          } else {
#pragma omp simd
            for (int i = 0; i < kBlock; ++i) {
              const double p = pc[o + i];
              const double d = a1 * lo[o + i] + b1 * hi[o + i];
              A[i] += sr * d;
              B[i] += si * d;
              A1[i] += sr * p;
              B1[i] += si * p;
            }
          }
        }
        const double cm = m == 0 ? 1.0 : 2.0;
        const double dm = m;
        for (int i = 0; i < kBlock; ++i) {
          const double c = phase.c()[i], s = phase.s()[i];
          gt[i] += cm * (A[i] * c + B[i] * s);
          gp[i] += cm * dm * (B1[i] * c - A1[i] * s);
          if (blocks) {
            htt[i] += cm * (A2[i] * c + B2[i] * s);
            htp[i] += cm * dm * (B[i] * c - A[i] * s);
            hpp[i] -= cm * dm * dm * (A1[i] * c + B1[i] * s);
          }
        }
      }
      for (int i = 0; i < count; ++i) {
        out.g_theta[base + i] = scale * gt[i];
        out.g_phi[base + i] = scale * gp[i];
        if (blocks) {
          out.h_tt[base + i] = scale * htt[i];
          out.h_tp[base + i] = scale * htp[i];
          out.h_pp[base + i] = scale * hpp[i];
        }
      }
    }
  });
}

double value_from_s(const std::vector<double>& s_re, const std::vector<double>& s_im, int t,
                    std::size_t n) {
  const std::size_t stride = static_cast<std::size_t>(t + 1);
  double sum = 0.0;
  for (int m = 0; m <= t; ++m) {
    double part = 0.0;
    for (int l = std::max(m, 1); l <= t; ++l) {
      const std::size_t k = static_cast<std::size_t>(m) * stride + l;
      part += s_re[k] * s_re[k] + s_im[k] * s_im[k];
    }
    sum += (m == 0 ? 1.0 : 2.0) * part;
  }
  const double nn = static_cast<double>(n);
  return kFourPi * sum / (nn * nn);
}

WeylSumTable table_from_s(const std::vector<double>& s_re, const std::vector<double>& s_im,
                          int t, std::size_t n) {
  WeylSumTable w;
  w.t = t;
  w.n = n;
  w.sums.assign(harmonic_count(t), complex{});
  const std::size_t stride = static_cast<std::size_t>(t + 1);
  for (int m = 0; m <= t; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    for (int l = m; l <= t; ++l) {
      const std::size_t k = static_cast<std::size_t>(m) * stride + l;
      const complex s(s_re[k], s_im[k]);
      w.sums[harmonic_offset(l, m)] = sign * s;
      if (m > 0) w.sums[harmonic_offset(l, -m)] = std::conj(s);
    }
  }
  return w;
}

}  // namespace

double WeylSumTable::max_abs_nonconstant() const {
  double best = 0.0;
  for (std::size_t k = 1; k < sums.size(); ++k) best = std::max(best, std::abs(sums[k]));
  return best;
}

WeylSumTable weyl_sums(std::span<const SphericalPoint> points, int t) {
  if (t < 0) throw std::invalid_argument("weyl_sums: negative degree");
  Angles a;
  a.theta.reserve(points.size());
  a.phi.reserve(points.size());
  for (const auto& p : points) {
    a.theta.push_back(p.theta);
    a.phi.push_back(p.phi);
  }
  LegendreTables tab(t);
  std::vector<double> sr, si;
  forward(tab, a, nullptr, nullptr, sr, si);
  return table_from_s(sr, si, t, points.size());
}

double objective_value(const WeylSumTable& weyl) {
  double sum = 0.0;
  for (int l = 1; l <= weyl.t; ++l)
    for (int m = -l; m <= l; ++m) sum += std::norm(weyl.at(l, m));
  const double nn = static_cast<double>(weyl.n);
  return kFourPi * sum / (nn * nn);
}

double quadrature_defect(const QuadraturePointSet& set, int t) {
  if (t < 0) throw std::invalid_argument("quadrature_defect: negative degree");
  const std::vector<complex> ones(set.size(), complex(1.0, 0.0));
  const auto c = analysis_apply(ones, set.points, set.weights, t);
  double best = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) best = std::max(best, std::abs(c[k]));
  return best;
}

DesignObjective::DesignObjective(std::size_t n_points, int t) : n_(n_points), t_(t) {
  if (n_points == 0) throw std::invalid_argument("objective needs at least one point");
  if (t < 0) throw std::invalid_argument("objective: negative degree");
}

void DesignObjective::load(const GaugedConfiguration& cfg) {
  auto a = angles_from(cfg, n_);
  theta_ = std::move(a.theta);
  phi_ = std::move(a.phi);
  have_point_ = true;
  have_blocks_ = false;
}

ObjectiveEval DesignObjective::evaluate(const GaugedConfiguration& cfg) {
  load(cfg);
  LegendreTables tab(t_);
  Angles a{theta_, phi_};
  forward(tab, a, nullptr, nullptr, weyl_re_, weyl_im_);
  ObjectiveEval ev;
  ev.value = value_from_s(weyl_re_, weyl_im_, t_, n_);
  ev.weyl = table_from_s(weyl_re_, weyl_im_, t_, n_);
  ev.gradient.assign(dimension(), 0.0);
  if (n_ < 2) return ev;
  const double nn = static_cast<double>(n_);
  std::vector<double> gt(n_), gp(n_);
  h_tt_.assign(n_, 0.0);
  h_tp_.assign(n_, 0.0);
  h_pp_.assign(n_, 0.0);
  adjoint(tab, a, weyl_re_, weyl_im_, 2.0 * kFourPi / (nn * nn),
          {gt.data(), gp.data(), h_tt_.data(), h_tp_.data(), h_pp_.data()});
  have_blocks_ = true;
  for (std::size_t p = 1; p < n_; ++p) ev.gradient[p - 1] = gt[p];
  for (std::size_t p = 2; p < n_; ++p) ev.gradient[n_ - 1 + (p - 2)] = gp[p];
  return ev;
}

double DesignObjective::value(const GaugedConfiguration& cfg) const {
  LegendreTables tab(t_);
  std::vector<double> sr, si;
  forward(tab, angles_from(cfg, n_), nullptr, nullptr, sr, si);
  return value_from_s(sr, si, t_, n_);
}

void DesignObjective::ensure_blocks() {
  if (!have_point_) throw std::logic_error("hess_vec called before evaluate");
  if (have_blocks_) return;
}

std::vector<double> DesignObjective::hess_vec(std::span<const double> v, HessianMode mode) {
  if (v.size() != dimension()) throw std::invalid_argument("hess_vec: dimension mismatch");
  ensure_blocks();
  std::vector<double> out(dimension(), 0.0);
  if (n_ < 2) return out;
  std::vector<double> vt(n_, 0.0), vp(n_, 0.0);
  for (std::size_t p = 1; p < n_; ++p) vt[p] = v[p - 1];
  for (std::size_t p = 2; p < n_; ++p) vp[p] = v[n_ - 1 + (p - 2)];
  LegendreTables tab(t_);
  Angles a{theta_, phi_};
  std::vector<double> dr, di;
  forward(tab, a, vt.data(), vp.data(), dr, di);
  const double nn = static_cast<double>(n_);
  std::vector<double> gt(n_), gp(n_);
  adjoint(tab, a, dr, di, 2.0 * kFourPi / (nn * nn), {gt.data(), gp.data()});
  if (mode == HessianMode::full) {
    for (std::size_t p = 1; p < n_; ++p) {
      gt[p] += h_tt_[p] * vt[p] + h_tp_[p] * vp[p];
      gp[p] += h_tp_[p] * vt[p] + h_pp_[p] * vp[p];
    }
  }
  for (std::size_t p = 1; p < n_; ++p) out[p - 1] = gt[p];
  for (std::size_t p = 2; p < n_; ++p) out[n_ - 1 + (p - 2)] = gp[p];
  return out;
}

std::vector<double> DesignObjective::block_diagonal() {
  ensure_blocks();
  std::vector<double> d(dimension(), 0.0);
  for (std::size_t p = 1; p < n_; ++p) d[p - 1] = h_tt_[p];
  for (std::size_t p = 2; p < n_; ++p) d[n_ - 1 + (p - 2)] = h_pp_[p];
  return d;
}

ObjectiveEval objective(const GaugedConfiguration& cfg, int t) {
  DesignObjective obj(cfg.point_count(), t);
  return obj.evaluate(cfg);
}

std::vector<double> hess_vec(const GaugedConfiguration& cfg, int t, HessianMode mode,
                             std::span<const double> v) {
  DesignObjective obj(cfg.point_count(), t);
  obj.evaluate(cfg);
  return obj.hess_vec(v, mode);
}

}  // namespace sphd
