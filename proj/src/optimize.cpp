#include "sphdesign/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sphd {

namespace {

double dotv(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dotv(a, a)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

std::vector<double> shifted(std::span<const double> x, double a, std::span<const double> d) {
  std::vector<double> y(x.begin(), x.end());
  axpy(a, d, y);
  return y;
}

// Curvature below this (relative to |d|^2) counts as zero.
constexpr double kTinyCurvature = 1e-300;

void finish(OptimResult& res, double f, std::span<const double> g) {
  res.objective_value = f;
  res.sqrt_objective = std::sqrt(std::max(f, 0.0));
  res.grad_inf_norm = inf_norm(g);
}

}  // namespace

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string to_string(OptimStatus s) {
  switch (s) {
    case OptimStatus::converged: return "converged";
    case OptimStatus::budget_exhausted: return "budget_exhausted";
    case OptimStatus::stalled: return "stalled";
  }
  return "unknown";
}

DesignProblem::DesignProblem(std::size_t n_points, int t, HessianMode mode)
    : obj_(n_points, t), mode_(mode) {}

double DesignProblem::evaluate(std::span<const double> x, std::vector<double>& grad) {
  GaugedConfiguration cfg{{x.begin(), x.end()}};
  last_ = obj_.evaluate(cfg);
  grad = last_.gradient;
  return last_.value;
}

double DesignProblem::value(std::span<const double> x) {
  return obj_.value(GaugedConfiguration{{x.begin(), x.end()}});
}

std::vector<double> DesignProblem::hess_vec(std::span<const double> v) {
  return obj_.hess_vec(v, mode_);
}

std::vector<double> DesignProblem::preconditioner() {
  auto d = obj_.block_diagonal();
  double scale = 0.0;
  for (double x : d) scale = std::max(scale, std::abs(x));
  const double floor = scale > 0.0 ? 1e-3 * scale : 1.0;
  for (double& x : d) x = std::max(std::abs(x), floor);
  return d;
}

LsRcgConfig LsRcgConfig::for_degree(int t) {
  LsRcgConfig c;
  c.k_max = 200 * std::max(t, 1);
  return c;
}

void LsRcgConfig::validate() const {
  if (k_max < 0) throw std::invalid_argument("k_max must be nonnegative");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0, 1)");
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (i_max < 0) throw std::invalid_argument("i_max must be nonnegative");
  if (!(c_backtrack > 0.0 && c_backtrack < 1.0))
    throw std::invalid_argument("c_backtrack must lie in (0, 1)");
}

TrConfig TrConfig::for_degree(int t) {
  TrConfig c;
  c.k_max = 200 * std::max(t, 1);
  return c;
}

void TrConfig::validate() const {
  if (!(initial_radius > 0.0) || !(max_radius >= initial_radius))
    throw std::invalid_argument("need 0 < initial_radius <= max_radius");
  if (!(eta > 0.0 && eta < shrink_below && shrink_below <= expand_above && expand_above < 1.0))
    throw std::invalid_argument("need 0 < eta < shrink_below <= expand_above < 1");
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0) || !(expand_factor > 1.0))
    throw std::invalid_argument("bad radius update factors");
  if (!(cg_forcing > 0.0 && cg_forcing < 1.0)) throw std::invalid_argument("cg_forcing must lie in (0, 1)");
  if (cg_max_iter < 1 || k_max < 0) throw std::invalid_argument("bad iteration limits");
  if (!(eps1 > 0.0)) throw std::invalid_argument("eps1 must be positive");
}

LineSearchResult line_search(SmoothObjective& obj, std::span<const double> x, double f,
                             std::span<const double> g, std::span<const double> d, int i_max,
                             double eps2, double c_backtrack) {
  LineSearchResult res;
  res.value = f;
  const double dn = norm2(d);
  if (dn == 0.0) {
    res.zero_curvature = true;
    return res;
  }
  double curv = dotv(d, obj.hess_vec(d));
  if (!(std::abs(curv) > kTinyCurvature * dn * dn) || !std::isfinite(curv)) {
    res.zero_curvature = true;
    return res;
  }
  // Newton step from alpha = 0. Under negative curvature |d'Ed| keeps the
  // step pointing downhill.
  double alpha = -dotv(g, d) / std::abs(curv);
  double f_ref = f;
  std::vector<double> grad;
  for (int n = 0; n <= i_max; ++n) {
    res.iterations = n + 1;
    const auto xt = shifted(x, alpha, d);
    const double ft = obj.evaluate(xt, grad);
    if (!(ft - f_ref <= 0.0)) {
      alpha *= c_backtrack;
      continue;
    }
    f_ref = ft;
    if (ft <= res.value) {
      res.alpha = alpha;
      res.value = ft;
    }
    const double gd = dotv(grad, d);
    const double gn = norm2(grad);
    if (gn == 0.0 || std::abs(gd) / (gn * dn) < eps2) break;
    curv = dotv(d, obj.hess_vec(d));
    if (!(std::abs(curv) > kTinyCurvature * dn * dn) || !std::isfinite(curv)) {
      res.zero_curvature = true;
      break;
    }
    alpha -= gd / std::abs(curv);
  }
  return res;
}

OptimResult ls_rcg(SmoothObjective& obj, std::vector<double> x0, const LsRcgConfig& cfg) {
  cfg.validate();
  if (x0.size() != obj.dimension()) throw std::invalid_argument("ls_rcg: dimension mismatch");
  OptimResult res;
  std::vector<double> x = std::move(x0), g, g_new;
  double f = obj.evaluate(x, g);
  res.trace.push_back({0, f, inf_norm(g)});
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
  bool steepest = true;
  int k = 0;
  res.status = OptimStatus::budget_exhausted;
  while (true) {
    if (inf_norm(g) <= cfg.eps1) {
      res.status = OptimStatus::converged;
      break;
    }
    if (k >= cfg.k_max) break;
    if (!steepest && dotv(g, d) >= 0.0) {
      for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
      steepest = true;
      ++res.forced_restarts;
    }
    const auto ls = line_search(obj, x, f, g, d, cfg.i_max, cfg.eps2, cfg.c_backtrack);
    if (ls.alpha == 0.0) {
      if (steepest) {
        res.status = OptimStatus::stalled;
        obj.evaluate(x, g);  // leave the objective at x
        break;
      }
      for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
      steepest = true;
      ++res.forced_restarts;
      obj.evaluate(x, g);
      continue;
    }
    axpy(ls.alpha, d, x);
    const double f_new = obj.evaluate(x, g_new);
    ++k;
    res.trace.push_back({k, f_new, inf_norm(g_new)});
    if (cfg.on_iterate) cfg.on_iterate(res.trace.back(), x);
    if (inf_norm(g_new) <= cfg.eps1) {
      f = f_new;
      g = g_new;
      res.status = OptimStatus::converged;
      break;
    }
    if (dotv(g, g_new) >= cfg.r * dotv(g, g)) {
      for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g_new[i];
      steepest = true;
      ++res.restarts;
    } else {
      const auto bd = obj.hess_vec(d);
      const double dbd = dotv(d, bd);
      if (!(std::abs(dbd) > kTinyCurvature) || !std::isfinite(dbd)) {
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g_new[i];
        steepest = true;
        ++res.forced_restarts;
      } else {
        const double beta = dotv(g_new, bd) / dbd;
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g_new[i] + beta * d[i];
        steepest = false;
      }
    }
    f = f_new;
    g.swap(g_new);
  }
  res.iterations = k;
  res.x = std::move(x);
  finish(res, f, g);
  return res;
}

namespace {

// Largest tau >= 0 with |p + tau d|_M = radius.
double to_boundary(std::span<const double> p, std::span<const double> d,
                   const std::vector<double>& m, double radius) {
  double pp = 0.0, pd = 0.0, dd = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double w = m.empty() ? 1.0 : m[i];
    pp += w * p[i] * p[i];
    pd += w * p[i] * d[i];
    dd += w * d[i] * d[i];
  }
  const double disc = std::max(pd * pd + dd * (radius * radius - pp), 0.0);
  return (-pd + std::sqrt(disc)) / dd;
}

double m_norm(std::span<const double> p, const std::vector<double>& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (m.empty() ? 1.0 : m[i]) * p[i] * p[i];
  return std::sqrt(s);
}

struct SteihaugStep {
  std::vector<double> p;
  std::vector<double> bp;
  bool boundary = false;
  int iterations = 0;
};

// Truncated preconditioned CG for min g'p + p'Bp/2 subject to |p|_M <= radius.
SteihaugStep steihaug(SmoothObjective& obj, std::span<const double> g, double radius,
                      const std::vector<double>& m, double tol, int max_iter, int& hv_count) {
  const std::size_t n = g.size();
  SteihaugStep s;
  s.p.assign(n, 0.0);
  s.bp.assign(n, 0.0);
  std::vector<double> r(g.begin(), g.end()), z(n), d(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = m.empty() ? r[i] : r[i] / m[i];
  for (std::size_t i = 0; i < n; ++i) d[i] = -z[i];
  double rz = dotv(r, z);
  if (norm2(r) <= tol) return s;
  for (int j = 0; j < max_iter; ++j) {
    s.iterations = j + 1;
    const auto bd = obj.hess_vec(d);
    ++hv_count;
    const double kappa = dotv(d, bd);
    if (!(kappa > 0.0)) {
      const double tau = to_boundary(s.p, d, m, radius);
      axpy(tau, d, s.p);
      axpy(tau, bd, s.bp);
      s.boundary = true;
      return s;
    }
    const double alpha = rz / kappa;
    auto p_next = shifted(s.p, alpha, d);
    if (m_norm(p_next, m) >= radius) {
      const double tau = to_boundary(s.p, d, m, radius);
      axpy(tau, d, s.p);
      axpy(tau, bd, s.bp);
      s.boundary = true;
      return s;
    }
    s.p = std::move(p_next);
    axpy(alpha, bd, s.bp);
    axpy(alpha, bd, r);
    if (norm2(r) <= tol) return s;
    for (std::size_t i = 0; i < n; ++i) z[i] = m.empty() ? r[i] : r[i] / m[i];
    const double rz_next = dotv(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) d[i] = -z[i] + beta * d[i];
  }
  return s;
}

}  // namespace

OptimResult tr_pcg(SmoothObjective& obj, std::vector<double> x0, const TrConfig& cfg) {
  cfg.validate();
  if (x0.size() != obj.dimension()) throw std::invalid_argument("tr_pcg: dimension mismatch");
  OptimResult res;
  std::vector<double> x = std::move(x0), g, g_trial;
  double f = obj.evaluate(x, g);
  res.trace.push_back({0, f, inf_norm(g)});
  double radius = cfg.initial_radius;
  int k = 0;
  res.status = OptimStatus::budget_exhausted;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  while (true) {
    if (inf_norm(g) <= cfg.eps1) {
      res.status = OptimStatus::converged;
      break;
    }
    if (k >= cfg.k_max) break;
    if (radius < 1e-15 * std::max(1.0, norm2(x))) {
      res.status = OptimStatus::stalled;
      break;
    }
    const double gn = norm2(g);
    const double tol = std::min(cfg.cg_forcing, std::sqrt(gn)) * gn;
    const auto m = cfg.diagonal_preconditioner ? obj.preconditioner() : std::vector<double>{};
    const auto step = steihaug(obj, g, radius, m, tol, cfg.cg_max_iter, res.hess_vec_count);
    const double pred = -(dotv(g, step.p) + 0.5 * dotv(step.p, step.bp));
    const auto x_trial = shifted(x, 1.0, step.p);
    const double f_trial = obj.evaluate(x_trial, g_trial);
    const double actual = f - f_trial;
    double rho;
    if (!std::isfinite(f_trial)) {
      rho = -1.0;
    } else if (std::abs(actual) <= 16.0 * eps * std::abs(f) || !(pred > 0.0)) {
      // Both changes are at rounding level; judge by the gradient instead.
      rho = (f_trial <= f && inf_norm(g_trial) < inf_norm(g)) ? 1.0 : 0.0;
    } else {
      rho = actual / pred;
    }
    const double pn = m_norm(step.p, m);
    if (rho < cfg.shrink_below) {
      radius = cfg.shrink_factor * std::min(radius, pn);
    } else if (rho > cfg.expand_above && step.boundary) {
      radius = std::min(cfg.expand_factor * radius, cfg.max_radius);
    }
    if (rho > cfg.eta) {
      x = x_trial;
      f = f_trial;
      g.swap(g_trial);
      ++k;
      res.trace.push_back({k, f, inf_norm(g)});
      if (cfg.on_iterate) cfg.on_iterate(res.trace.back(), x);
    } else {
      obj.evaluate(x, g);  // restore the Hessian point
    }
  }
  res.iterations = k;
  res.x = std::move(x);
  finish(res, f, g);
  return res;
}

OptimResult ls_rcg(const GaugedConfiguration& x0, int t, const LsRcgConfig& cfg) {
  DesignProblem p(x0.point_count(), t, cfg.hessian_mode);
  return ls_rcg(p, x0.free_vars, cfg);
}

OptimResult tr_pcg(const GaugedConfiguration& x0, int t, const TrConfig& cfg) {
  DesignProblem p(x0.point_count(), t, cfg.hessian_mode);
  return tr_pcg(p, x0.free_vars, cfg);
}

}  // namespace sphd
