#include "sphdesign/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sphdesign/random.hpp"

namespace sphd {

namespace {

double dotc(std::span<const complex> a, std::span<const complex> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s;
}

std::vector<double> effective_weights(const QuadraturePointSet& set, WeightMode mode) {
  std::vector<double> w = set.weights;
  if (mode == WeightMode::sqrt_w)
    for (double& x : w) x = std::sqrt(x);
  return w;
}

}  // namespace

std::string to_string(WeightMode m) { return m == WeightMode::w ? "w" : "sqrt_w"; }

std::string to_string(ProjectionStatus s) {
  switch (s) {
    case ProjectionStatus::converged: return "converged";
    case ProjectionStatus::stagnated: return "stagnated";
    case ProjectionStatus::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

ProjectionResult project_cg(const SphericalSignal& signal, const QuadraturePointSet& set, int T,
                            WeightMode mode, const ProjectionOptions& opts) {
  if (T < 0) throw std::invalid_argument("project_cg: negative degree");
  if (signal.size() != set.size())
    throw std::invalid_argument("project_cg: signal length does not match the point set");
  for (double w : set.weights)
    if (!(w > 0.0)) throw std::invalid_argument("project_cg: weights must be positive");

  const auto w = effective_weights(set, mode);
  auto apply = [&](std::span<const complex> c) {
    const auto v = synthesis_apply(c, set.points);
    return analysis_apply(v, set.points, w, T);
  };

  ProjectionResult res;
  const std::size_t n = harmonic_count(T);
  std::vector<complex> x(n), r = analysis_apply(signal.values, set.points, w, T);
  const double bnorm = std::sqrt(dotc(r, r));
  const double tol = opts.eps * bnorm;
  std::vector<complex> p = r, best = x;
  double rr = dotc(r, r);
  double best_norm = std::sqrt(rr);
  int since_best = 0;
  int k = 0;
  res.status = ProjectionStatus::budget_exhausted;
  while (true) {
    if (std::sqrt(rr) <= tol) {
      res.status = ProjectionStatus::converged;
      break;
    }
    if (k >= opts.k_max) break;
    const auto ap = apply(p);
    const double pap = dotc(p, ap);
    if (!(pap > 0.0)) {
      res.status = ProjectionStatus::stagnated;
      break;
    }
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    ++k;
    const double rr_new = dotc(r, r);
    if (std::sqrt(rr_new) < best_norm) {
      best_norm = std::sqrt(rr_new);
      best = x;
      since_best = 0;
    } else if (++since_best >= opts.stagnation_window) {
      rr = rr_new;
      res.status = ProjectionStatus::stagnated;
      break;
    }
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  if (res.status == ProjectionStatus::converged && std::sqrt(rr) < best_norm) best = x;
  res.cg_iterations = k;
  res.final_residual_norm = best_norm;
  res.coefficients = std::move(best);
  res.projected.values = synthesis_apply(res.coefficients, set.points);
  res.projected.source = signal.source;
  res.residual.source = signal.source;
  res.residual.values.resize(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i)
    res.residual.values[i] = signal.values[i] - res.projected.values[i];
  return res;
}

double wendland_delta(int k) {
  if (k < 0) throw std::invalid_argument("wendland_delta: negative k");
  return (3.0 * k + 3.0) * std::tgamma(k + 0.5) / (2.0 * std::tgamma(k + 1.0));
}

double wendland_tilde(int k, double t) {
  const double u = std::max(1.0 - t, 0.0);
  if (u == 0.0) return 0.0;
  const double u2 = u * u;
  switch (k) {
    case 0: return u2;
    case 1: return u2 * u2 * (4.0 * t + 1.0);
    case 2: return u2 * u2 * u2 * ((35.0 * t + 18.0) * t + 3.0) / 3.0;
    case 3: {
      const double u4 = u2 * u2;
      return u4 * u4 * (((32.0 * t + 25.0) * t + 8.0) * t + 1.0);
    }
    case 4: {
      const double u4 = u2 * u2;
      return u4 * u4 * u2 * ((((429.0 * t + 450.0) * t + 210.0) * t + 50.0) * t + 5.0) / 5.0;
    }
    default: throw std::invalid_argument("wendland_tilde: k must be in 0..4");
  }
}

WendlandSpec::WendlandSpec(int k_) : k(k_), delta(wendland_delta(k_)) {
  if (k_ > 4) throw std::invalid_argument("WendlandSpec: k must be in 0..4");
}

double wendland_eval(const WendlandSpec& spec, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("wendland_eval: negative argument");
  return wendland_tilde(spec.k, s / spec.delta);
}

double f_k_eval(int k, SphericalPoint p) {
  static constexpr Vec3 z[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  const WendlandSpec spec(k);
  const Vec3 x = sph_to_cart(p);
  double s = 0.0;
  for (const auto& zi : z) {
    const Vec3 d{zi[0] - x[0], zi[1] - x[1], zi[2] - x[2]};
    s += wendland_eval(spec, norm(d));
  }
  return s;
}

int indicator_eval(SphericalPoint p) { return p.theta <= kPi / 2.0 ? 1 : 0; }

std::function<double(SphericalPoint)> test_function(const std::string& name) {
  if (name == "indicator") return [](SphericalPoint p) { return static_cast<double>(indicator_eval(p)); };
  if (name.size() == 2 && name[0] == 'f' && name[1] >= '0' && name[1] <= '4') {
    const int k = name[1] - '0';
    return [k](SphericalPoint p) { return f_k_eval(k, p); };
  }
  throw std::invalid_argument("unknown test function: " + name);
}

SphericalSignal sample(const QuadraturePointSet& set, const std::function<double(SphericalPoint)>& f,
                       std::string source) {
  SphericalSignal s;
  s.source = std::move(source);
  s.values.reserve(set.size());
  for (const auto& p : set.points) s.values.emplace_back(f(p), 0.0);
  return s;
}

double weighted_norm(std::span<const complex> v, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != v.size())
    throw std::invalid_argument("weighted_norm: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += (weights.empty() ? 1.0 : weights[i]) * std::norm(v[i]);
  return std::sqrt(s);
}

double relative_l2_error(const SphericalSignal& approx, const SphericalSignal& truth,
                         std::span<const double> weights) {
  if (approx.size() != truth.size()) throw std::invalid_argument("relative_l2_error: length mismatch");
  const double tn = weighted_norm(truth.values, weights);
  if (!(tn > 0.0)) throw std::invalid_argument("relative_l2_error: truth has zero norm");
  std::vector<complex> d(truth.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = truth.values[i] - approx.values[i];
  return weighted_norm(d, weights) / tn;
}

SphericalSignal add_noise(const SphericalSignal& signal, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("add_noise: sigma must be nonnegative");
  SphericalSignal out = signal;
  if (sigma == 0.0) return out;
  double fmax = 0.0;
  for (const auto& v : signal.values) fmax = std::max(fmax, std::abs(v));
  const double sd = sigma * fmax;
  Rng rng(seed);
  for (auto& v : out.values) v += sd * rng.normal();
  return out;
}

SweepResult degree_sweep(const SphericalSignal& noisy, const SphericalSignal& truth,
                         const QuadraturePointSet& set, std::span<const int> degrees,
                         WeightMode mode, const ProjectionOptions& opts) {
  SweepResult out;
  out.best_error = std::numeric_limits<double>::infinity();
  for (int T : degrees) {
    const auto pr = project_cg(noisy, set, T, mode, opts);
    SweepRow row{T, relative_l2_error(pr.projected, truth, set.weights), pr.cg_iterations, pr.status};
    if (row.error < out.best_error) {
      out.best_error = row.error;
      out.best_degree = T;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace sphd
