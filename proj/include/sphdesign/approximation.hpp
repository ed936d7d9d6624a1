#pragma once

// Weighted least-squares projection onto Pi_T, test functions on the sphere
// and error metrics.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sphdesign/pointsets.hpp"
#include "sphdesign/sphere.hpp"

namespace sphd {

/// Samples of a function on a point set.
struct SphericalSignal {
  std::vector<complex> values;
  std::string source;  // id of the point set the samples live on

  std::size_t size() const { return values.size(); }
};

/// Weight used in the normal equations: the quadrature weights themselves or
/// their square roots.
enum class WeightMode { w, sqrt_w };

enum class ProjectionStatus {
  converged,         // residual reached the tolerance
  stagnated,         // residual stopped decreasing before the tolerance
  budget_exhausted,  // k_max iterations used while still decreasing
};

std::string to_string(WeightMode m);
std::string to_string(ProjectionStatus s);

struct ProjectionOptions {
  int k_max = 1000;
  double eps = 2.220446049250313e-16;  // relative to |b|
  int stagnation_window = 25;           // iterations without a new best residual
};

struct ProjectionResult {
  std::vector<complex> coefficients;  // over I_T
  SphericalSignal projected;
  SphericalSignal residual;
  int cg_iterations = 0;
  double final_residual_norm = 0.0;
  ProjectionStatus status = ProjectionStatus::converged;
};

/// Solves Y* diag(W) Y c = Y* (W .* f) by conjugate gradients, W chosen by
/// mode. The returned coefficients are those with the smallest recursive
/// residual seen.
ProjectionResult project_cg(const SphericalSignal& signal, const QuadraturePointSet& set, int T,
                            WeightMode mode, const ProjectionOptions& opts = {});

/// delta_k = (3k+3) Gamma(k+1/2) / (2 Gamma(k+1)).
double wendland_delta(int k);
/// The compactly supported Wendland function on [0, 1], k in 0..4.
double wendland_tilde(int k, double t);

struct WendlandSpec {
  int k = 0;
  double delta = 0.0;

  explicit WendlandSpec(int k_);
};

/// phi_k(s) = wendland_tilde(k, s / delta_k). Throws for s < 0.
double wendland_eval(const WendlandSpec& spec, double s);

/// Sum of phi_k over the chord distances to the six octahedron vertices.
double f_k_eval(int k, SphericalPoint p);

/// 1 on the closed northern hemisphere theta <= pi/2, 0 elsewhere.
int indicator_eval(SphericalPoint p);

SphericalSignal sample(const QuadraturePointSet& set, const std::function<double(SphericalPoint)>& f,
                       std::string source = {});

/// Weighted discrete norm sqrt(sum w_i |v_i|^2); empty weights means unit.
/// "f0".."f4" for the Wendland sums, "indicator" for the hemisphere
/// indicator. Throws std::invalid_argument otherwise.
std::function<double(SphericalPoint)> test_function(const std::string& name);

double weighted_norm(std::span<const complex> v, std::span<const double> weights);

/// |truth - approx| / |truth| in the weighted discrete norm.
double relative_l2_error(const SphericalSignal& approx, const SphericalSignal& truth,
                         std::span<const double> weights);

/// Adds i.i.d. N(0, (sigma max|f|)^2) to the real parts.
SphericalSignal add_noise(const SphericalSignal& signal, double sigma, std::uint64_t seed);

struct SweepRow {
  int degree = 0;
  double error = 0.0;
  int cg_iterations = 0;
  ProjectionStatus status = ProjectionStatus::converged;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int best_degree = -1;
  double best_error = 0.0;
};

/// Projects the noisy signal for each degree and measures the error against
/// the clean samples.
SweepResult degree_sweep(const SphericalSignal& noisy, const SphericalSignal& truth,
                         const QuadraturePointSet& set, std::span<const int> degrees,
                         WeightMode mode, const ProjectionOptions& opts = {});

}  // namespace sphd
