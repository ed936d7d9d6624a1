#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sphdesign/objective.hpp"
#include "sphdesign/pointsets.hpp"

namespace sphd {

/// Smooth function seen by the optimizers. hess_vec acts at the point of the
/// most recent evaluate() call; value() must not change that point.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual std::size_t dimension() const = 0;
  virtual double evaluate(std::span<const double> x, std::vector<double>& grad) = 0;
  virtual double value(std::span<const double> x) = 0;
  virtual std::vector<double> hess_vec(std::span<const double> v) = 0;
  /// Optional positive diagonal scaling for the trust-region CG; empty means identity.
  virtual std::vector<double> preconditioner() { return {}; }
};

/// A_{N,t} over gauged coordinates, with the Hessian mode fixed at construction.
class DesignProblem final : public SmoothObjective {
 public:
  DesignProblem(std::size_t n_points, int t, HessianMode mode);

  std::size_t dimension() const override { return obj_.dimension(); }
  double evaluate(std::span<const double> x, std::vector<double>& grad) override;
  double value(std::span<const double> x) override;
  std::vector<double> hess_vec(std::span<const double> v) override;
  std::vector<double> preconditioner() override;

  const ObjectiveEval& last() const { return last_; }

 private:
  DesignObjective obj_;
  HessianMode mode_;
  ObjectiveEval last_;
};

struct TraceEntry {
  int iteration = 0;
  double value = 0.0;
  double grad_norm = 0.0;
};

/// Called after every accepted iterate with its trace entry and position.
using IterateCallback = std::function<void(const TraceEntry&, std::span<const double>)>;

struct LsRcgConfig {
  int k_max = 2000;
  double r = 0.2;
  double eps1 = 1e-13;  // on the max-norm of the gradient
  int i_max = 40;
  double eps2 = 1e-10;
  double c_backtrack = 0.5;
  HessianMode hessian_mode = HessianMode::full;
  IterateCallback on_iterate;

  static LsRcgConfig for_degree(int t);
  /// Throws std::invalid_argument for out-of-range values.
  void validate() const;
};

struct TrConfig {
  double initial_radius = 1.0;
  double max_radius = 10.0;
  double eta = 0.1;
  double shrink_below = 0.25;
  double expand_above = 0.75;
  double shrink_factor = 0.25;
  double expand_factor = 2.0;
  double cg_forcing = 0.5;  // CG stops at min(cg_forcing, sqrt|g|) |g|
  int cg_max_iter = 500;
  int k_max = 2000;
  double eps1 = 1e-13;
  bool diagonal_preconditioner = false;
  HessianMode hessian_mode = HessianMode::full;
  IterateCallback on_iterate;

  static TrConfig for_degree(int t);
  void validate() const;
};

enum class OptimStatus {
  converged,         // gradient tolerance met
  budget_exhausted,  // iteration limit reached
  stalled,           // no further decrease representable
};

std::string to_string(OptimStatus s);

struct OptimResult {
  std::vector<double> x;
  int iterations = 0;
  double objective_value = 0.0;
  double sqrt_objective = 0.0;
  double grad_inf_norm = 0.0;
  std::vector<TraceEntry> trace;
  OptimStatus status = OptimStatus::converged;
  int restarts = 0;         // orthogonality restarts
  int forced_restarts = 0;  // non-descent direction or vanishing curvature
  int hess_vec_count = 0;
};

struct LineSearchResult {
  double alpha = 0.0;  // best step found; 0 if no decrease
  double value = 0.0;  // f(x + alpha d)
  int iterations = 0;
  bool zero_curvature = false;
};

/// Newton iteration on alpha for f(x + alpha d) with backtracking, starting
/// from the Newton step at alpha = 0. Requires that the objective was last
/// evaluated at x (f, g are its value and gradient).
LineSearchResult line_search(SmoothObjective& obj, std::span<const double> x, double f,
                             std::span<const double> g, std::span<const double> d, int i_max,
                             double eps2, double c_backtrack);

OptimResult ls_rcg(SmoothObjective& obj, std::vector<double> x0, const LsRcgConfig& cfg);
OptimResult tr_pcg(SmoothObjective& obj, std::vector<double> x0, const TrConfig& cfg);

OptimResult ls_rcg(const GaugedConfiguration& x0, int t, const LsRcgConfig& cfg);
OptimResult tr_pcg(const GaugedConfiguration& x0, int t, const TrConfig& cfg);

double inf_norm(std::span<const double> v);

}  // namespace sphd
