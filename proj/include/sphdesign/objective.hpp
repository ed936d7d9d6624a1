#pragma once

// A_{N,t}(X) = (4 pi / N^2) sum_{(l,m) in I_t} |W_lm|^2 - 1 with Weyl sums
// W_lm = sum_i Y_l^m(x_i), its gradient over gauged coordinates and
// Hessian-vector products.

#include <cstddef>
#include <span>
#include <vector>

#include "sphdesign/pointsets.hpp"
#include "sphdesign/sphere.hpp"

namespace sphd {

enum class HessianMode { full, approximation };

struct WeylSumTable {
  std::vector<complex> sums;  // offset l*l + l + m
  int t = 0;
  std::size_t n = 0;

  complex at(int ell, int m) const { return sums[harmonic_offset(ell, m)]; }
  /// max over 1 <= l <= t and all m of |W_lm|.
  double max_abs_nonconstant() const;
};

WeylSumTable weyl_sums(std::span<const SphericalPoint> points, int t);

/// A_{N,t} from a Weyl table. The l = 0 term is dropped analytically so the
/// result keeps full relative accuracy when A is tiny.
double objective_value(const WeylSumTable& weyl);

/// Exactness defect of a weighted rule: max over 1 <= l <= t of
/// |sum_i w_i Y_l^m(x_i)|. Equals (4 pi / N) max |W_lm| for equal weights.
double quadrature_defect(const QuadraturePointSet& set, int t);

struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> gradient;
  WeylSumTable weyl;
};

/// Stateful evaluator for one (N, t). hess_vec acts at the configuration of
/// the most recent evaluate() call.
class DesignObjective {
 public:
  DesignObjective(std::size_t n_points, int t);

  std::size_t point_count() const { return n_; }
  std::size_t dimension() const { return gauge_dimension(n_); }
  int degree() const { return t_; }

  ObjectiveEval evaluate(const GaugedConfiguration& cfg);
  double value(const GaugedConfiguration& cfg) const;

  std::vector<double> hess_vec(std::span<const double> v, HessianMode mode);

  /// Diagonal of the point-block term at the last evaluated configuration.
  std::vector<double> block_diagonal();

 private:
  void load(const GaugedConfiguration& cfg);
  void ensure_blocks();

  std::size_t n_;
  int t_;
  std::vector<double> theta_, phi_;
  std::vector<double> weyl_re_, weyl_im_;  // m-major, signed by (-1)^m
  // Per point 2x2 blocks of sum conj(W) d^2 Y: (tt, tp, pp).
  std::vector<double> h_tt_, h_tp_, h_pp_;
  bool have_point_ = false;
  bool have_blocks_ = false;
};

ObjectiveEval objective(const GaugedConfiguration& cfg, int t);
std::vector<double> hess_vec(const GaugedConfiguration& cfg, int t, HessianMode mode,
                             std::span<const double> v);

}  // namespace sphd
