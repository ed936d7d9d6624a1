#pragma once

// Truncated semi-discrete spherical framelets built from a filter bank and
// a ladder of polynomial-exact quadrature rules with doubling degrees.
//
// Ladder rules are numbered 0..L-1 (rule 0 is the coarsest). Framelet levels
// are numbered 0..L-2; level j owns the low-pass mask alpha_j sampled over
// l <= t_j and the high-pass masks beta_{s,j} sampled over l <= t_{j+1}.
// Functions are represented by coefficient vectors over I_{t_{L-2}}.

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sphdesign/pointsets.hpp"
#include "sphdesign/sphere.hpp"

namespace sphd {

/// Real filter responses on [0, 1]: a low-pass a_hat and n high-pass b_hat.
class FilterBank {
 public:
  using Response = std::function<double(double)>;

  FilterBank(std::string name, Response a, std::vector<Response> b);

  /// Built-in banks with n = 1, 2 or 3 high-pass filters. a_hat is 1 on
  /// [0, 1/8], 0 on [1/4, 1] and smooth in between; the high-pass part is
  /// split further above 1/4 for n > 1.
  static FilterBank standard(int n);
  /// a_hat = cos(pi xi / 2), b_hat = sin(pi xi / 2).
  static FilterBank cosine();
  /// CSV with header and columns xi, a, b1..bn; linear interpolation, values
  /// clamped outside the sampled range. Throws std::runtime_error.
  static FilterBank from_csv(const std::filesystem::path& path);
  static FilterBank by_name(const std::string& id);

  const std::string& name() const { return name_; }
  int high_pass_count() const { return static_cast<int>(b_.size()); }
  double a_hat(double xi) const { return a_(xi); }
  double b_hat(int s, double xi) const { return b_.at(static_cast<std::size_t>(s))(xi); }

  /// max over an evenly spaced grid on [0, 1] of | a^2 + sum b_s^2 - 1 |.
  double partition_defect(int samples = 10001) const;

 private:
  std::string name_;
  Response a_;
  std::vector<Response> b_;
};

/// Smooth transition from 0 (x <= 0) to 1 (x >= 1) with nu(x) + nu(1-x) = 1.
double smooth_step(double x);

struct QuadratureLadder {
  std::vector<QuadraturePointSet> rules;  // coarse to fine
  std::vector<int> degrees;               // t_j, doubling

  std::size_t size() const { return rules.size(); }
  int levels() const { return static_cast<int>(rules.size()) - 1; }
  /// Degree of the space the system is tight on, t_{L-2}.
  int band() const { return degrees.at(degrees.size() - 2); }

  /// Throws std::invalid_argument unless there are at least two rules, the
  /// degrees double and every rule has positive weights.
  void validate() const;
  /// Largest quadrature_defect over the rules at their own degrees.
  double max_defect() const;
};

struct MaskCascade {
  std::vector<std::vector<double>> alpha;              // [j][l], l <= t_j
  std::vector<std::vector<std::vector<double>>> beta;  // [s][j][l], l <= t_{j+1}

  int levels() const { return static_cast<int>(alpha.size()); }
  /// |alpha_0(l)|^2 + sum_{j,s} |beta_{s,j}(l)|^2.
  double energy(int ell) const;
};

/// Throws std::invalid_argument when the bank violates the partition of
/// unity by more than 1e-12 or the ladder is invalid.
MaskCascade build_masks(const FilterBank& bank, const QuadratureLadder& ladder);

struct FrameletCoefficients {
  std::vector<complex> v;                             // low pass on rule 0
  std::vector<std::vector<std::vector<complex>>> w;   // [j][s] on rule j+1
};

enum class AtomKind { phi, psi };

/// Direct evaluation of phi_{j,k}(x) or psi^{(s)}_{j,k}(x).
complex atom_eval(AtomKind kind, int level, int s, std::size_t k, SphericalPoint x,
                  const MaskCascade& cascade, const QuadratureLadder& ladder);

/// Squared L2 norms of the atoms; same layout as the coefficients.
FrameletCoefficients atom_energies(const MaskCascade& cascade, const QuadratureLadder& ladder);

FrameletCoefficients decompose(std::span<const complex> f_coeffs, const MaskCascade& cascade,
                               const QuadratureLadder& ladder);
std::vector<complex> reconstruct(const FrameletCoefficients& coeffs, const MaskCascade& cascade,
                                 const QuadratureLadder& ladder);

/// Sum of squared magnitudes over all coefficients.
double coefficient_energy(const FrameletCoefficients& c);

/// CSV rows "band,level,channel,k,re,im"; band is "v" (level 0, channel 0)
/// or "w". Throws std::runtime_error on I/O or parse failure.
void write_coefficients(const FrameletCoefficients& c, const std::filesystem::path& path);
FrameletCoefficients read_coefficients(const std::filesystem::path& path);

}  // namespace sphd
