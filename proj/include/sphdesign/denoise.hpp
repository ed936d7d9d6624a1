#pragma once

// Cap neighbourhoods, coefficient thresholding and the projection plus
// framelet denoising pipeline F_thr = f_thr + g_thr.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphdesign/approximation.hpp"
#include "sphdesign/framelets.hpp"

namespace sphd {

enum class CapMode { rnn, knn };

struct CapSpec {
  CapMode mode = CapMode::knn;
  double radius = 0.0;  // rnn: |x cross y| <= radius, radius in (0, 1]
  int count = 12;       // knn: number of members including the centre

  static CapSpec rnn(double r) { return {CapMode::rnn, r, 0}; }
  static CapSpec knn(int k) { return {CapMode::knn, 0.0, k}; }
};

/// Member lists per centre, distances measured by |x cross y|.
struct CapNeighborhood {
  CapSpec spec;
  std::vector<std::vector<std::size_t>> lists;
};

/// Throws std::invalid_argument for r outside (0, 1] or k outside [1, N].
CapNeighborhood cap_indices(std::span<const SphericalPoint> points, const CapSpec& spec);

enum class ThresholdKind { none, GH, GS, LH, LS };

std::string to_string(ThresholdKind k);
/// Accepts "none", "GH", "GS", "LH", "LS" in any case.
ThresholdKind threshold_kind_from_string(const std::string& s);

constexpr bool is_local(ThresholdKind k) { return k == ThresholdKind::LH || k == ThresholdKind::LS; }
constexpr bool is_soft(ThresholdKind k) { return k == ThresholdKind::GS || k == ThresholdKind::LS; }

/// GH/GS with tau = c sigma. Soft rules shrink kept entries by sigma along
/// their phase. Other kinds are rejected.
std::vector<complex> threshold_global(std::span<const complex> x, ThresholdKind kind, double c,
                                      double sigma);

/// LH/LS: per centre k, avg_k = mean of |x_i|^2 over the cap, s_k =
/// sqrt(max(avg_k - sigma^2, 0)) and tau_k = c sigma^2 / s_k (infinite when
/// s_k = 0). Soft rules shrink by tau_k.
std::vector<complex> threshold_local(std::span<const complex> x, ThresholdKind kind, double c,
                                     double sigma, const CapNeighborhood& cap);

/// Applies the rule of the given kind to residual samples, c1 in place of c.
std::vector<complex> threshold_residual(std::span<const complex> g, ThresholdKind kind, double c1,
                                        double sigma, const CapNeighborhood* cap);

/// L2 norms of the atoms (square roots of atom_energies).
FrameletCoefficients atom_norms(const MaskCascade& cascade, const QuadratureLadder& ladder);

/// Divides (normalize) or multiplies (denormalize) every coefficient by the
/// matching atom norm. Throws for nonpositive norms or shape mismatch.
FrameletCoefficients normalize_coeffs(const FrameletCoefficients& c, const FrameletCoefficients& norms);
FrameletCoefficients denormalize_coeffs(const FrameletCoefficients& c, const FrameletCoefficients& norms);

/// Multiplies back by the atom norms, reconstructs and synthesizes at points.
SphericalSignal denormalize_and_reconstruct(const FrameletCoefficients& normalized, const FrameletCoefficients& norms,
                                            const MaskCascade& cascade, const QuadratureLadder& ladder,
                                            std::span<const SphericalPoint> points);

/// 10 log10(|truth| / |estimate - truth|) in the weighted discrete norm;
/// +infinity when the error vanishes.
double snr(const SphericalSignal& truth, const SphericalSignal& estimate, std::span<const double> weights);

/// How the noise level used on normalized framelet coefficients relates to
/// the sample noise sigma: scaled by sqrt of the mean quadrature weight (the
/// standard deviation white sample noise has after analysis), or unscaled.
enum class CoefficientNoise { quadrature, raw };

struct DenoiseConfig {
  ThresholdKind kind = ThresholdKind::LS;
  double c = 1.0;
  double c1 = 3.0;
  double sigma = 0.0;  // standard deviation of the sample noise
  CapSpec cap = CapSpec::knn(12);
  bool keep_lowpass = false;
  int degree = -1;  // projection degree T_J; -1 means the ladder band
  WeightMode weight_mode = WeightMode::w;
  ProjectionOptions projection;
  CoefficientNoise coefficient_noise = CoefficientNoise::quadrature;

  /// c and c1 defaults for a rule kind: 2.5 / 3 for hard, 1 / 3 for soft.
  static DenoiseConfig defaults(ThresholdKind kind);
};

struct DenoiseReport {
  double snr_in = 0.0;   // NaN when no truth was given
  double snr_out = 0.0;
  double retained_lowpass = 1.0;
  std::vector<double> retained_highpass;  // per level, channels pooled
  double retained_residual = 1.0;
  int projection_iterations = 0;
  std::string projection_status;
  nlohmann::json config;
};

nlohmann::json to_json(const DenoiseReport& r);

struct DenoiseResult {
  SphericalSignal denoised;  // F_thr
  SphericalSignal f_thr;
  SphericalSignal g_thr;
  DenoiseReport report;
};

/// The noisy signal must be sampled on the finest ladder rule. truth may be
/// null; then the SNR fields are NaN.
DenoiseResult denoise_pipeline(const SphericalSignal& noisy, const SphericalSignal* truth,
                               const QuadratureLadder& ladder, const FilterBank& bank,
                               const DenoiseConfig& cfg);

}  // namespace sphd
