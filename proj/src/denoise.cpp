#include "sphdesign/denoise.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sphdesign/parallel.hpp"

namespace sphd {

namespace {

complex shrink(complex x, double amount) { return x - amount * (x / std::abs(x)); }

std::vector<complex> apply_rule(std::span<const complex> x, ThresholdKind kind, double c, double sigma,
                                const CapNeighborhood* cap) {
  std::vector<complex> out(x.begin(), x.end());
  switch (kind) {
    case ThresholdKind::none:
      return out;
    case ThresholdKind::GH:
    case ThresholdKind::GS: {
      const double tau = c * sigma;
      for (auto& v : out) {
        if (std::abs(v) < tau)
          v = 0.0;
        else if (kind == ThresholdKind::GS)
          v = shrink(v, sigma);
      }
      return out;
    }
    case ThresholdKind::LH:
    case ThresholdKind::LS: {
      if (cap == nullptr) throw std::invalid_argument("local threshold needs a cap neighbourhood");
      if (cap->lists.size() != x.size()) throw std::invalid_argument("cap neighbourhood does not match coefficients");
      const double s2 = sigma * sigma;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const auto& members = cap->lists[k];
        double avg = 0.0;
        for (std::size_t i : members) avg += std::norm(x[i]);
        avg /= static_cast<double>(members.size());
        const double sk = std::sqrt(std::max(avg - s2, 0.0));
        const double tau = sk > 0.0 ? c * s2 / sk : std::numeric_limits<double>::infinity();
        if (std::abs(x[k]) < tau)
          out[k] = 0.0;
        else if (kind == ThresholdKind::LS)
          out[k] = shrink(x[k], tau);
      }
      return out;
    }
  }
  return out;
}

double kept_fraction(std::span<const complex> x) {
  if (x.empty()) return 1.0;
  std::size_t kept = 0;
  for (const auto& v : x) kept += v != complex(0.0, 0.0) ? 1 : 0;
  return static_cast<double>(kept) / static_cast<double>(x.size());
}

FrameletCoefficients scaled(const FrameletCoefficients& c, const FrameletCoefficients& norms, bool divide) {
  if (c.v.size() != norms.v.size() || c.w.size() != norms.w.size())
    throw std::invalid_argument("normalize: shape mismatch");
  auto op = [divide](complex x, complex n) {
    if (!(n.real() > 0.0)) throw std::invalid_argument("normalize: atom norms must be positive");
    return divide ? x / n.real() : x * n.real();
  };
  FrameletCoefficients out = c;
  for (std::size_t k = 0; k < c.v.size(); ++k) out.v[k] = op(c.v[k], norms.v[k]);
  for (std::size_t j = 0; j < c.w.size(); ++j) {
    if (c.w[j].size() != norms.w[j].size()) throw std::invalid_argument("normalize: shape mismatch");
    for (std::size_t s = 0; s < c.w[j].size(); ++s) {
      if (c.w[j][s].size() != norms.w[j][s].size()) throw std::invalid_argument("normalize: shape mismatch");
      for (std::size_t k = 0; k < c.w[j][s].size(); ++k) out.w[j][s][k] = op(c.w[j][s][k], norms.w[j][s][k]);
    }
  }
  return out;
}

}  // namespace

CapNeighborhood cap_indices(std::span<const SphericalPoint> points, const CapSpec& spec) {
  const std::size_t n = points.size();
  if (spec.mode == CapMode::rnn && !(spec.radius > 0.0 && spec.radius <= 1.0))
    throw std::invalid_argument("cap_indices: rnn radius must lie in (0, 1]");
  if (spec.mode == CapMode::knn && (spec.count < 1 || static_cast<std::size_t>(spec.count) > n))
    throw std::invalid_argument("cap_indices: knn count must lie in [1, N]");
  std::vector<Vec3> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = sph_to_cart(points[i]);
  CapNeighborhood cap;
  cap.spec = spec;
  cap.lists.resize(n);
  run_chunks(make_chunks(n), [&](std::size_t, ChunkRange r) {
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t k = r.begin; k < r.end; ++k) {
      for (std::size_t i = 0; i < n; ++i) d[i] = {i == k ? 0.0 : norm(cross(x[k], x[i])), i};
      auto& list = cap.lists[k];
      if (spec.mode == CapMode::rnn) {
        for (const auto& [dist, i] : d)
          if (dist <= spec.radius) list.push_back(i);
      } else {
        const auto kk = static_cast<std::ptrdiff_t>(spec.count);
        std::partial_sort(d.begin(), d.begin() + kk, d.end());
        for (std::ptrdiff_t i = 0; i < kk; ++i) list.push_back(d[static_cast<std::size_t>(i)].second);
      }
    }
  });
  return cap;
}

std::string to_string(ThresholdKind k) {
  switch (k) {
    case ThresholdKind::none: return "none";
    case ThresholdKind::GH: return "GH";
    case ThresholdKind::GS: return "GS";
    case ThresholdKind::LH: return "LH";
    case ThresholdKind::LS: return "LS";
  }
  return "unknown";
}

ThresholdKind threshold_kind_from_string(const std::string& s) {
  std::string u;
  for (char ch : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  if (u == "NONE") return ThresholdKind::none;
  if (u == "GH") return ThresholdKind::GH;
  if (u == "GS") return ThresholdKind::GS;
  if (u == "LH") return ThresholdKind::LH;
  if (u == "LS") return ThresholdKind::LS;
  throw std::invalid_argument("unknown threshold rule: " + s);
}

std::vector<complex> threshold_global(std::span<const complex> x, ThresholdKind kind, double c, double sigma) {
  if (kind != ThresholdKind::GH && kind != ThresholdKind::GS)
    throw std::invalid_argument("threshold_global: rule must be GH or GS");
  return apply_rule(x, kind, c, sigma, nullptr);
}

std::vector<complex> threshold_local(std::span<const complex> x, ThresholdKind kind, double c, double sigma,
                                     const CapNeighborhood& cap) {
  if (!is_local(kind)) throw std::invalid_argument("threshold_local: rule must be LH or LS");
  return apply_rule(x, kind, c, sigma, &cap);
}

std::vector<complex> threshold_residual(std::span<const complex> g, ThresholdKind kind, double c1, double sigma,
                                        const CapNeighborhood* cap) {
  return apply_rule(g, kind, c1, sigma, cap);
}

FrameletCoefficients atom_norms(const MaskCascade& cascade, const QuadratureLadder& ladder) {
  auto e = atom_energies(cascade, ladder);
  for (auto& x : e.v) x = std::sqrt(x.real());
  for (auto& lev : e.w)
    for (auto& ch : lev)
      for (auto& x : ch) x = std::sqrt(x.real());
  return e;
}

FrameletCoefficients normalize_coeffs(const FrameletCoefficients& c, const FrameletCoefficients& norms) {
  return scaled(c, norms, true);
}

FrameletCoefficients denormalize_coeffs(const FrameletCoefficients& c, const FrameletCoefficients& norms) {
  return scaled(c, norms, false);
}

SphericalSignal denormalize_and_reconstruct(const FrameletCoefficients& normalized, const FrameletCoefficients& norms,
                                            const MaskCascade& cascade, const QuadratureLadder& ladder,
                                            std::span<const SphericalPoint> points) {
  SphericalSignal out;
  out.values = synthesis_apply(reconstruct(denormalize_coeffs(normalized, norms), cascade, ladder), points);
  return out;
}

double snr(const SphericalSignal& truth, const SphericalSignal& estimate, std::span<const double> weights) {
  if (truth.size() != estimate.size()) throw std::invalid_argument("snr: length mismatch");
  const double tn = weighted_norm(truth.values, weights);
  if (!(tn > 0.0)) throw std::invalid_argument("snr: truth has zero norm");
  std::vector<complex> e(truth.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = estimate.values[i] - truth.values[i];
  const double en = weighted_norm(e, weights);
  if (en == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(tn / en);
}

DenoiseConfig DenoiseConfig::defaults(ThresholdKind kind) {
  DenoiseConfig c;
  c.kind = kind;
  const bool hard = kind == ThresholdKind::GH || kind == ThresholdKind::LH;
  c.c = hard ? 2.5 : 1.0;
  c.c1 = 3.0;
  return c;
}

nlohmann::json to_json(const DenoiseReport& r) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["snr_in"] = num(r.snr_in);
  j["snr_out"] = num(r.snr_out);
  j["retained_lowpass"] = r.retained_lowpass;
  j["retained_highpass"] = r.retained_highpass;
  j["retained_residual"] = r.retained_residual;
  j["projection_iterations"] = r.projection_iterations;
  j["projection_status"] = r.projection_status;
  j["config"] = r.config;
  return j;
}

DenoiseResult denoise_pipeline(const SphericalSignal& noisy, const SphericalSignal* truth,
                               const QuadratureLadder& ladder, const FilterBank& bank, const DenoiseConfig& cfg) {
  ladder.validate();
  const auto& fine = ladder.rules.back();
  if (noisy.size() != fine.size()) throw std::invalid_argument("denoise: signal must live on the finest ladder rule");
  if (truth != nullptr && truth->size() != noisy.size()) throw std::invalid_argument("denoise: truth length mismatch");
  if (!(cfg.sigma >= 0.0)) throw std::invalid_argument("denoise: sigma must be nonnegative");
  const int band = ladder.band();
  const int degree = cfg.degree < 0 ? band : cfg.degree;
  if (degree > band) throw std::invalid_argument("denoise: projection degree exceeds the ladder band");

  const auto proj = project_cg(noisy, fine, degree, cfg.weight_mode, cfg.projection);
  std::vector<complex> fhat(harmonic_count(band));
  std::copy(proj.coefficients.begin(), proj.coefficients.end(), fhat.begin());

  const auto cascade = build_masks(bank, ladder);
  const auto norms = atom_norms(cascade, ladder);
  auto coeffs = normalize_coeffs(decompose(fhat, cascade, ladder), norms);

  double wbar = 0.0;
  for (double w : fine.weights) wbar += w;
  wbar /= static_cast<double>(fine.size());
  const double sigma_c = cfg.coefficient_noise == CoefficientNoise::quadrature ? cfg.sigma * std::sqrt(wbar) : cfg.sigma;

  std::vector<CapNeighborhood> caps;
  if (is_local(cfg.kind))
    for (const auto& rule : ladder.rules) caps.push_back(cap_indices(rule.points, cfg.cap));
  auto cap_for = [&](std::size_t rule) { return caps.empty() ? nullptr : &caps[rule]; };

  DenoiseReport rep;
  if (!cfg.keep_lowpass) coeffs.v = apply_rule(coeffs.v, cfg.kind, cfg.c, sigma_c, cap_for(0));
  rep.retained_lowpass = kept_fraction(coeffs.v);
  for (std::size_t j = 0; j < coeffs.w.size(); ++j) {
    std::size_t kept = 0, total = 0;
    for (auto& ch : coeffs.w[j]) {
      ch = apply_rule(ch, cfg.kind, cfg.c, sigma_c, cap_for(j + 1));
      kept += static_cast<std::size_t>(std::llround(kept_fraction(ch) * static_cast<double>(ch.size())));
      total += ch.size();
    }
    rep.retained_highpass.push_back(total ? static_cast<double>(kept) / static_cast<double>(total) : 1.0);
  }

  DenoiseResult out;
  out.f_thr = denormalize_and_reconstruct(coeffs, norms, cascade, ladder, fine.points);
  out.f_thr.source = noisy.source;
  out.g_thr.source = noisy.source;
  out.g_thr.values = apply_rule(proj.residual.values, cfg.kind, cfg.c1, cfg.sigma, cap_for(ladder.size() - 1));
  rep.retained_residual = kept_fraction(out.g_thr.values);
  out.denoised.source = noisy.source;
  out.denoised.values.resize(noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) out.denoised.values[i] = out.f_thr.values[i] + out.g_thr.values[i];

  rep.projection_iterations = proj.cg_iterations;
  rep.projection_status = to_string(proj.status);
  if (truth != nullptr) {
    rep.snr_in = snr(*truth, noisy, fine.weights);
    rep.snr_out = snr(*truth, out.denoised, fine.weights);
  } else {
    rep.snr_in = rep.snr_out = std::numeric_limits<double>::quiet_NaN();
  }
  rep.config = {{"rule", to_string(cfg.kind)},
                {"c", cfg.c},
                {"c1", cfg.c1},
                {"sigma", cfg.sigma},
                {"sigma_coefficients", sigma_c},
                {"cap", cfg.cap.mode == CapMode::knn ? nlohmann::json{{"knn", cfg.cap.count}}
                                                      : nlohmann::json{{"rnn", cfg.cap.radius}}},
                {"keep_lowpass", cfg.keep_lowpass},
                {"degree", degree},
                {"bank", bank.name()},
                {"ladder_degrees", ladder.degrees},
                {"weight_mode", to_string(cfg.weight_mode)},
                {"coefficient_noise", cfg.coefficient_noise == CoefficientNoise::quadrature ? "quadrature" : "raw"}};
  out.report = rep;
  return out;
}

}  // namespace sphd
