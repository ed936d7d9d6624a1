#include "sphdesign/framelets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sphdesign/objective.hpp"
#include "sphdesign/pointset_io.hpp"

namespace sphd {

namespace {

// Transition of a_hat down to 0 on [lo, hi]: returns (cos, sin) of
// pi/2 * smooth_step((xi - lo) / (hi - lo)).
std::pair<double, double> rotation(double xi, double lo, double hi) {
  const double a = 0.5 * kPi * smooth_step((xi - lo) / (hi - lo));
  return {std::cos(a), std::sin(a)};
}

class Sampled {
 public:
  Sampled(std::vector<double> xi, std::vector<double> y) : xi_(std::move(xi)), y_(std::move(y)) {}
  double operator()(double x) const {
    if (x <= xi_.front()) return y_.front();
    if (x >= xi_.back()) return y_.back();
    const auto it = std::upper_bound(xi_.begin(), xi_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xi_.begin());
    const double u = (x - xi_[i - 1]) / (xi_[i] - xi_[i - 1]);
    return (1.0 - u) * y_[i - 1] + u * y_[i];
  }

 private:
  std::vector<double> xi_, y_;
};

std::vector<double> root_weights(const QuadraturePointSet& set) {
  std::vector<double> r(set.weights);
  for (double& x : r) x = std::sqrt(x);
  return r;
}

// Coefficients mask(l) f_lm over I_deg, taken from a vector over I_band.
std::vector<complex> masked(std::span<const complex> f, const std::vector<double>& mask, int deg) {
  std::vector<complex> c(harmonic_count(deg));
  for (int l = 0; l <= deg; ++l)
    for (int m = -l; m <= l; ++m) c[harmonic_offset(l, m)] = mask[static_cast<std::size_t>(l)] * f[harmonic_offset(l, m)];
  return c;
}

void add_masked(std::vector<complex>& out, std::span<const complex> c, const std::vector<double>& mask,
                int deg) {
  for (int l = 0; l <= deg; ++l)
    for (int m = -l; m <= l; ++m) out[harmonic_offset(l, m)] += mask[static_cast<std::size_t>(l)] * c[harmonic_offset(l, m)];
}

double mask_energy(const std::vector<double>& mask) {
  double s = 0.0;
  for (std::size_t l = 0; l < mask.size(); ++l) s += mask[l] * mask[l] * (2.0 * static_cast<double>(l) + 1.0);
  return s / kFourPi;
}

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * x * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
}

FilterBank::FilterBank(std::string name, Response a, std::vector<Response> b)
    : name_(std::move(name)), a_(std::move(a)), b_(std::move(b)) {
  if (b_.empty()) throw std::invalid_argument("FilterBank: need at least one high-pass filter");
}

FilterBank FilterBank::standard(int n) {
  constexpr double lo = 0.125, hi = 0.25;
  auto a = [](double xi) { return rotation(xi, lo, hi).first; };
  auto high = [](double xi) { return rotation(xi, lo, hi).second; };
  switch (n) {
    case 1:
      return FilterBank("standard1", a, {high});
    case 2:
      return FilterBank("standard2", a,
                        {[=](double xi) { return high(xi) * rotation(xi, 0.25, 0.375).first; },
                         [=](double xi) { return high(xi) * rotation(xi, 0.25, 0.375).second; }});
    case 3:
      return FilterBank(
          "standard3", a,
          {[=](double xi) { return high(xi) * rotation(xi, 0.1875, 0.25).first; },
           [=](double xi) {
             return high(xi) * rotation(xi, 0.1875, 0.25).second * rotation(xi, 0.3125, 0.4375).first;
           },
           [=](double xi) {
             return high(xi) * rotation(xi, 0.1875, 0.25).second * rotation(xi, 0.3125, 0.4375).second;
           }});
    default:
      throw std::invalid_argument("FilterBank::standard: n must be 1, 2 or 3");
  }
}

FilterBank FilterBank::cosine() {
  return FilterBank("cosine", [](double xi) { return std::cos(0.5 * kPi * xi); },
                    {[](double xi) { return std::sin(0.5 * kPi * xi); }});
}

FilterBank FilterBank::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open filter bank " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw std::runtime_error("bad number in " + path.string() + ": " + cell);
      row.push_back(v);
    }
    if (cols.empty()) cols.resize(row.size());
    if (row.size() != cols.size() || row.size() < 3)
      throw std::runtime_error("filter bank rows need xi, a and at least one b column");
    for (std::size_t c = 0; c < row.size(); ++c) cols[c].push_back(row[c]);
  }
  if (cols.empty() || cols[0].size() < 2) throw std::runtime_error("filter bank needs two or more samples");
  if (!std::is_sorted(cols[0].begin(), cols[0].end()))
    throw std::runtime_error("filter bank xi column must be increasing");
  std::vector<Response> b;
  for (std::size_t c = 2; c < cols.size(); ++c) b.emplace_back(Sampled(cols[0], cols[c]));
  return FilterBank(path.stem().string(), Sampled(cols[0], cols[1]), std::move(b));
}

FilterBank FilterBank::by_name(const std::string& id) {
  if (id == "standard1") return standard(1);
  if (id == "standard2") return standard(2);
  if (id == "standard3") return standard(3);
  if (id == "cosine") return cosine();
  return from_csv(id);
}

double FilterBank::partition_defect(int samples) const {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double xi = samples > 1 ? static_cast<double>(i) / (samples - 1) : 0.0;
    double s = a_hat(xi) * a_hat(xi);
    for (const auto& b : b_) s += b(xi) * b(xi);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

void QuadratureLadder::validate() const {
  if (rules.size() < 2) throw std::invalid_argument("ladder needs at least two rules");
  if (degrees.size() != rules.size()) throw std::invalid_argument("ladder degrees do not match rules");
  for (std::size_t j = 0; j < rules.size(); ++j) {
    if (degrees[j] < 1) throw std::invalid_argument("ladder degrees must be positive");
    if (j > 0 && degrees[j] != 2 * degrees[j - 1])
      throw std::invalid_argument("ladder degrees must double from rule to rule");
    if (rules[j].weights.size() != rules[j].points.size()) throw std::invalid_argument("ladder rule without weights");
    for (double w : rules[j].weights)
      if (!(w > 0.0)) throw std::invalid_argument("ladder weights must be positive");
  }
}

double QuadratureLadder::max_defect() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < rules.size(); ++j) worst = std::max(worst, quadrature_defect(rules[j], degrees[j]));
  return worst;
}

double MaskCascade::energy(int ell) const {
  const auto l = static_cast<std::size_t>(ell);
  double s = l < alpha[0].size() ? alpha[0][l] * alpha[0][l] : 0.0;
  for (const auto& bs : beta)
    for (const auto& bj : bs)
      if (l < bj.size()) s += bj[l] * bj[l];
  return s;
}

MaskCascade build_masks(const FilterBank& bank, const QuadratureLadder& ladder) {
  ladder.validate();
  if (bank.partition_defect() > 1e-12)
    throw std::invalid_argument("filter bank " + bank.name() + " violates the partition of unity");
  const int levels = ladder.levels();
  const int n = bank.high_pass_count();
  MaskCascade c;
  c.alpha.resize(static_cast<std::size_t>(levels));
  c.beta.assign(static_cast<std::size_t>(n), std::vector<std::vector<double>>(static_cast<std::size_t>(levels)));
  const auto& t = ladder.degrees;
  // Top: 1 on l <= t_J, 0 above.
  std::vector<double> next(static_cast<std::size_t>(t.back() + 1), 0.0);
  std::fill(next.begin(), next.begin() + t[static_cast<std::size_t>(levels - 1)] + 1, 1.0);
  for (int j = levels - 1; j >= 0; --j) {
    const auto ju = static_cast<std::size_t>(j);
    const double tn = t[ju + 1];
    auto& a = c.alpha[ju];
    a.resize(static_cast<std::size_t>(t[ju] + 1));
    for (std::size_t l = 0; l < a.size(); ++l) a[l] = bank.a_hat(static_cast<double>(l) / tn) * next[l];
    for (int s = 0; s < n; ++s) {
      auto& b = c.beta[static_cast<std::size_t>(s)][ju];
      b.resize(next.size());
      for (std::size_t l = 0; l < b.size(); ++l) b[l] = bank.b_hat(s, static_cast<double>(l) / tn) * next[l];
    }
    next = a;
  }
  return c;
}

complex atom_eval(AtomKind kind, int level, int s, std::size_t k, SphericalPoint x,
                  const MaskCascade& cascade, const QuadratureLadder& ladder) {
  if (level < 0 || level >= cascade.levels()) throw std::out_of_range("atom_eval: level");
  const auto j = static_cast<std::size_t>(level);
  const bool phi = kind == AtomKind::phi;
  if (!phi && (s < 0 || s >= static_cast<int>(cascade.beta.size()))) throw std::out_of_range("atom_eval: filter");
  const auto& rule = ladder.rules[phi ? j : j + 1];
  if (k >= rule.size()) throw std::out_of_range("atom_eval: point index");
  const auto& mask = phi ? cascade.alpha[j] : cascade.beta[static_cast<std::size_t>(s)][j];
  const int deg = static_cast<int>(mask.size()) - 1;
  // conj(Y_lm(x_k)) for all (l, m), then the masked kernel at x.
  const complex one(1.0, 0.0);
  const double unit = 1.0;
  auto c = analysis_apply(std::span(&one, 1), std::span(&rule.points[k], 1), std::span(&unit, 1), deg);
  for (int l = 0; l <= deg; ++l)
    for (int m = -l; m <= l; ++m) c[harmonic_offset(l, m)] *= mask[static_cast<std::size_t>(l)];
  return std::sqrt(rule.weights[k]) * synthesis_apply(c, std::span(&x, 1))[0];
}

FrameletCoefficients atom_energies(const MaskCascade& cascade, const QuadratureLadder& ladder) {
  FrameletCoefficients e;
  const double a0 = mask_energy(cascade.alpha[0]);
  for (double w : ladder.rules[0].weights) e.v.emplace_back(w * a0, 0.0);
  e.w.resize(static_cast<std::size_t>(cascade.levels()));
  for (std::size_t j = 0; j < e.w.size(); ++j) {
    for (const auto& bs : cascade.beta) {
      const double b = mask_energy(bs[j]);
      std::vector<complex> lev;
      for (double w : ladder.rules[j + 1].weights) lev.emplace_back(w * b, 0.0);
      e.w[j].push_back(std::move(lev));
    }
  }
  return e;
}

FrameletCoefficients decompose(std::span<const complex> f_coeffs, const MaskCascade& cascade,
                               const QuadratureLadder& ladder) {
  const int band = ladder.band();
  if (f_coeffs.size() != harmonic_count(band))
    throw std::invalid_argument("decompose: coefficients do not match the ladder band");
  FrameletCoefficients out;
  {
    const auto& rule = ladder.rules[0];
    const int deg = std::min(ladder.degrees[0], band);
    out.v = synthesis_apply(masked(f_coeffs, cascade.alpha[0], deg), rule.points);
    const auto rw = root_weights(rule);
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] *= rw[k];
  }
  out.w.resize(static_cast<std::size_t>(cascade.levels()));
  for (std::size_t j = 0; j < out.w.size(); ++j) {
    const auto& rule = ladder.rules[j + 1];
    const int deg = std::min(ladder.degrees[j + 1], band);
    const auto rw = root_weights(rule);
    for (const auto& bs : cascade.beta) {
      auto w = synthesis_apply(masked(f_coeffs, bs[j], deg), rule.points);
      for (std::size_t k = 0; k < w.size(); ++k) w[k] *= rw[k];
      out.w[j].push_back(std::move(w));
    }
  }
  return out;
}

std::vector<complex> reconstruct(const FrameletCoefficients& coeffs, const MaskCascade& cascade,
                                 const QuadratureLadder& ladder) {
  const int band = ladder.band();
  std::vector<complex> f(harmonic_count(band));
  if (coeffs.v.size() != ladder.rules[0].size() || coeffs.w.size() != static_cast<std::size_t>(cascade.levels()))
    throw std::invalid_argument("reconstruct: coefficient shape does not match the ladder");
  {
    const auto& rule = ladder.rules[0];
    const int deg = std::min(ladder.degrees[0], band);
    add_masked(f, analysis_apply(coeffs.v, rule.points, root_weights(rule), deg), cascade.alpha[0], deg);
  }
  for (std::size_t j = 0; j < coeffs.w.size(); ++j) {
    const auto& rule = ladder.rules[j + 1];
    const int deg = std::min(ladder.degrees[j + 1], band);
    const auto rw = root_weights(rule);
    if (coeffs.w[j].size() != cascade.beta.size())
      throw std::invalid_argument("reconstruct: wrong number of high-pass channels");
    for (std::size_t s = 0; s < cascade.beta.size(); ++s) {
      if (coeffs.w[j][s].size() != rule.size()) throw std::invalid_argument("reconstruct: wrong level length");
      add_masked(f, analysis_apply(coeffs.w[j][s], rule.points, rw, deg), cascade.beta[s][j], deg);
    }
  }
  return f;
}

double coefficient_energy(const FrameletCoefficients& c) {
  double s = 0.0;
  for (const auto& x : c.v) s += std::norm(x);
  for (const auto& lev : c.w)
    for (const auto& ch : lev)
      for (const auto& x : ch) s += std::norm(x);
  return s;
}

void write_coefficients(const FrameletCoefficients& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "band,level,channel,k,re,im\n";
  for (std::size_t k = 0; k < c.v.size(); ++k)
    out << "v,0,0," << k << ',' << format_double(c.v[k].real()) << ',' << format_double(c.v[k].imag()) << '\n';
  for (std::size_t j = 0; j < c.w.size(); ++j)
    for (std::size_t s = 0; s < c.w[j].size(); ++s)
      for (std::size_t k = 0; k < c.w[j][s].size(); ++k)
        out << "w," << j << ',' << s << ',' << k << ',' << format_double(c.w[j][s][k].real()) << ','
            << format_double(c.w[j][s][k].imag()) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

FrameletCoefficients read_coefficients(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  FrameletCoefficients c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("band", 0) == 0) continue;
    std::istringstream row(line);
    std::string band, field;
    std::size_t idx[3];
    double re = 0.0, im = 0.0;
    bool ok = static_cast<bool>(std::getline(row, band, ','));
    for (auto& v : idx) ok = ok && std::getline(row, field, ',') && (std::istringstream(field) >> v);
    ok = ok && std::getline(row, field, ',') && (std::istringstream(field) >> re);
    ok = ok && std::getline(row, field) && (std::istringstream(field) >> im);
    if (!ok || (band != "v" && band != "w"))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad row");
    if (band == "v") {
      if (idx[2] != c.v.size()) throw std::runtime_error(path.string() + ": rows out of order");
      c.v.emplace_back(re, im);
      continue;
    }
    if (idx[0] >= c.w.size()) c.w.resize(idx[0] + 1);
    auto& lev = c.w[idx[0]];
    if (idx[1] >= lev.size()) lev.resize(idx[1] + 1);
    if (idx[2] != lev[idx[1]].size()) throw std::runtime_error(path.string() + ": rows out of order");
    lev[idx[1]].emplace_back(re, im);
  }
  return c;
}

}  // namespace sphd
