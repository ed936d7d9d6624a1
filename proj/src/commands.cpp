#include "sphdesign/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphdesign/approximation.hpp"
#include "sphdesign/denoise.hpp"
#include "sphdesign/framelets.hpp"
#include "sphdesign/manifest.hpp"
#include "sphdesign/objective.hpp"
#include "sphdesign/optimize.hpp"
#include "sphdesign/parallel.hpp"
#include "sphdesign/pointset_io.hpp"
#include "sphdesign/pointsets.hpp"
#include "sphdesign/random.hpp"

namespace sphd {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for failures that map to a specific exit code.
struct CommandFailure : std::runtime_error {
  int code;
  CommandFailure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
  bool deterministic = true;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "key = value file; command-line flags take precedence");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--out", c.out, "Output directory (or .csv path for point sets)");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--deterministic,!--fast", c.deterministic, "Ordered reductions (default on)");
}

void apply_execution(const Common& c) {
  execution().threads = c.threads;
  execution().deterministic = c.deterministic;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splices "--key=value" tokens from the --config file right after the
// subcommand name. Keys given on the command line are skipped so explicit
// flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.push_back(name);
    if (name == "config") path = eq != std::string::npos ? a.substr(eq + 1) : (i + 1 < args.size() ? args[i + 1] : "");
  }
  if (path.empty() || args.empty()) return args;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    line = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    std::replace(key.begin(), key.end(), '_', '-');
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    if (key.empty() || key == "config") throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad key");
    if (std::find(given.begin(), given.end(), key) != given.end()) continue;
    extra.push_back("--" + key + "=" + value);
  }
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Writes JSON into dir/name, or to stdout when no output was requested.
void emit_json(const Common& c, const std::string& name, const json& j) {
  if (c.out.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_text(fs::path(c.out) / name, j.dump(2) + "\n");
}

std::string csv_header(const RunManifest& m, const std::string& columns) {
  return "# manifest=" + m.hash + "\n" + columns + "\n";
}

std::string num(double x) { return format_double(x); }

QuadraturePointSet generate(const std::string& gen, std::size_t n, int level, std::uint64_t seed) {
  if (gen == "spiral") return spiral_points(n);
  if (gen == "uniform") return uniform_random_points(n, seed);
  if (gen == "icosa") return icosahedral_points(level);
  throw std::invalid_argument("unknown generator: " + gen);
}

// Point-set destination: an explicit .csv path, or <dir>/<stem>.csv.
fs::path pointset_target(const Common& c, const std::string& stem) {
  if (c.out.empty()) return {};
  const fs::path p(c.out);
  return p.extension() == ".csv" ? p : p / (stem + ".csv");
}

fs::path sibling(const fs::path& csv, const std::string& suffix) {
  return csv.parent_path() / (csv.stem().string() + suffix);
}

std::string pointset_csv(const QuadraturePointSet& set, const RunManifest& m) {
  std::ostringstream s;
  s << csv_header(m, "theta,phi,weight");
  for (std::size_t i = 0; i < set.size(); ++i)
    s << num(set.points[i].theta) << ',' << num(set.points[i].phi) << ',' << num(set.weights[i]) << '\n';
  return s.str();
}

bool equal_weights(const QuadraturePointSet& set) {
  return std::all_of(set.weights.begin(), set.weights.end(), [&](double w) { return w == set.weights.front(); });
}

json certification_json(const QuadraturePointSet& set, int t, double tol) {
  const double defect = t > 0 ? quadrature_defect(set, t) : 0.0;
  json j = {{"t", t}, {"N", set.size()}, {"max_scaled_weyl", defect}, {"tolerance", tol}, {"pass", defect <= tol}};
  if (equal_weights(set) && t > 0)
    j["sqrt_objective"] = std::sqrt(std::max(objective_value(weyl_sums(set.points, t)), 0.0));
  else
    j["sqrt_objective"] = t == 0 ? json(0.0) : json(nullptr);
  return j;
}

WeightMode weight_mode_from(const std::string& s) {
  if (s == "w") return WeightMode::w;
  if (s == "sqrt_w") return WeightMode::sqrt_w;
  throw std::invalid_argument("unknown weight mode: " + s);
}

// ---------------------------------------------------------------- pointset

struct PointsetArgs {
  Common c;
  std::string gen = "spiral";
  std::size_t n = 0;
  int level = 0;
};

int cmd_pointset(const PointsetArgs& a, const std::string& config) {
  if (a.gen != "icosa" && a.n == 0) throw std::invalid_argument("--n is required for " + a.gen);
  auto set = generate(a.gen, a.n, a.level, a.c.seed);
  RunManifest m;
  m.command = "pointset";
  m.config_path = config;
  m.seed = a.c.seed;
  m.parameters = {{"gen", a.gen}, {"n", a.n}, {"level", a.level}};
  const auto target = pointset_target(a.c, "points");
  if (!target.empty()) m.outputs = {target.filename().string(), envelope_path(target).filename().string()};
  m.seal();
  if (target.empty()) {
    std::cout << pointset_csv(set, m);
  } else {
    write_pointset(set, target, {{"manifest", m.to_json()}});
  }
  return exit_ok;
}

// ---------------------------------------------------------------- design

struct DesignArgs {
  Common c;
  std::string init;
  std::string gen = "spiral";
  std::size_t n = 0;
  int level = 0;
  int t = -1;
  std::string solver = "trpcg";
  std::string hessian = "full";
  int k_max = -1;
  double eps1 = 1e-13;
  double r = 0.2;
  double eps2 = 1e-10;
  double c_backtrack = 0.5;
  int i_max = 40;
  double radius0 = 1.0;
  double max_radius = 10.0;
  double eta = 0.1;
  int cg_max_iter = 500;
  std::string precond = "none";
  double tol = 1e-10;
};

int cmd_design(const DesignArgs& a, const std::string& config) {
  if (a.t < 1) throw std::invalid_argument("--t must be at least 1");
  const HessianMode mode = a.hessian == "full"     ? HessianMode::full
                           : a.hessian == "approx" ? HessianMode::approximation
                                                   : throw std::invalid_argument("unknown hessian mode: " + a.hessian);
  QuadraturePointSet init;
  RunManifest m;
  m.command = "design";
  m.config_path = config;
  m.seed = a.c.seed;
  if (!a.init.empty()) {
    init = read_pointset(a.init);
    m.inputs.push_back(a.init);
  } else {
    const std::size_t n = a.n ? a.n : static_cast<std::size_t>(a.t + 1) * static_cast<std::size_t>(a.t + 1);
    init = generate(a.gen, n, a.level, a.c.seed);
  }
  const std::size_t n = init.size();
  if (n < 3) throw std::invalid_argument("design needs at least 3 points");
  const auto gauge = fix_gauge(init.points);
  if (gauge.degenerate) throw std::invalid_argument("initial points 1 and 2 are coincident or antipodal");

  OptimResult res;
  json solver_cfg;
  if (a.solver == "lsrcg") {
    auto cfg = LsRcgConfig::for_degree(a.t);
    if (a.k_max > 0) cfg.k_max = a.k_max;
    cfg.eps1 = a.eps1;
    cfg.r = a.r;
    cfg.eps2 = a.eps2;
    cfg.c_backtrack = a.c_backtrack;
    cfg.i_max = a.i_max;
    cfg.hessian_mode = mode;
    cfg.validate();
    solver_cfg = {{"k_max", cfg.k_max}, {"eps1", cfg.eps1}, {"r", cfg.r},        {"eps2", cfg.eps2},
                  {"c_backtrack", cfg.c_backtrack},          {"i_max", cfg.i_max}};
    res = ls_rcg(gauge.config, a.t, cfg);
  } else if (a.solver == "trpcg") {
    auto cfg = TrConfig::for_degree(a.t);
    if (a.k_max > 0) cfg.k_max = a.k_max;
    cfg.eps1 = a.eps1;
    cfg.initial_radius = a.radius0;
    cfg.max_radius = a.max_radius;
    cfg.eta = a.eta;
    cfg.cg_max_iter = a.cg_max_iter;
    if (a.precond != "none" && a.precond != "diag") throw std::invalid_argument("unknown preconditioner: " + a.precond);
    cfg.diagonal_preconditioner = a.precond == "diag";
    cfg.hessian_mode = mode;
    cfg.validate();
    solver_cfg = {{"k_max", cfg.k_max},     {"eps1", cfg.eps1}, {"initial_radius", cfg.initial_radius},
                  {"max_radius", cfg.max_radius}, {"eta", cfg.eta}, {"cg_max_iter", cfg.cg_max_iter},
                  {"preconditioner", a.precond}};
    res = tr_pcg(gauge.config, a.t, cfg);
  } else {
    throw std::invalid_argument("unknown solver: " + a.solver);
  }

  auto design = equal_weight_set(unfix_gauge(GaugedConfiguration{res.x}, n), init.generator);
  design.seed = init.seed;
  const json cert = certification_json(design, a.t, a.tol);
  design.certification = cert["max_scaled_weyl"].get<double>();
  if (cert["pass"].get<bool>()) design.declared_degree = a.t;

  m.parameters = {{"t", a.t},       {"solver", a.solver}, {"hessian", a.hessian}, {"gen", a.gen},
                  {"n", n},         {"level", a.level},   {"tol", a.tol},         {"solver_config", solver_cfg}};
  const auto target = pointset_target(a.c, "design");
  if (!target.empty())
    m.outputs = {target.filename().string(), envelope_path(target).filename().string(),
                 sibling(target, "_trace.csv").filename().string()};
  m.seal();

  const json summary = {{"iterations", res.iterations},
                        {"status", to_string(res.status)},
                        {"objective_value", res.objective_value},
                        {"sqrt_objective", res.sqrt_objective},
                        {"grad_inf_norm", res.grad_inf_norm},
                        {"hess_vec_count", res.hess_vec_count},
                        {"restarts", res.restarts},
                        {"forced_restarts", res.forced_restarts},
                        {"certification", cert},
                        {"manifest", m.to_json()}};
  if (target.empty()) {
    std::cout << summary.dump(2) << '\n';
  } else {
    write_pointset(design, target, {{"manifest", m.to_json()}, {"solver", summary}});
    std::ostringstream tr;
    tr << csv_header(m, "iteration,value,grad_norm");
    for (const auto& e : res.trace) tr << e.iteration << ',' << num(e.value) << ',' << num(e.grad_norm) << '\n';
    write_text(sibling(target, "_trace.csv"), tr.str());
  }
  if (res.status != OptimStatus::converged)
    throw CommandFailure(exit_not_converged, "solver stopped with status " + to_string(res.status));
  if (!cert["pass"].get<bool>()) throw CommandFailure(exit_certification, "design failed certification");
  return exit_ok;
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
  Common c;
  std::string points;
  int t = -1;
  double tol = 1e-10;
};

int cmd_certify(const CertifyArgs& a, const std::string& config) {
  const auto set = read_pointset(a.points);
  const int t = a.t >= 0 ? a.t : set.declared_degree.value_or(-1);
  if (t < 0) throw std::invalid_argument("--t is required when the point set declares no degree");
  RunManifest m;
  m.command = "certify";
  m.config_path = config;
  m.seed = a.c.seed;
  m.inputs = {a.points};
  m.parameters = {{"t", t}, {"tol", a.tol}};
  if (!a.c.out.empty()) m.outputs = {"certify.json"};
  m.seal();
  json j = certification_json(set, t, a.tol);
  j["manifest"] = m.to_json();
  emit_json(a.c, "certify.json", j);
  return j["pass"].get<bool>() ? exit_ok : exit_certification;
}

// ---------------------------------------------------------------- project / sweep

struct ProjectArgs {
  Common c;
  std::string points;
  std::string function = "f4";
  int T = -1;
  std::string weight_mode = "w";
  double sigma = 0.0;
  int k_max = 1000;
  double eps = 2.220446049250313e-16;
  int stagnation = 25;
  int t_min = 1;
  int t_max = 30;
  int t_step = 1;
};

ProjectionOptions projection_options(const ProjectArgs& a) {
  ProjectionOptions o;
  o.k_max = a.k_max;
  o.eps = a.eps;
  o.stagnation_window = a.stagnation;
  if (o.k_max < 0 || !(o.eps >= 0.0) || o.stagnation_window < 1)
    throw std::invalid_argument("invalid projection options");
  return o;
}

json projection_params(const ProjectArgs& a) {
  return {{"function", a.function}, {"weight_mode", a.weight_mode}, {"sigma", a.sigma},
          {"k_max", a.k_max},       {"eps", a.eps},                 {"stagnation_window", a.stagnation}};
}

int cmd_project(const ProjectArgs& a, const std::string& config) {
  if (a.T < 0) throw std::invalid_argument("--T is required");
  const auto set = read_pointset(a.points);
  const auto truth = sample(set, test_function(a.function), a.function);
  const auto noisy = add_noise(truth, a.sigma, a.c.seed);
  const auto pr = project_cg(noisy, set, a.T, weight_mode_from(a.weight_mode), projection_options(a));

  RunManifest m;
  m.command = "project";
  m.config_path = config;
  m.seed = a.c.seed;
  m.inputs = {a.points};
  m.parameters = projection_params(a);
  m.parameters["T"] = a.T;
  if (!a.c.out.empty()) m.outputs = {"project.json", "signals.csv"};
  m.seal();

  const json j = {{"T", a.T},
                  {"N", set.size()},
                  {"relative_error", relative_l2_error(pr.projected, truth, set.weights)},
                  {"cg_iterations", pr.cg_iterations},
                  {"status", to_string(pr.status)},
                  {"final_residual_norm", pr.final_residual_norm},
                  {"manifest", m.to_json()}};
  emit_json(a.c, "project.json", j);
  if (!a.c.out.empty()) {
    std::ostringstream s;
    s << csv_header(m, "theta,phi,truth,noisy,projected");
    for (std::size_t i = 0; i < set.size(); ++i)
      s << num(set.points[i].theta) << ',' << num(set.points[i].phi) << ',' << num(truth.values[i].real()) << ','
        << num(noisy.values[i].real()) << ',' << num(pr.projected.values[i].real()) << '\n';
    write_text(fs::path(a.c.out) / "signals.csv", s.str());
  }
  return exit_ok;
}

int cmd_sweep(const ProjectArgs& a, const std::string& config) {
  if (a.t_min < 0 || a.t_max < a.t_min || a.t_step < 1) throw std::invalid_argument("invalid degree range");
  const auto set = read_pointset(a.points);
  const auto truth = sample(set, test_function(a.function), a.function);
  const auto noisy = add_noise(truth, a.sigma, a.c.seed);
  std::vector<int> degrees;
  for (int T = a.t_min; T <= a.t_max; T += a.t_step) degrees.push_back(T);
  const auto sw = degree_sweep(noisy, truth, set, degrees, weight_mode_from(a.weight_mode), projection_options(a));

  RunManifest m;
  m.command = "sweep";
  m.config_path = config;
  m.seed = a.c.seed;
  m.inputs = {a.points};
  m.parameters = projection_params(a);
  m.parameters["degrees"] = degrees;
  if (!a.c.out.empty()) m.outputs = {"sweep.json", "sweep.csv"};
  m.seal();

  json rows = json::array();
  for (const auto& r : sw.rows)
    rows.push_back({{"T", r.degree}, {"error", r.error}, {"cg_iterations", r.cg_iterations}, {"status", to_string(r.status)}});
  const json j = {{"argmin_degree", sw.best_degree}, {"min_error", sw.best_error}, {"rows", rows}, {"manifest", m.to_json()}};
  emit_json(a.c, "sweep.json", j);
  if (!a.c.out.empty()) {
    std::ostringstream s;
    s << csv_header(m, "T,error,cg_iterations,status");
    for (const auto& r : sw.rows) s << r.degree << ',' << num(r.error) << ',' << r.cg_iterations << ',' << to_string(r.status) << '\n';
    write_text(fs::path(a.c.out) / "sweep.csv", s.str());
  }
  return exit_ok;
}

// ---------------------------------------------------------------- denoise / bank-check

QuadratureLadder load_ladder(const std::vector<std::string>& paths) {
  QuadratureLadder lad;
  for (const auto& p : paths) {
    auto set = read_pointset(p);
    if (!set.declared_degree) throw std::invalid_argument(p + ": ladder rules need a declared degree");
    lad.degrees.push_back(*set.declared_degree);
    lad.rules.push_back(std::move(set));
  }
  lad.validate();
  return lad;
}

struct DenoiseArgs {
  Common c;
  std::vector<std::string> ladder;
  std::string bank = "standard3";
  std::string rule = "LS";
  double c_coef = 0.0;
  double c1 = 0.0;
  double sigma = 0.05;
  std::string function = "f4";
  int knn = 12;
  double rnn = 0.0;
  bool keep_lowpass = false;
  int degree = -1;
  std::string coefficient_noise = "quadrature";
  std::string weight_mode = "w";
};

int cmd_denoise(const DenoiseArgs& a, const CLI::App* sub, const std::string& config) {
  const auto ladder = load_ladder(a.ladder);
  const auto bank = FilterBank::by_name(a.bank);
  auto cfg = DenoiseConfig::defaults(threshold_kind_from_string(a.rule));
  if (sub->count("--c") > 0) cfg.c = a.c_coef;
  if (sub->count("--c1") > 0) cfg.c1 = a.c1;
  if (!(cfg.c > 0.0) || !(cfg.c1 > 0.0)) throw std::invalid_argument("c and c1 must be positive");
  if (!(a.sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  cfg.cap = a.rnn > 0.0 ? CapSpec::rnn(a.rnn) : CapSpec::knn(a.knn);
  cfg.keep_lowpass = a.keep_lowpass;
  cfg.degree = a.degree;
  cfg.weight_mode = weight_mode_from(a.weight_mode);
  if (a.coefficient_noise == "quadrature")
    cfg.coefficient_noise = CoefficientNoise::quadrature;
  else if (a.coefficient_noise == "raw")
    cfg.coefficient_noise = CoefficientNoise::raw;
  else
    throw std::invalid_argument("unknown coefficient noise mode: " + a.coefficient_noise);

  const auto& fine = ladder.rules.back();
  const auto truth = sample(fine, test_function(a.function), a.function);
  double fmax = 0.0;
  for (const auto& v : truth.values) fmax = std::max(fmax, std::abs(v));
  cfg.sigma = a.sigma * fmax;
  const auto noisy = add_noise(truth, a.sigma, a.c.seed);
  const auto res = denoise_pipeline(noisy, &truth, ladder, bank, cfg);

  RunManifest m;
  m.command = "denoise";
  m.config_path = config;
  m.seed = a.c.seed;
  m.inputs = a.ladder;
  m.parameters = res.report.config;
  m.parameters["function"] = a.function;
  m.parameters["noise_level"] = a.sigma;
  if (!a.c.out.empty()) m.outputs = {"denoise.json", "signals.csv"};
  m.seal();

  json j = to_json(res.report);
  j["manifest"] = m.to_json();
  emit_json(a.c, "denoise.json", j);
  if (!a.c.out.empty()) {
    std::ostringstream s;
    s << csv_header(m, "theta,phi,truth,noisy,denoised");
    for (std::size_t i = 0; i < fine.size(); ++i)
      s << num(fine.points[i].theta) << ',' << num(fine.points[i].phi) << ',' << num(truth.values[i].real()) << ','
        << num(noisy.values[i].real()) << ',' << num(res.denoised.values[i].real()) << '\n';
    write_text(fs::path(a.c.out) / "signals.csv", s.str());
  }
  return exit_ok;
}

struct BankArgs {
  Common c;
  std::string bank = "standard3";
  std::vector<std::string> ladder;
  int functions = 50;
  double tol = 1e-10;
};

int cmd_bank_check(const BankArgs& a, const std::string& config) {
  const auto bank = FilterBank::by_name(a.bank);
  RunManifest m;
  m.command = "bank-check";
  m.config_path = config;
  m.seed = a.c.seed;
  m.inputs = a.ladder;
  if (fs::exists(a.bank)) m.inputs.push_back(a.bank);
  m.parameters = {{"bank", a.bank}, {"functions", a.functions}, {"tol", a.tol}};
  if (!a.c.out.empty()) m.outputs = {"bank.json"};
  m.seal();

  json j = {{"bank", bank.name()}, {"high_pass", bank.high_pass_count()}, {"partition_defect", bank.partition_defect()}};
  bool pass = j["partition_defect"].get<double>() <= a.tol;
  if (!a.ladder.empty()) {
    const auto ladder = load_ladder(a.ladder);
    j["ladder_defect"] = ladder.max_defect();
    const auto cascade = build_masks(bank, ladder);
    double cas = 0.0;
    for (int l = 0; l <= ladder.band(); ++l) cas = std::max(cas, std::abs(cascade.energy(l) - 1.0));
    Rng rng(a.c.seed);
    double round = 0.0, pars = 0.0;
    for (int f = 0; f < a.functions; ++f) {
      std::vector<complex> c(harmonic_count(ladder.band()));
      for (auto& x : c) x = {rng.normal(), rng.normal()};
      const auto co = decompose(c, cascade, ladder);
      const auto back = reconstruct(co, cascade, ladder);
      double num2 = 0.0, den = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        num2 += std::norm(back[i] - c[i]);
        den += std::norm(c[i]);
      }
      round = std::max(round, std::sqrt(num2 / den));
      pars = std::max(pars, std::abs(coefficient_energy(co) - den) / den);
    }
    j["cascade_defect"] = cas;
    j["roundtrip_error"] = round;
    j["parseval_error"] = pars;
    pass = pass && cas <= a.tol && round <= a.tol && pars <= a.tol;
  }
  j["tolerance"] = a.tol;
  j["pass"] = pass;
  j["manifest"] = m.to_json();
  emit_json(a.c, "bank.json", j);
  return pass ? exit_ok : exit_certification;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Spherical t-designs, polynomial approximation and framelet denoising"};
  app.require_subcommand(1);

  PointsetArgs ps;
  auto* s_ps = app.add_subcommand("pointset", "Generate an initial point set");
  add_common(s_ps, ps.c);
  s_ps->add_option("--gen", ps.gen, "spiral | uniform | icosa");
  s_ps->add_option("--n", ps.n, "Number of points (spiral, uniform)");
  s_ps->add_option("--level", ps.level, "Subdivision level (icosa)");

  DesignArgs ds;
  auto* s_ds = app.add_subcommand("design", "Minimize A_{N,t} to compute a spherical t-design");
  add_common(s_ds, ds.c);
  s_ds->add_option("--init", ds.init, "Initial point-set CSV");
  s_ds->add_option("--gen", ds.gen, "Generator when no --init is given");
  s_ds->add_option("--n", ds.n, "Point count for the generator (default (t+1)^2)");
  s_ds->add_option("--level", ds.level, "Icosahedral level");
  s_ds->add_option("--t", ds.t, "Degree")->required();
  s_ds->add_option("--solver", ds.solver, "lsrcg | trpcg");
  s_ds->add_option("--hessian", ds.hessian, "full | approx");
  s_ds->add_option("--k-max", ds.k_max, "Outer iteration limit (default 200 t)");
  s_ds->add_option("--eps1", ds.eps1, "Gradient max-norm tolerance");
  s_ds->add_option("--r", ds.r, "LS-RCG restart threshold");
  s_ds->add_option("--eps2", ds.eps2, "LS-RCG line-search tolerance");
  s_ds->add_option("--c-backtrack", ds.c_backtrack, "LS-RCG backtracking factor");
  s_ds->add_option("--i-max", ds.i_max, "LS-RCG line-search iterations");
  s_ds->add_option("--radius0", ds.radius0, "Trust-region initial radius");
  s_ds->add_option("--max-radius", ds.max_radius, "Trust-region maximum radius");
  s_ds->add_option("--eta", ds.eta, "Trust-region acceptance ratio");
  s_ds->add_option("--cg-max-iter", ds.cg_max_iter, "Trust-region inner CG limit");
  s_ds->add_option("--precond", ds.precond, "none | diag");
  s_ds->add_option("--tol", ds.tol, "Certification tolerance on the scaled Weyl sums");

  CertifyArgs cs;
  auto* s_cs = app.add_subcommand("certify", "Check the quadrature exactness of a point set");
  add_common(s_cs, cs.c);
  s_cs->add_option("--points", cs.points, "Point-set CSV")->required();
  s_cs->add_option("--t", cs.t, "Degree (default: declared degree)");
  s_cs->add_option("--tol", cs.tol, "Tolerance on the scaled Weyl sums");

  ProjectArgs pj;
  auto* s_pj = app.add_subcommand("project", "Project a sampled test function onto Pi_T");
  ProjectArgs sw;
  auto* s_sw = app.add_subcommand("sweep", "Projection error over a range of degrees");
  for (auto [sub, a] : {std::pair{s_pj, &pj}, std::pair{s_sw, &sw}}) {
    add_common(sub, a->c);
    sub->add_option("--points", a->points, "Point-set CSV")->required();
    sub->add_option("--function", a->function, "f0..f4 | indicator");
    sub->add_option("--weight-mode", a->weight_mode, "w | sqrt_w");
    sub->add_option("--sigma", a->sigma, "Noise level relative to max |f|");
    sub->add_option("--k-max", a->k_max, "CG iteration limit");
    sub->add_option("--eps", a->eps, "CG tolerance relative to |b|");
    sub->add_option("--stagnation", a->stagnation, "CG stagnation window");
  }
  s_pj->add_option("--T", pj.T, "Projection degree")->required();
  s_sw->add_option("--t-min", sw.t_min, "First degree");
  s_sw->add_option("--t-max", sw.t_max, "Last degree");
  s_sw->add_option("--t-step", sw.t_step, "Degree step");

  DenoiseArgs dn;
  auto* s_dn = app.add_subcommand("denoise", "Framelet denoising of a noisy test function");
  add_common(s_dn, dn.c);
  s_dn->add_option("--ladder", dn.ladder, "Point-set CSVs, coarse to fine")->required()->delimiter(',');
  s_dn->add_option("--bank", dn.bank, "standard1..3 | cosine | CSV path");
  s_dn->add_option("--rule", dn.rule, "GH | GS | LH | LS | none");
  s_dn->add_option("--c", dn.c_coef, "Coefficient threshold constant");
  s_dn->add_option("--c1", dn.c1, "Residual threshold constant");
  s_dn->add_option("--sigma", dn.sigma, "Noise level relative to max |f|");
  s_dn->add_option("--function", dn.function, "f0..f4 | indicator");
  s_dn->add_option("--knn", dn.knn, "Cap size for local rules");
  s_dn->add_option("--rnn", dn.rnn, "Cap radius for local rules (overrides --knn)");
  s_dn->add_flag("--keep-lowpass", dn.keep_lowpass, "Leave low-pass coefficients unthresholded");
  s_dn->add_option("--degree", dn.degree, "Projection degree (default: ladder band)");
  s_dn->add_option("--coefficient-noise", dn.coefficient_noise, "quadrature | raw");
  s_dn->add_option("--weight-mode", dn.weight_mode, "w | sqrt_w");

  BankArgs bk;
  auto* s_bk = app.add_subcommand("bank-check", "Verify a filter bank and its tight-frame identities");
  add_common(s_bk, bk.c);
  s_bk->add_option("--bank", bk.bank, "standard1..3 | cosine | CSV path");
  s_bk->add_option("--ladder", bk.ladder, "Point-set CSVs, coarse to fine")->delimiter(',');
  s_bk->add_option("--functions", bk.functions, "Random test functions");
  s_bk->add_option("--tol", bk.tol, "Tolerance");

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }
  std::vector<std::string> rev(expanded.rbegin(), expanded.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    if (s_ps->parsed()) return apply_execution(ps.c), cmd_pointset(ps, ps.c.config);
    if (s_ds->parsed()) return apply_execution(ds.c), cmd_design(ds, ds.c.config);
    if (s_cs->parsed()) return apply_execution(cs.c), cmd_certify(cs, cs.c.config);
    if (s_pj->parsed()) return apply_execution(pj.c), cmd_project(pj, pj.c.config);
    if (s_sw->parsed()) return apply_execution(sw.c), cmd_sweep(sw, sw.c.config);
    if (s_dn->parsed()) return apply_execution(dn.c), cmd_denoise(dn, s_dn, dn.c.config);
    if (s_bk->parsed()) return apply_execution(bk.c), cmd_bank_check(bk, bk.c.config);
  } catch (const CommandFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  }
  return exit_config;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace sphd
