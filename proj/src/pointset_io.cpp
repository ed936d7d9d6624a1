#include "sphdesign/pointset_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sphd {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::filesystem::path envelope_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

void write_pointset(const QuadraturePointSet& set, const std::filesystem::path& csv,
                    const nlohmann::json& extra) {
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  if (extra.contains("manifest") && extra["manifest"].contains("hash"))
    out << "# manifest=" << extra["manifest"]["hash"].get<std::string>() << '\n';
  out << "theta,phi,weight\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << format_double(set.points[i].theta) << ',' << format_double(set.points[i].phi) << ','
        << format_double(set.weights[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + csv.string());

  nlohmann::json env = {{"N", set.size()},
                        {"declared_degree", nullptr},
                        {"generator", set.generator},
                        {"seed", set.seed},
                        {"certification", nullptr},
                        {"csv", csv.filename().string()}};
  if (set.declared_degree) env["declared_degree"] = *set.declared_degree;
  if (set.certification) env["certification"] = {{"max_scaled_weyl", *set.certification}};
  for (const auto& [k, v] : extra.items()) env[k] = v;
  std::ofstream js(envelope_path(csv));
  if (!js) throw std::runtime_error("cannot write " + envelope_path(csv).string());
  js << env.dump(2) << '\n';
}

QuadraturePointSet read_pointset(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot open " + csv.string());
  QuadraturePointSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("theta", 0) == 0) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    double v[3];
    for (int k = 0; k < 3; ++k) {
      v[k] = std::strtod(s, &end);
      if (end == s) throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) + ": bad number");
      s = end;
      if (k < 2) {
        if (*s != ',') throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) + ": expected ','");
        ++s;
      }
    }
    set.points.push_back({v[0], v[1]});
    set.weights.push_back(v[2]);
  }
  const auto env_path = envelope_path(csv);
  if (std::filesystem::exists(env_path)) {
    std::ifstream js(env_path);
    nlohmann::json env;
    try {
      js >> env;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(env_path.string() + ": " + e.what());
    }
    if (env.contains("N") && env["N"].get<std::size_t>() != set.size())
      throw std::runtime_error(env_path.string() + ": N does not match CSV row count");
    if (env.contains("declared_degree") && !env["declared_degree"].is_null())
      set.declared_degree = env["declared_degree"].get<int>();
    if (env.contains("certification") && env["certification"].is_object())
      set.certification = env["certification"].value("max_scaled_weyl", 0.0);
    set.generator = env.value("generator", std::string{});
    set.seed = env.value("seed", std::uint64_t{0});
  }
  return set;
}

}  // namespace sphd
