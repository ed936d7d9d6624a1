#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sphd {

/// Seeded generator with fully specified output: the engine is mt19937_64,
/// uniforms take the top 53 bits as ((x >> 11) + 0.5) / 2^53 so they lie in
/// the open interval (0, 1), and normals use the Box-Muller transform with
/// the cosine branch first. The standard distributions are avoided because
/// their algorithms vary between library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sphd
