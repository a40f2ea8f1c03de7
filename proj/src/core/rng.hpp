#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bridge {

// Seeded random stream. Every distribution is implemented directly on top of
// the mt19937_64 engine so that draw sequences are reproducible across
// standard library implementations. Sub-streams are derived from (seed, id)
// so inserting a new update type does not perturb the others.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{seed, stream_id, std::uint64_t{0x9e3779b97f4a7c15ULL}};
    engine_.seed(seq);
  }

  // Uniform on [0,1).
  double uniform() {
    // 53-bit mantissa fill.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t raw() { return engine_(); }

  // Marsaglia polar method; rejection keeps the mapping deterministic.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double mul = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * mul;
    have_spare_ = true;
    return u * mul;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Marsaglia-Tsang; shape < 1 handled by the boost U^{1/shape} trick.
  double gamma(double shape, double rate) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  bool bernoulli(double prob) { return uniform() < prob; }

  double chi_squared(double dof) { return gamma(0.5 * dof, 0.5); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace bridge
