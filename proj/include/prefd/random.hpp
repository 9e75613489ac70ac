#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace prefd::rng {

/// Uniform draw in the open interval (0, 1). Derived straight from the
/// generator bits so streams are reproducible across standard libraries.
inline double uniform01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw (Box-Muller, uses two uniforms per pair).
class NormalSource {
 public:
  double operator()(std::mt19937_64& gen) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniformly distributed direction on the unit sphere in `dim` dimensions.
inline Eigen::VectorXd unit_vector(std::mt19937_64& gen, int dim) {
  NormalSource normal;
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal(gen);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

}  // namespace prefd::rng
