#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kac/vec3.hpp"

namespace kac {

/// Isotropic centred Gaussian with E|v|^2 = energy_per_particle.
struct IsotropicGaussian {
  double energy_per_particle = 3.0;
};

/// Uniform law on the ball of the given radius.
struct UniformBall {
  double radius = 1.0;
};

/// w delta_{u1} + (1 - w) delta_{u2}, u1 != u2, 0 < w < 1.
struct TwoPointMixture {
  Vec3 u1;
  Vec3 u2;
  double weight = 0.5;
};

struct InitialLaw {
  std::variant<IsotropicGaussian, UniformBall, TwoPointMixture> kind = IsotropicGaussian{};
  std::uint64_t seed = 0;

  /// Throws ConfigError on invalid parameters (e.g. a degenerate two-point law).
  void validate() const;
  std::string describe() const;
};

/// n i.i.d. draws from the law; deterministic in law.seed. Requires n >= 2.
std::vector<Vec3> sample_initial(const InitialLaw& law, std::size_t n);

/// Shifts to zero total momentum and rescales to unit energy per particle.
/// Throws ConfigError for fewer than two particles or an all-equal ensemble.
std::vector<Vec3> normalize_ensemble(std::span<const Vec3> velocities);

}  // namespace kac
