#include <cmath>

#include "doctest.h"
#include "kac/errors.hpp"
#include "kac/initial_data.hpp"
#include "kac/stats.hpp"

using namespace kac;

TEST_CASE("two-point mixture weight") {
  InitialLaw law{TwoPointMixture{{1, 0, 0}, {0, 1, 0}, 0.5}, 7};
  const auto v = sample_initial(law, 1000000);
  std::size_t ones = 0;
  for (const auto& x : v) {
    CHECK((x == Vec3{1, 0, 0} || x == Vec3{0, 1, 0}));
    ones += x == Vec3{1, 0, 0};
  }
  CHECK(std::abs(ones / 1e6 - 0.5) <= 0.002);
}

TEST_CASE("isotropic Gaussian moments") {
  InitialLaw law{IsotropicGaussian{3.0}, 11};
  const auto v = sample_initial(law, 1000000);
  Vec3 m;
  double m2 = 0.0;
  for (const auto& x : v) m += x, m2 += norm2(x);
  m = (1.0 / v.size()) * m;
  m2 /= v.size();
  CHECK(norm(m) <= 0.01);
  CHECK(std::abs(m2 - 3.0) <= 0.02);
}

TEST_CASE("uniform ball support and radial law") {
  InitialLaw law{UniformBall{2.0}, 13};
  const auto v = sample_initial(law, 200000);
  std::size_t inner = 0;
  for (const auto& x : v) {
    CHECK(norm(x) <= 2.0);
    inner += norm(x) <= 1.0;
  }
  // P(|v| <= r/2) = 1/8.
  const double p = inner / 200000.0;
  CHECK(std::abs(p - 0.125) <= 4 * std::sqrt(0.125 * 0.875 / 200000));
}

TEST_CASE("sampling is deterministic and seed dependent") {
  InitialLaw a{IsotropicGaussian{}, 42};
  CHECK(sample_initial(a, 100) == sample_initial(a, 100));
  InitialLaw b = a;
  b.seed = 43;
  CHECK(sample_initial(a, 100) != sample_initial(b, 100));
  InitialLaw c{UniformBall{1.0}, 42};
  CHECK(sample_initial(c, 50) == sample_initial(c, 50));
}

TEST_CASE("invalid laws and sizes") {
  CHECK_THROWS_AS(sample_initial(InitialLaw{}, 1), ConfigError);
  CHECK_THROWS_AS(sample_initial(InitialLaw{}, 0), ConfigError);
  CHECK_THROWS_AS((InitialLaw{TwoPointMixture{{1, 0, 0}, {1, 0, 0}, 0.5}, 0}.validate()), ConfigError);
  CHECK_THROWS_AS((InitialLaw{TwoPointMixture{{1, 0, 0}, {0, 0, 0}, 1.0}, 0}.validate()), ConfigError);
  CHECK_THROWS_AS((InitialLaw{TwoPointMixture{{1, 0, 0}, {0, 0, 0}, 0.0}, 0}.validate()), ConfigError);
  CHECK_THROWS_AS((InitialLaw{UniformBall{0.0}, 0}.validate()), ConfigError);
  CHECK_THROWS_AS((InitialLaw{IsotropicGaussian{-1.0}, 0}.validate()), ConfigError);
}

TEST_CASE("normalize_ensemble") {
  const std::vector<Vec3> a{{1, 0, 0}, {-1, 0, 0}};
  CHECK(normalize_ensemble(a) == a);

  const auto b = normalize_ensemble(std::vector<Vec3>{{2, 0, 0}, {0, 0, 0}});
  CHECK(norm(b[0] - Vec3{1, 0, 0}) <= 1e-15);
  CHECK(norm(b[1] - Vec3{-1, 0, 0}) <= 1e-15);

  const auto c = normalize_ensemble(sample_initial(InitialLaw{UniformBall{3.0}, 5}, 1000));
  Vec3 p;
  double e = 0.0;
  for (const auto& x : c) p += x, e += norm2(x);
  CHECK(norm(p) <= 1e-14 * std::sqrt(e));
  CHECK(std::abs(e / c.size() - 1.0) <= 1e-14);

  CHECK_THROWS_AS(normalize_ensemble(std::vector<Vec3>{{1, 1, 1}, {1, 1, 1}}), ConfigError);
  CHECK_THROWS_AS(normalize_ensemble(std::vector<Vec3>{{1, 1, 1}}), ConfigError);
}

TEST_CASE("exponential moment is finite and stable across seeds") {
  std::vector<double> means;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto v = sample_initial(InitialLaw{IsotropicGaussian{3.0}, seed}, 100000);
    double s = 0.0;
    for (const auto& x : v) s += std::exp(std::pow(norm(x), 1.5));
    means.push_back(s / v.size());
    CHECK(std::isfinite(means.back()));
  }
  CHECK(sample_stddev(means) / mean(means) < 0.1);
}
