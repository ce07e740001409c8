#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kac/coupling.hpp"
#include "kac/errors.hpp"
#include "kac/stats.hpp"
#include "oracles.hpp"

using namespace kac;
using std::numbers::pi;

namespace {

CoupledConfig config(double ka, double kb, std::size_t n, double t, std::uint64_t seed) {
  CoupledConfig c;
  c.n_particles = n;
  c.kernel = KernelSpec::power_law(0.5, 0.5);
  c.cutoff_a = ka;
  c.cutoff_b = kb;
  c.horizon_t = t;
  c.seed = seed;
  return c;
}

std::vector<Vec3> gaussian(std::size_t n, std::uint64_t seed) {
  return sample_initial(InitialLaw{IsotropicGaussian{3.0}, seed}, n);
}

}  // namespace

TEST_CASE("equal cutoffs keep the systems identical") {
  const auto c = config(8.0, 8.0, 32, 1.0, 4);
  const auto s = run_coupled(c, gaussian(32, 4));
  CHECK(s.a.velocities == s.b.velocities);
  CHECK(s.a.event_count == s.b.event_count);
  CHECK(s.b.event_count > 0);
  for (const auto& [t, h] : s.history) CHECK(h == 0.0);
}

TEST_CASE("h_0 = 0 and history at record times") {
  auto c = config(2.0, 8.0, 16, 1.0, 5);
  c.record_times = {0.0, 0.5, 1.0};
  const auto s = run_coupled(c, gaussian(16, 5));
  REQUIRE(s.history.size() == 3);
  CHECK(s.history[0] == std::make_pair(0.0, 0.0));
  CHECK(s.history[1].first == 0.5);
  CHECK(s.history[2].second > 0.0);
  CHECK(s.history[2].second == doctest::Approx(coupled_distance(s)));
}

TEST_CASE("atoms above the small cutoff move only system B") {
  const auto c = config(2.0, 8.0, 2, 1.0, 0);
  CoupledState s = make_coupled(c, {{1, 0, 0}, {-1, 0, 0}});
  CHECK(coupled_distance(s) == 0.0);
  apply_coupled_event(c, s, EventDraw{0, 1, 5.0, 0.3, false});
  CHECK(s.a.velocities == std::vector<Vec3>{{1, 0, 0}, {-1, 0, 0}});
  CHECK(s.b.velocities != s.a.velocities);
  CHECK(coupled_distance(s) > 0.0);
  CHECK(s.a.event_count == 0);
  CHECK(s.b.event_count == 1);
}

TEST_CASE("single coupled event by hand with parallel relative velocities") {
  const auto c = config(4.0, 8.0, 2, 1.0, 0);
  CoupledState s = make_coupled(c, {{1, 0, 0}, {-1, 0, 0}});
  s.b.velocities = {{2, 0, 0}, {-2, 0, 0}};
  const double z = 1.5, phi = 0.7;
  apply_coupled_event(c, s, EventDraw{0, 1, z, phi, false});

  // X_A = (2,0,0), X_B = (4,0,0); phi_zero = 0 for parallel vectors and the
  // frame of either is (e_x, e_y, e_z).
  auto a_vec = [&](double x) {
    const double theta = oracle::g_power(0.5, z / std::sqrt(x));
    return Vec3{-(1 - std::cos(theta)) / 2 * x, std::sin(theta) / 2 * x * std::cos(phi),
                std::sin(theta) / 2 * x * std::sin(phi)};
  };
  const Vec3 ca = a_vec(2.0), cb = a_vec(4.0);
  const double expected =
      0.5 * (norm2(Vec3{1, 0, 0} + ca - Vec3{2, 0, 0} - cb) + norm2(Vec3{-1, 0, 0} - ca - Vec3{-2, 0, 0} + cb));
  CHECK(coupled_distance(s) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(norm(s.a.velocities[0] - Vec3{1, 0, 0} - ca) <= 1e-15);
  CHECK(norm(s.b.velocities[0] - Vec3{2, 0, 0} - cb) <= 1e-15);
}

TEST_CASE("Tanaka rotation is applied to system A") {
  auto c = config(8.0, 8.0, 2, 1.0, 0);
  CoupledState s = make_coupled(c, {{1, 0, 0}, {0, 0, 0}});
  s.b.velocities = {{0, 1, 0}, {0, 0, 0}};
  const double z = 0.8, phi = 1.1;
  apply_coupled_event(c, s, EventDraw{0, 1, z, phi, false});
  const double psi = phi_zero({0, 1, 0}, {1, 0, 0});
  const auto [a0, a1] = collide_pair(c.kernel, {1, 0, 0}, {0, 0, 0}, z, std::fmod(phi + psi, 2 * pi), 8.0);
  CHECK(norm(s.a.velocities[0] - a0) <= 1e-14);

  c.tanaka_alignment = false;
  CoupledState u = make_coupled(c, {{1, 0, 0}, {0, 0, 0}});
  u.b.velocities = {{0, 1, 0}, {0, 0, 0}};
  apply_coupled_event(c, u, EventDraw{0, 1, z, phi, false});
  const auto [b0, b1] = collide_pair(c.kernel, {1, 0, 0}, {0, 0, 0}, z, phi, 8.0);
  CHECK(norm(u.a.velocities[0] - b0) <= 1e-14);
}

TEST_CASE("coupled distance") {
  const std::vector<Vec3> a{{1, 2, 3}, {0, 0, 1}};
  CHECK(coupled_distance(a, a) == 0.0);
  const Vec3 u{0.5, -1, 2};
  std::vector<Vec3> b = a;
  for (auto& x : b) x += u;
  CHECK(coupled_distance(a, b) == doctest::Approx(norm2(u)).epsilon(1e-15));
  CHECK_THROWS_AS(coupled_distance(a, std::vector<Vec3>{{0, 0, 0}}), DomainError);
}

TEST_CASE("coupled config validation") {
  auto c = config(8.0, 4.0, 4, 1.0, 0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config(4.0, kNoCutoff, 4, 1.0, 0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("system B marginal matches an uncoupled run") {
  const std::size_t n = 64, reps = 100;
  std::vector<double> coupled_m4, plain_m4;
  for (std::uint64_t r = 0; r < reps; ++r) {
    const auto init = gaussian(n, derive_seed(1, {r}));
    const auto cc = config(2.0, 8.0, n, 1.0, derive_seed(2, {r}));
    const auto s = run_coupled(cc, init);
    CHECK(empirical_moment(s.b, 2.0) == doctest::Approx(empirical_moment(init, 2.0)).epsilon(1e-12));
    coupled_m4.push_back(empirical_moment(s.b, 4.0));

    SimConfig sc = cc.system_b();
    sc.seed = derive_seed(3, {r});
    plain_m4.push_back(empirical_moment(run_to_horizon(sc, init), 4.0));
  }
  const double se = std::sqrt((std::pow(sample_stddev(coupled_m4), 2) + std::pow(sample_stddev(plain_m4), 2)) / reps);
  CHECK(std::abs(mean(coupled_m4) - mean(plain_m4)) <= 3 * se);
}

TEST_CASE("cutoff study edge cases") {
  CutoffStudyPlan p;
  p.kernel = KernelSpec::power_law(0.5, 0.5);
  p.n_particles = 16;
  p.k_ladder = {8.0, 8.0};
  p.horizon_t = 0.5;
  p.replicas = 3;
  const auto st = cutoff_scaling_study(p);
  for (const auto& row : st.rows) CHECK(row.h_t == 0.0);
  CHECK_FALSE(st.fit.valid);

  p.k_ladder = {8.0};
  CHECK_THROWS_AS(cutoff_scaling_study(p), ConfigError);
  p.k_ladder = {2.0, 8.0};
  p.kernel = KernelSpec::hard_sphere();
  CHECK_THROWS_AS(cutoff_scaling_study(p), ConfigError);
}

TEST_CASE("cutoff study is thread-count independent") {
  CutoffStudyPlan p;
  p.kernel = KernelSpec::power_law(0.5, 0.5);
  p.n_particles = 16;
  p.k_ladder = {1.0, 2.0, 4.0};
  p.horizon_t = 0.5;
  p.replicas = 4;
  p.seed = 9;
  const auto one = cutoff_scaling_study(p);
  p.threads = 3;
  const auto three = cutoff_scaling_study(p);
  REQUIRE(one.rows.size() == three.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].k == three.rows[i].k);
    CHECK(one.rows[i].replica == three.rows[i].replica);
    CHECK(one.rows[i].h_t == three.rows[i].h_t);
  }
}
