#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kac/errors.hpp"
#include "kac/geometry.hpp"
#include "kac/rng.hpp"
#include "oracles.hpp"

using namespace kac;
using std::numbers::pi;

namespace {

Vec3 rand_vec(Rng& rng, double s = 1.0) { return {s * rng.normal(), s * rng.normal(), s * rng.normal()}; }

bool close(const Vec3& a, const Vec3& b, double tol) { return norm(a - b) <= tol; }

// Transverse mismatch functional; exact for trig polynomials with 256 nodes.
double mismatch(const Vec3& x, const Vec3& y, double psi) {
  constexpr int n = 256;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double phi = 2 * pi * k / n;
    s += norm2((1.0 / norm(x)) * gamma_vec(x, phi) - (1.0 / norm(y)) * gamma_vec(y, phi + psi));
  }
  return 2 * pi * s / n;
}

double grid_argmin(const Vec3& x, const Vec3& y, int points, double* best_value) {
  double best = INFINITY, arg = 0.0;
  for (int k = 0; k < points; ++k) {
    const double psi = 2 * pi * k / points;
    const double f = mismatch(x, y, psi);
    if (f < best) best = f, arg = psi;
  }
  *best_value = best;
  return arg;
}

// Rotation about axis u by angle t (Rodrigues).
Vec3 rotate(const Vec3& v, const Vec3& axis, double t) {
  const Vec3 u = (1.0 / norm(axis)) * axis;
  return std::cos(t) * v + std::sin(t) * cross(u, v) + ((1 - std::cos(t)) * dot(u, v)) * u;
}

}  // namespace

TEST_CASE("frame convention") {
  const Frame f = frame_of({2, 0, 0});
  CHECK(f.e1 == Vec3{1, 0, 0});
  CHECK(f.e2 == Vec3{0, 1, 0});
  CHECK(f.e3 == Vec3{0, 0, 1});

  const Frame g = frame_of({0, 0, 5});
  CHECK(g.e1 == Vec3{0, 0, 1});
  CHECK(std::abs(dot(g.e2, g.e3)) <= 1e-15);
  CHECK(close(cross(g.e2, g.e3), g.e1, 1e-15));

  Rng rng(3);
  for (const Vec3 x : {Vec3{1, 1, 1}, rand_vec(rng), rand_vec(rng), Vec3{-1e-8, 3, 0}}) {
    const Frame h = frame_of(x);
    for (const Vec3& e : {h.e1, h.e2, h.e3}) CHECK(std::abs(norm(e) - 1.0) <= 1e-14);
    CHECK(std::abs(dot(h.e1, h.e2)) <= 1e-14);
    CHECK(std::abs(dot(h.e1, h.e3)) <= 1e-14);
    CHECK(std::abs(dot(h.e2, h.e3)) <= 1e-14);
    CHECK(dot(cross(h.e1, h.e2), h.e3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(close(h.e1, (1.0 / norm(x)) * x, 1e-15));
  }
  CHECK_THROWS_AS(frame_of({0, 0, 0}), DomainError);
}

TEST_CASE("gamma vector") {
  CHECK(close(gamma_vec({2, 0, 0}, 0.0), {0, 2, 0}, 1e-15));
  CHECK(close(gamma_vec({2, 0, 0}, pi / 2), {0, 0, 2}, 1e-15));
  CHECK_THROWS_AS(gamma_vec({0, 0, 0}, 1.0), DomainError);

  Rng rng(5);
  for (int rep = 0; rep < 1000; ++rep) {
    const Vec3 x = rand_vec(rng, 3.0);
    const Vec3 g = gamma_vec(x, rng.uniform(0, 2 * pi));
    CHECK(std::abs(dot(g, x)) <= 1e-13 * norm2(x));
    CHECK(std::abs(norm(g) - norm(x)) <= 1e-13 * norm(x));
  }
  for (int rep = 0; rep < 20; ++rep) {
    const Vec3 x = rand_vec(rng, 2.0);
    for (int n : {3, 7, 64}) {
      Vec3 sum;
      for (int k = 0; k < n; ++k) sum += gamma_vec(x, 2 * pi * k / n);
      CHECK(norm((1.0 / n) * sum) <= 1e-12 * norm(x));
    }
  }
}

TEST_CASE("deflection vector a") {
  CHECK(deflection_a({1, 2, 3}, {0, 1, 0}, 0.0, 1.0) == Vec3{});
  CHECK(deflection_a({1, 2, 3}, {1, 2, 3}, 1.0, 1.0) == Vec3{});
  const Vec3 a = deflection_a({1, 0, 0}, {-1, 0, 0}, pi / 2, 0.0);
  CHECK(close(a, {-1, 1, 0}, 1e-15));
  CHECK(norm(a) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  Rng rng(11);
  double worst = 0.0;
  for (int rep = 0; rep < 100000; ++rep) {
    const Vec3 v = rand_vec(rng), w = rand_vec(rng);
    const double theta = rng.uniform(0, pi / 2);
    const double x = norm(v - w);
    const Vec3 c = deflection_a(v, w, theta, rng.uniform(0, 2 * pi));
    // sqrt((1 - cos t) / 2) written as sin(t / 2) to avoid cancellation.
    worst = std::max(worst, std::abs(norm(c) - std::sin(theta / 2) * x) / x);
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("deflection c with cutoff") {
  const auto hs = KernelSpec::hard_sphere();
  const auto pl = KernelSpec::power_law(0.5, 0.5);
  CHECK(deflection_c(pl, {1, 0, 0}, {0, 0, 0}, 3.0, 0.5, 2.0) == Vec3{});
  CHECK(deflection_c(hs, {1, 0, 0}, {0, 0, 0}, pi / 2, 0.5) == Vec3{});
  CHECK(deflection_c(hs, {1, 0, 0}, {0, 0, 0}, 2.0, 0.5, kNoCutoff) == Vec3{});
  CHECK_THROWS_AS(deflection_c(hs, {1, 0, 0}, {0, 0, 0}, -1.0, 0.5), DomainError);

  // theta = G(1) from the closed form, then a by hand in the frame of (1,0,0).
  const double theta = oracle::g_power(0.5, 1.0);
  const Vec3 expected{-(1 - std::cos(theta)) / 2, std::sin(theta) / 2, 0.0};
  CHECK(close(deflection_c(pl, {1, 0, 0}, {0, 0, 0}, 1.0, 0.0, 4.0), expected, 1e-15));
  // Relative speed enters through z / x^gamma.
  const double theta4 = oracle::g_power(0.5, 1.0 / 2.0);
  const Vec3 expected4 = 4.0 * Vec3{-(1 - std::cos(theta4)) / 2, 0.0, std::sin(theta4) / 2};
  CHECK(close(deflection_c(pl, {4, 0, 0}, {0, 0, 0}, 1.0, pi / 2, 4.0), expected4, 1e-14));
}

TEST_CASE("collide_pair") {
  const auto hs = KernelSpec::hard_sphere();
  const auto [p, q] = collide_pair(hs, {1, 0, 0}, {-1, 0, 0}, 0.0, 0.0);
  CHECK(close(p, {0, 1, 0}, 1e-15));
  CHECK(close(q, {0, -1, 0}, 1e-15));
  CHECK(norm2(p) + norm2(q) == doctest::Approx(2.0).epsilon(1e-15));

  const auto [r, s] = collide_pair(hs, {1, 2, 3}, {1, 2, 3}, 0.1, 1.0);
  CHECK(r == Vec3{1, 2, 3});
  CHECK(s == Vec3{1, 2, 3});

  Rng rng(17);
  double worst_p = 0.0, worst_e = 0.0;
  for (const auto& spec : {hs, KernelSpec::power_law(0.5, 0.5)}) {
    for (int rep = 0; rep < 100000; ++rep) {
      const Vec3 v = rand_vec(rng), w = rand_vec(rng);
      const double z = rng.uniform(0, 3.0);
      const auto [v2, w2] = collide_pair(spec, v, w, z, rng.uniform(0, 2 * pi), 8.0);
      const double scale = std::sqrt(norm2(v) + norm2(w));
      const double e = norm2(v) + norm2(w);
      worst_p = std::max(worst_p, norm(v2 + w2 - v - w) / scale);
      worst_e = std::max(worst_e, std::abs(norm2(v2) + norm2(w2) - e) / e);
    }
  }
  CHECK(worst_p <= 1e-14);
  CHECK(worst_e <= 1e-13);
}

TEST_CASE("collide_pair is rotation covariant up to an azimuth shift") {
  const auto spec = KernelSpec::power_law(0.5, 0.5);
  Rng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    const Vec3 v = rand_vec(rng), w = rand_vec(rng);
    const Vec3 axis = rand_vec(rng);
    const double t = rng.uniform(0, 2 * pi);
    const double z = rng.uniform(0, 2.0);
    const double phi = rng.uniform(0, 2 * pi);

    const auto [vr, wr] = collide_pair(spec, rotate(v, axis, t), rotate(w, axis, t), z, phi, 8.0);
    const Vec3 u = rotate(vr, axis, -t);
    const Vec3 u_star = rotate(wr, axis, -t);

    // Recover the azimuth of the back-rotated outcome in the original frame.
    const Vec3 x = v - w;
    const Frame f = frame_of(x);
    const double theta = oracle::g_power(0.5, z / std::pow(norm(x), 0.5));
    const Vec3 transverse = (u - v) + (std::sin(theta / 2) * std::sin(theta / 2)) * x;
    const double phi_prime = std::atan2(dot(transverse, f.e3), dot(transverse, f.e2));
    const auto [p, q] = collide_pair(spec, v, w, z, phi_prime, 8.0);
    CHECK(close(p, u, 1e-10));
    CHECK(close(q, u_star, 1e-10));
  }
}

TEST_CASE("phi_zero minimizes the transverse mismatch") {
  CHECK(phi_zero({1, 2, 3}, {2, 4, 6}) == 0.0);
  CHECK(phi_zero({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(phi_zero({1, 0, 0}, {-3, 0, 0}) == 0.0);
  CHECK_THROWS_AS(phi_zero({0, 0, 0}, {1, 0, 0}), DomainError);
  CHECK_THROWS_AS(phi_zero({1, 0, 0}, {0, 0, 0}), DomainError);

  constexpr int grid = 10000;
  const double step = 2 * pi / grid;
  double best = 0.0;
  const double arg = grid_argmin({1, 0, 0}, {0, 1, 0}, grid, &best);
  const double psi = phi_zero({1, 0, 0}, {0, 1, 0});
  const double gap = std::abs(std::remainder(psi - arg, 2 * pi));
  CHECK(gap <= step);
  CHECK(mismatch({1, 0, 0}, {0, 1, 0}, psi) <= best + 1e-12);

  Rng rng(29);
  for (int rep = 0; rep < 30; ++rep) {
    const Vec3 x = rand_vec(rng), y = rand_vec(rng);
    const double p0 = phi_zero(x, y);
    CHECK(p0 >= 0.0);
    CHECK(p0 < 2 * pi);
    double b = 0.0;
    grid_argmin(x, y, 2000, &b);
    CHECK(mismatch(x, y, p0) <= b + 1e-12);
    CHECK(std::abs(std::remainder(phi_zero(3.5 * x, 0.2 * y) - p0, 2 * pi)) <= 1e-12);
  }
}
