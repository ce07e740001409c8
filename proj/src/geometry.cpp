#include "kac/geometry.hpp"

#include <cmath>
#include <numbers>

#include "kac/errors.hpp"

namespace kac {

Frame frame_of(const Vec3& x) {
  const double len = norm(x);
  if (!(len > 0.0)) throw DomainError("frame_of: zero vector has no frame");
  const Vec3 e1 = (1.0 / len) * x;

  const double ax = std::abs(e1.x);
  const double ay = std::abs(e1.y);
  const double az = std::abs(e1.z);
  Vec3 axis{1.0, 0.0, 0.0};
  if (ay < ax && ay <= az) {
    axis = {0.0, 1.0, 0.0};
  } else if (az < ax && az < ay) {
    axis = {0.0, 0.0, 1.0};
  }
  Vec3 e2 = axis - dot(axis, e1) * e1;
  e2 *= 1.0 / norm(e2);
  return {e1, e2, cross(e1, e2)};
}

Vec3 gamma_vec(const Vec3& x, double phi) {
  const Frame f = frame_of(x);
  const double len = norm(x);
  return (len * std::cos(phi)) * f.e2 + (len * std::sin(phi)) * f.e3;
}

Vec3 deflection_a(const Vec3& v, const Vec3& v_star, double theta, double phi) {
  const Vec3 rel = v - v_star;
  if (rel == Vec3{} || theta == 0.0) return {};
  const double s = std::sin(0.5 * theta);
  const double one_minus_cos = 2.0 * s * s;
  return (-0.5 * one_minus_cos) * rel + (0.5 * std::sin(theta)) * gamma_vec(rel, phi);
}

Vec3 deflection_c(const KernelSpec& spec, const Vec3& v, const Vec3& v_star, double z, double phi,
                  double cutoff_k) {
  if (!(z >= 0.0)) throw DomainError("deflection_c: z must be nonnegative");
  if (z > cutoff_k) return {};
  const double theta = deflection_angle(spec, z, norm(v - v_star));
  return deflection_a(v, v_star, theta, phi);
}

std::pair<Vec3, Vec3> collide_with_angle(const Vec3& v_i, const Vec3& v_j, double theta, double phi) {
  const Vec3 a = deflection_a(v_i, v_j, theta, phi);
  return {v_i + a, v_j - a};
}

std::pair<Vec3, Vec3> collide_pair(const KernelSpec& spec, const Vec3& v_i, const Vec3& v_j, double z,
                                   double phi, double cutoff_k) {
  const Vec3 a = deflection_c(spec, v_i, v_j, z, phi, cutoff_k);
  return {v_i + a, v_j - a};
}

double phi_zero(const Vec3& x, const Vec3& y) {
  const Frame fx = frame_of(x);
  const Frame fy = frame_of(y);
  // The functional equals 4 pi - 2 pi (C cos psi + S sin psi).
  const double c = dot(fx.e2, fy.e2) + dot(fx.e3, fy.e3);
  const double s = dot(fx.e2, fy.e3) - dot(fx.e3, fy.e2);
  if (std::hypot(c, s) <= 1e-12) return 0.0;
  double psi = std::atan2(s, c);
  if (psi < 0.0) psi += 2.0 * std::numbers::pi;
  if (psi >= 2.0 * std::numbers::pi) psi = 0.0;
  return psi;
}

}  // namespace kac
