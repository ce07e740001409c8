#pragma once

#include <limits>
#include <utility>

#include "kac/kernel.hpp"
#include "kac/vec3.hpp"

namespace kac {

/// Direct orthonormal basis (e1, e2, e3) attached to a nonzero vector X, with
/// e1 = X/|X|. I(X) = |X| e2 and J(X) = |X| e3.
///
/// Convention: e2 is the coordinate axis least aligned with X (lowest index on
/// ties), Gram-Schmidt orthogonalized against e1; e3 = e1 x e2.
struct Frame {
  Vec3 e1;
  Vec3 e2;
  Vec3 e3;
};

Frame frame_of(const Vec3& x);

/// Gamma(X, phi) = cos(phi) I(X) + sin(phi) J(X). Orthogonal to X, |Gamma| = |X|.
Vec3 gamma_vec(const Vec3& x, double phi);

/// a(v, v*, theta, phi) = -(1 - cos theta)/2 (v - v*) + sin(theta)/2 Gamma(v - v*, phi).
/// Zero when v = v*.
Vec3 deflection_a(const Vec3& v, const Vec3& v_star, double theta, double phi);

inline constexpr double kNoCutoff = std::numeric_limits<double>::infinity();

/// c_K(v, v*, z, phi) = a(v, v*, G(z/|v - v*|^gamma), phi) 1{z <= K}.
Vec3 deflection_c(const KernelSpec& spec, const Vec3& v, const Vec3& v_star, double z, double phi,
                  double cutoff_k = kNoCutoff);

/// Binary collision driven by the atom (z, phi): particle i moves by
/// c(v_i, v_j, z, phi) and particle j by the opposite vector, so momentum and
/// energy are conserved.
std::pair<Vec3, Vec3> collide_pair(const KernelSpec& spec, const Vec3& v_i, const Vec3& v_j, double z,
                                   double phi, double cutoff_k = kNoCutoff);

/// Same update for a known deflection angle.
std::pair<Vec3, Vec3> collide_with_angle(const Vec3& v_i, const Vec3& v_j, double theta, double phi);

/// Tanaka alignment angle: the psi in [0, 2pi) minimizing
///   int_0^{2pi} |Gamma(X, phi)/|X| - Gamma(Y, phi + psi)/|Y||^2 dphi.
/// Returns 0 when every psi is a minimizer (antipodal X and Y).
double phi_zero(const Vec3& x, const Vec3& y);

}  // namespace kac
