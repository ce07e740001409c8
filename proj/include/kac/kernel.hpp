#pragma once

#include <numbers>
#include <string>

namespace kac {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

enum class KernelFamily { HardSphere, PowerLaw };

/// Collision kernel B(|v-v*|, theta) sin(theta) = |v-v*|^gamma beta(theta).
///
/// HardSphere: beta = 1 on (0, pi/2), gamma = 1.
/// PowerLaw:   beta(theta) = theta^(-1-nu), 0 < gamma < 1, 0 < nu < 1.
struct KernelSpec {
  KernelFamily family = KernelFamily::HardSphere;
  double gamma = 1.0;
  double nu = 0.0;  // PowerLaw only

  static KernelSpec hard_sphere();
  /// Throws DomainError unless 0 < gamma < 1 and 0 < nu < 1.
  static KernelSpec power_law(double gamma, double nu);

  /// Throws DomainError if the invariants of the family are violated.
  void validate() const;

  bool is_hard_sphere() const { return family == KernelFamily::HardSphere; }
  std::string describe() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Angular rate density; theta must lie in the open interval (0, pi/2).
double beta(const KernelSpec& spec, double theta);

/// H(theta) = int_theta^{pi/2} beta. Defined on (0, pi/2].
double big_h(const KernelSpec& spec, double theta);

/// H(0+): +inf for PowerLaw, pi/2 for HardSphere.
double h_at_zero_limit(const KernelSpec& spec);

/// G = H^{-1} on [0, inf]. Hard spheres give max(pi/2 - z, 0); G(+inf) = 0.
double big_g(const KernelSpec& spec, double z);

/// Deflection angle G(z / x^gamma) for relative speed x. x = 0 yields 0.
double deflection_angle(const KernelSpec& spec, double z, double relative_speed);

/// Phi_K(x) = pi int_0^K (1 - cos G(z/x^gamma)) dz, by adaptive quadrature in z.
double phi_cutoff(const KernelSpec& spec, double x, double k);

/// Psi_K(x) = pi int_K^inf (1 - cos G(z/x^gamma)) dz.
double psi_tail(const KernelSpec& spec, double x, double k);

/// pi int_0^inf (1 - cos G(z/x^gamma)) dz, evaluated in the angle variable
/// (dz = x^gamma beta(theta) dtheta). Independent of the z-quadrature route.
double phi_total(const KernelSpec& spec, double x);

/// int_0^inf (G(z/x) - G(z/y))^2 dz.
double tanaka_tail_integral(const KernelSpec& spec, double x, double y);

/// Empirical c4: 1.05 * sup over a log-grid of the ratio
/// tanaka_tail_integral(x, y) (x + y) / (x - y)^2. Memoized per spec.
double tanaka_constant(const KernelSpec& spec);

/// Whether tanaka_tail_integral(x, y) <= c4 (x - y)^2 / (x + y).
bool tanaka_tail_bound_check(const KernelSpec& spec, double x, double y);

/// A_p = int_0^{pi/2} [1 - cos^p(theta/2) - sin^p(theta/2)] beta(theta) dtheta, p > 2.
double povzner_constant(double p, const KernelSpec& spec);

/// Envelope constants with c2 (1+z)^(-1/nu) <= G(z) <= c3 (1+z)^(-1/nu) (PowerLaw only).
struct GEnvelope {
  double c2;
  double c3;
};
GEnvelope g_envelope(const KernelSpec& spec);

}  // namespace kac

#include <functional>

namespace kac {

/// int_0^{pi/2} g(theta) beta(theta) dtheta for integrands with g = O(theta^2)
/// at 0. PowerLaw integrals are taken in u = theta^(1-nu), which turns
/// beta dtheta into du / ((1-nu) theta) and removes the endpoint singularity.
/// `tolerance` is relative to the integral itself, so integrands that cancel
/// to near zero never meet it; cap `max_depth` for those.
double integrate_against_beta(const KernelSpec& spec, const std::function<double(double)>& g,
                              double tolerance = 1e-13, unsigned max_depth = 20);

}  // namespace kac
