#include "kac/kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "kac/errors.hpp"

namespace kac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-13;
constexpr unsigned kQuadDepth = 20;

template <class F>
double gk_integrate(F&& f, double a, double b, double tol = kQuadTol, unsigned depth = kQuadDepth) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(b > a)) return 0.0;
  if (std::isinf(b)) return gauss_kronrod<double, 31>::integrate(std::forward<F>(f), a, b, depth, tol);
  // Boost misjudges the error on short raw intervals and recurses to full
  // depth; integrating over [0, 1] avoids it.
  const double width = b - a;
  auto unit = [&](double t) { return f(a + width * t); };
  return width * gauss_kronrod<double, 31>::integrate(unit, 0.0, 1.0, depth, tol);
}

// 1 - cos(theta), accurate for small theta.
double one_minus_cos(double theta) {
  const double s = std::sin(0.5 * theta);
  return 2.0 * s * s;
}

}  // namespace

KernelSpec KernelSpec::hard_sphere() { return KernelSpec{KernelFamily::HardSphere, 1.0, 0.0}; }

KernelSpec KernelSpec::power_law(double gamma, double nu) {
  KernelSpec s{KernelFamily::PowerLaw, gamma, nu};
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (family == KernelFamily::HardSphere) {
    if (gamma != 1.0) throw DomainError("hard-sphere kernel requires gamma = 1");
    return;
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("power-law kernel requires 0 < gamma < 1");
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("power-law kernel requires 0 < nu < 1");
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  if (is_hard_sphere()) {
    os << "hard_sphere(gamma=1)";
  } else {
    os << "power_law(gamma=" << gamma << ",nu=" << nu << ")";
  }
  return os.str();
}

double beta(const KernelSpec& spec, double theta) {
  if (!(theta > 0.0 && theta < kHalfPi)) throw DomainError("beta: theta must lie in (0, pi/2)");
  if (spec.is_hard_sphere()) return 1.0;
  return std::pow(theta, -1.0 - spec.nu);
}

double big_h(const KernelSpec& spec, double theta) {
  if (!(theta > 0.0 && theta <= kHalfPi)) throw DomainError("big_h: theta must lie in (0, pi/2]");
  if (spec.is_hard_sphere()) return kHalfPi - theta;
  if (theta == kHalfPi) return 0.0;
  return (std::pow(theta, -spec.nu) - std::pow(kHalfPi, -spec.nu)) / spec.nu;
}

double h_at_zero_limit(const KernelSpec& spec) { return spec.is_hard_sphere() ? kHalfPi : kInf; }

double big_g(const KernelSpec& spec, double z) {
  if (!(z >= 0.0)) throw DomainError("big_g: z must be nonnegative");
  if (spec.is_hard_sphere()) return std::max(kHalfPi - z, 0.0);
  if (z == kInf) return 0.0;
  return std::pow(spec.nu * z + std::pow(kHalfPi, -spec.nu), -1.0 / spec.nu);
}

double deflection_angle(const KernelSpec& spec, double z, double relative_speed) {
  if (!(relative_speed > 0.0)) return 0.0;
  const double scale = spec.is_hard_sphere() ? relative_speed : std::pow(relative_speed, spec.gamma);
  return big_g(spec, z / scale);
}

double phi_cutoff(const KernelSpec& spec, double x, double k) {
  if (!(x >= 0.0)) throw DomainError("phi_cutoff: x must be nonnegative");
  if (!(k >= 1.0)) throw DomainError("phi_cutoff: cutoff level must be >= 1");
  if (x == 0.0) return 0.0;
  auto integrand = [&](double z) { return one_minus_cos(deflection_angle(spec, z, x)); };
  double upper = k;
  if (spec.is_hard_sphere()) upper = std::min(k, kHalfPi * x);  // G vanishes beyond
  return std::numbers::pi * gk_integrate(integrand, 0.0, upper);
}

double psi_tail(const KernelSpec& spec, double x, double k) {
  if (!(x >= 0.0)) throw DomainError("psi_tail: x must be nonnegative");
  if (!(k >= 1.0)) throw DomainError("psi_tail: cutoff level must be >= 1");
  if (x == 0.0 || k == kInf) return 0.0;
  auto integrand = [&](double z) { return one_minus_cos(deflection_angle(spec, z, x)); };
  if (spec.is_hard_sphere()) return std::numbers::pi * gk_integrate(integrand, k, kHalfPi * x);
  return std::numbers::pi * gk_integrate(integrand, k, kInf);
}

double integrate_against_beta(const KernelSpec& spec, const std::function<double(double)>& g, double tolerance,
                              unsigned max_depth) {
  if (spec.is_hard_sphere()) return gk_integrate(g, 0.0, kHalfPi, tolerance, max_depth);
  const double q = 1.0 - spec.nu;
  const double inv_q = 1.0 / q;
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double theta = std::pow(u, inv_q);
    return g(theta) / (q * theta);
  };
  return gk_integrate(integrand, 0.0, std::pow(kHalfPi, q), tolerance, max_depth);
}

double phi_total(const KernelSpec& spec, double x) {
  if (!(x >= 0.0)) throw DomainError("phi_total: x must be nonnegative");
  if (x == 0.0) return 0.0;
  const double scale = spec.is_hard_sphere() ? x : std::pow(x, spec.gamma);
  return std::numbers::pi * scale * integrate_against_beta(spec, one_minus_cos);
}

double tanaka_tail_integral(const KernelSpec& spec, double x, double y) {
  if (!(x > 0.0 && y > 0.0)) throw DomainError("tanaka_tail_integral: speeds must be positive");
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  const double gap = 1.0 / lo - 1.0 / hi;
  // G(z/hi) - G(z/lo) >= 0, written without subtracting nearly equal values.
  std::function<double(double)> integrand;
  if (spec.is_hard_sphere()) {
    integrand = [=](double z) {
      const double d = z < kHalfPi * lo ? z * gap : kHalfPi - z / hi;
      return d > 0.0 ? d * d : 0.0;
    };
    return gk_integrate(integrand, 0.0, kHalfPi * lo) + gk_integrate(integrand, kHalfPi * lo, kHalfPi * hi);
  }
  const double nu = spec.nu;
  const double c = std::pow(kHalfPi, -nu);
  integrand = [=](double z) {
    const double a = nu * z / hi + c;
    const double d = -std::pow(a, -1.0 / nu) * std::expm1(-std::log1p(nu * z * gap / a) / nu);
    return d * d;
  };
  return gk_integrate(integrand, 0.0, lo) + gk_integrate(integrand, lo, hi) + gk_integrate(integrand, hi, kInf);
}

double tanaka_constant(const KernelSpec& spec) {
  spec.validate();
  static std::mutex mu;
  static std::map<std::pair<int, double>, double> cache;
  const std::pair<int, double> key{static_cast<int>(spec.family), spec.nu};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // The ratio depends only on r = y/x and is symmetric under r -> 1/r.
  double sup = 0.0;
  constexpr int kPoints = 241;
  for (int i = 0; i < kPoints; ++i) {
    const double r = std::pow(10.0, -3.0 + 6.0 * i / (kPoints - 1));
    if (std::abs(r - 1.0) < 1e-3) continue;
    const double ratio = tanaka_tail_integral(spec, 1.0, r) * (1.0 + r) / ((1.0 - r) * (1.0 - r));
    sup = std::max(sup, ratio);
  }
  const double c4 = 1.05 * sup;
  std::lock_guard lock(mu);
  cache.emplace(key, c4);
  return c4;
}

bool tanaka_tail_bound_check(const KernelSpec& spec, double x, double y) {
  if (!(x > 0.0 && y > 0.0)) throw DomainError("tanaka_tail_bound_check: speeds must be positive");
  const double lhs = tanaka_tail_integral(spec, x, y);
  const double rhs = tanaka_constant(spec) * (x - y) * (x - y) / (x + y);
  return lhs <= rhs;
}

double povzner_constant(double p, const KernelSpec& spec) {
  if (!(p > 2.0)) throw DomainError("povzner_constant: order must exceed 2");
  auto kappa = [p](double theta) {
    // cos(theta/2) = 1 - 2 sin^2(theta/4); keeps 1 - cos^p accurate near 0.
    const double s = std::sin(0.25 * theta);
    const double one_minus_cos_p = -std::expm1(p * std::log1p(-2.0 * s * s));
    return one_minus_cos_p - std::pow(std::sin(0.5 * theta), p);
  };
  return integrate_against_beta(spec, kappa);
}

GEnvelope g_envelope(const KernelSpec& spec) {
  if (spec.is_hard_sphere()) throw DomainError("g_envelope: defined for power-law kernels only");
  spec.validate();
  // G(z)(1+z)^{1/nu} = ((1+z)/(nu z + (pi/2)^{-nu}))^{1/nu} is monotone in z,
  // running from pi/2 at z = 0 to nu^{-1/nu} as z -> inf.
  const double at_zero = kHalfPi;
  const double at_inf = std::pow(spec.nu, -1.0 / spec.nu);
  return {std::min(at_zero, at_inf), std::max(at_zero, at_inf)};
}

}  // namespace kac
