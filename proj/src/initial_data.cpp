#include "kac/initial_data.hpp"

#include <cmath>
#include <sstream>

#include "kac/errors.hpp"
#include "kac/rng.hpp"

namespace kac {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void InitialLaw::validate() const {
  std::visit(overloaded{
                 [](const IsotropicGaussian& g) {
                   if (!(g.energy_per_particle > 0.0 && std::isfinite(g.energy_per_particle)))
                     throw ConfigError("gaussian initial law needs a positive finite energy");
                 },
                 [](const UniformBall& b) {
                   if (!(b.radius > 0.0 && std::isfinite(b.radius)))
                     throw ConfigError("uniform ball initial law needs a positive finite radius");
                 },
                 [](const TwoPointMixture& m) {
                   if (m.u1 == m.u2) throw ConfigError("two-point initial law is a Dirac mass (u1 == u2)");
                   if (!(m.weight > 0.0 && m.weight < 1.0))
                     throw ConfigError("two-point initial law needs a weight in (0, 1)");
                   if (!is_finite(m.u1) || !is_finite(m.u2))
                     throw ConfigError("two-point initial law has non-finite atoms");
                 },
             },
             kind);
}

std::string InitialLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const IsotropicGaussian& g) { os << "gaussian(energy=" << g.energy_per_particle << ")"; },
                 [&](const UniformBall& b) { os << "uniform_ball(radius=" << b.radius << ")"; },
                 [&](const TwoPointMixture& m) {
                   os << "two_point(u1=" << m.u1.x << ":" << m.u1.y << ":" << m.u1.z << ",u2=" << m.u2.x << ":"
                      << m.u2.y << ":" << m.u2.z << ",weight=" << m.weight << ")";
                 },
             },
             kind);
  return os.str();
}

std::vector<Vec3> sample_initial(const InitialLaw& law, std::size_t n) {
  if (n < 2) throw ConfigError("sample_initial: need at least two particles");
  law.validate();
  Rng rng(law.seed);
  std::vector<Vec3> out;
  out.reserve(n);
  std::visit(overloaded{
                 [&](const IsotropicGaussian& g) {
                   const double sigma = std::sqrt(g.energy_per_particle / 3.0);
                   for (std::size_t i = 0; i < n; ++i) {
                     const double vx = rng.normal();
                     const double vy = rng.normal();
                     const double vz = rng.normal();
                     out.push_back(sigma * Vec3{vx, vy, vz});
                   }
                 },
                 [&](const UniformBall& b) {
                   for (std::size_t i = 0; i < n; ++i) {
                     Vec3 p;
                     do {
                       const double px = rng.uniform(-1.0, 1.0);
                       const double py = rng.uniform(-1.0, 1.0);
                       const double pz = rng.uniform(-1.0, 1.0);
                       p = {px, py, pz};
                     } while (norm2(p) > 1.0);
                     out.push_back(b.radius * p);
                   }
                 },
                 [&](const TwoPointMixture& m) {
                   for (std::size_t i = 0; i < n; ++i) out.push_back(rng.uniform() < m.weight ? m.u1 : m.u2);
                 },
             },
             law.kind);
  return out;
}

std::vector<Vec3> normalize_ensemble(std::span<const Vec3> velocities) {
  const std::size_t n = velocities.size();
  if (n < 2) throw ConfigError("normalize_ensemble: need at least two particles");
  Vec3 mean;
  for (const Vec3& v : velocities) mean += v;
  mean *= 1.0 / static_cast<double>(n);
  double energy = 0.0;
  for (const Vec3& v : velocities) energy += norm2(v - mean);
  energy /= static_cast<double>(n);
  if (!(energy > 0.0)) throw ConfigError("normalize_ensemble: all velocities equal (Dirac mass)");
  const double scale = 1.0 / std::sqrt(energy);
  std::vector<Vec3> out;
  out.reserve(n);
  for (const Vec3& v : velocities) out.push_back(scale * (v - mean));
  return out;
}

}  // namespace kac
