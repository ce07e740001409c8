#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "json.hpp"
#include "kac/errors.hpp"
#include "kac/experiment.hpp"
#include "kac/geometry.hpp"
#include "kac/rng.hpp"
#include "kac/simulator.hpp"
#include "kac/transport.hpp"

namespace kac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<KernelSpec> kernels() {
  return {KernelSpec::hard_sphere(), KernelSpec::power_law(0.5, 0.5), KernelSpec::power_law(0.2, 0.8)};
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Vec3 random_vec(Rng& rng, double scale) {
  return {scale * rng.normal(), scale * rng.normal(), scale * rng.normal()};
}

std::vector<Vec3> random_cloud(Rng& rng, std::size_t n) {
  std::vector<Vec3> out(n);
  for (auto& v : out) v = random_vec(rng, 1.0);
  return out;
}

SuiteResult g_inverts_h(const ValidationHooks& hooks) {
  double worst = 0.0;
  for (const auto& spec : kernels()) {
    for (int i = 1; i <= 200; ++i) {
      const double theta = kHalfPi * i / 201.0;
      const double back = hooks.big_g(spec, big_h(spec, theta));
      worst = std::max(worst, std::abs(back - theta));
    }
  }
  return {"kernel.g_inverts_h", worst <= 1e-10, "max |G(H(theta)) - theta| = " + num(worst)};
}

SuiteResult g_shape(const ValidationHooks& hooks) {
  bool ok = true;
  std::string why;
  for (const auto& spec : kernels()) {
    if (std::abs(hooks.big_g(spec, 0.0) - kHalfPi) > 1e-12) ok = false, why = "G(0) != pi/2";
    double prev = kHalfPi;
    for (int i = 0; i <= 400; ++i) {
      const double z = std::pow(10.0, -3.0 + 9.0 * i / 400.0);
      const double g = hooks.big_g(spec, z);
      if (!(g >= 0.0 && g <= kHalfPi)) ok = false, why = "G outside [0, pi/2]";
      if (g > prev + 1e-15) ok = false, why = "G increases near z = " + num(z);
      if (!spec.is_hard_sphere()) {
        const GEnvelope env = g_envelope(spec);
        const double base = std::pow(1.0 + z, -1.0 / spec.nu);
        if (g < env.c2 * base * (1 - 1e-12) || g > env.c3 * base * (1 + 1e-12))
          ok = false, why = "envelope violated at z = " + num(z);
      }
      prev = g;
    }
  }
  return {"kernel.g_monotone_envelope", ok, ok ? "G(0) = pi/2, nonincreasing, inside envelope" : why};
}

SuiteResult phi_split() {
  double worst = 0.0;
  for (const auto& spec : kernels()) {
    for (double x : {0.3, 1.0, 4.0}) {
      for (double k : {1.0, 10.0, 100.0}) {
        const double total = phi_total(spec, x);
        const double parts = phi_cutoff(spec, x, k) + psi_tail(spec, x, k);
        worst = std::max(worst, std::abs(parts - total) / total);
      }
    }
  }
  return {"kernel.phi_plus_psi", worst <= 1e-8, "max relative gap = " + num(worst)};
}

SuiteResult povzner_positive() {
  bool ok = true;
  double smallest = INFINITY;
  for (const auto& spec : kernels()) {
    for (double p : {2.5, 3.0, 4.0, 6.0}) {
      const double a = povzner_constant(p, spec);
      smallest = std::min(smallest, a);
      ok = ok && a > 0.0 && std::isfinite(a);
    }
  }
  return {"kernel.povzner_constant_positive", ok, "min A_p = " + num(smallest)};
}

SuiteResult gamma_orthogonal(Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Vec3 x = random_vec(rng, 2.0);
    const double phi = rng.uniform(0.0, kTwoPi);
    const Vec3 g = gamma_vec(x, phi);
    const double scale = norm2(x);
    worst = std::max(worst, std::abs(dot(g, x)) / scale);
    worst = std::max(worst, std::abs(norm2(g) - scale) / scale);
  }
  return {"geometry.gamma_orthogonal", worst <= 1e-12, "max defect = " + num(worst)};
}

SuiteResult collide_conserves(Rng& rng, const ValidationHooks& hooks) {
  double worst_p = 0.0, worst_e = 0.0, worst_norm = 0.0;
  for (const auto& spec : kernels()) {
    for (int i = 0; i < 300; ++i) {
      const Vec3 v = random_vec(rng, 1.5);
      const Vec3 w = random_vec(rng, 1.5);
      const double z = rng.exponential(0.5);
      const double phi = rng.uniform(0.0, kTwoPi);
      const auto [v2, w2] = hooks.collide(spec, v, w, z, phi, kNoCutoff);
      const double e = norm2(v) + norm2(w);
      worst_p = std::max(worst_p, norm((v2 + w2) - (v + w)) / std::sqrt(e));
      worst_e = std::max(worst_e, std::abs(norm2(v2) + norm2(w2) - e) / e);
      const double theta = deflection_angle(spec, z, norm(v - w));
      const double s = std::sin(0.5 * theta);
      worst_norm = std::max(worst_norm, std::abs(norm2(v2 - v) - s * s * norm2(v - w)) / e);
    }
  }
  const bool ok = worst_p <= 1e-12 && worst_e <= 1e-12 && worst_norm <= 1e-12;
  return {"geometry.collision_conservation", ok,
          "momentum " + num(worst_p) + ", energy " + num(worst_e) + ", |c|^2 law " + num(worst_norm)};
}

SuiteResult povzner_holds(Rng& rng) {
  int failures = 0, trials = 0;
  for (const auto& spec : {KernelSpec::hard_sphere(), KernelSpec::power_law(0.5, 0.5)}) {
    for (int i = 0; i < 20; ++i) {
      const Vec3 v = random_vec(rng, 1.0 + 2.0 * rng.uniform());
      const Vec3 w = random_vec(rng, 1.0);
      ++trials;
      if (!povzner_audit(spec, v, w, 4.0).holds) ++failures;
    }
  }
  return {"simulator.povzner_pointwise", failures == 0,
          std::to_string(failures) + " of " + std::to_string(trials) + " pairs violate the bound"};
}

double brute_force_w2(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  std::vector<std::size_t> perm(a.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += norm2(a[i] - b[perm[i]]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(a.size());
}

SuiteResult w2_brute_force(Rng& rng) {
  double worst = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = random_cloud(rng, n);
      const auto b = random_cloud(rng, n);
      const double exact = w2_squared_exact(EmpiricalMeasure(a), EmpiricalMeasure(b));
      worst = std::max(worst, std::abs(exact - brute_force_w2(a, b)));
    }
  }
  return {"transport.w2_matches_permutation_search", worst <= 1e-12, "max gap = " + num(worst)};
}

SuiteResult metric_axioms(Rng& rng) {
  bool ok = true;
  std::string why = "identity, symmetry and triangle inequality hold";
  for (int rep = 0; rep < 10; ++rep) {
    const EmpiricalMeasure a(random_cloud(rng, 24)), b(random_cloud(rng, 24)), c(random_cloud(rng, 24));
    const double ab = w2_squared_exact(a, b), ba = w2_squared_exact(b, a);
    const double bc = w2_squared_exact(b, c), ac = w2_squared_exact(a, c);
    if (w2_squared_exact(a, a) != 0.0) ok = false, why = "W2(a, a) != 0";
    if (std::abs(ab - ba) > 1e-12 * (1 + ab)) ok = false, why = "asymmetric";
    if (std::sqrt(ac) > std::sqrt(ab) + std::sqrt(bc) + 1e-12) ok = false, why = "triangle inequality fails";
  }
  return {"transport.metric_axioms", ok, why};
}

SuiteResult convexity(Rng& rng) {
  bool ok = true;
  double margin = INFINITY;
  for (std::size_t nf : {4, 8, 12}) {
    const EmpiricalMeasure f(random_cloud(rng, nf)), fp(random_cloud(rng, nf));
    const EmpiricalMeasure g(random_cloud(rng, 16 - nf)), gp(random_cloud(rng, 16 - nf));
    const ConvexityCheck chk = mixture_convexity_check(f, fp, g, gp);
    ok = ok && chk.holds;
    margin = std::min(margin, chk.rhs - chk.lhs);
  }
  return {"transport.mixture_convexity", ok, "min rhs - lhs = " + num(margin)};
}

SuiteResult simulator_conservation(std::uint64_t seed) {
  double worst_p = 0.0, worst_e = 0.0;
  std::uint64_t events = 0;
  for (const auto& spec : kernels()) {
    SimConfig c;
    c.n_particles = 64;
    c.kernel = spec;
    c.cutoff_k = spec.is_hard_sphere() ? kNoCutoff : 20.0;
    c.horizon_t = 2.0;
    c.seed = derive_seed(seed, {7});
    InitialLaw law;
    law.seed = derive_seed(seed, {8});
    const ParticleState s = run_to_horizon(c, sample_initial(law, c.n_particles));
    const auto d = conservation_drift(s);
    worst_p = std::max(worst_p, d.momentum / std::sqrt(s.total_energy));
    worst_e = std::max(worst_e, d.relative_energy);
    events += s.event_count;
  }
  const bool ok = worst_p <= 1e-11 && worst_e <= 1e-11 && events > 0;
  return {"simulator.conservation", ok,
          std::to_string(events) + " events, momentum " + num(worst_p) + ", energy " + num(worst_e)};
}

}  // namespace

bool ValidationReport::all_passed() const {
  return !suites.empty() && std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

std::string ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["passed"] = all_passed();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : suites) arr.push_back({{"name", s.name}, {"passed", s.passed}, {"detail", s.detail}});
  j["suites"] = arr;
  return j.dump(2) + "\n";
}

ValidationReport run_validation_suite(std::uint64_t seed, const ValidationHooks& hooks) {
  ValidationReport report;
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      report.suites.push_back(body());
    } catch (const std::exception& e) {
      report.suites.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  Rng rng(derive_seed(seed, {0x76616c}));
  guarded("kernel.g_inverts_h", [&] { return g_inverts_h(hooks); });
  guarded("kernel.g_monotone_envelope", [&] { return g_shape(hooks); });
  guarded("kernel.phi_plus_psi", [&] { return phi_split(); });
  guarded("kernel.povzner_constant_positive", [&] { return povzner_positive(); });
  guarded("geometry.gamma_orthogonal", [&] { return gamma_orthogonal(rng); });
  guarded("geometry.collision_conservation", [&] { return collide_conserves(rng, hooks); });
  guarded("simulator.povzner_pointwise", [&] { return povzner_holds(rng); });
  guarded("transport.w2_matches_permutation_search", [&] { return w2_brute_force(rng); });
  guarded("transport.metric_axioms", [&] { return metric_axioms(rng); });
  guarded("transport.mixture_convexity", [&] { return convexity(rng); });
  guarded("simulator.conservation", [&] { return simulator_conservation(seed); });
  return report;
}

}  // namespace kac
