#include "kac/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "kac/errors.hpp"
#include "kac/parallel.hpp"

namespace kac {

void CoupledConfig::validate() const {
  if (!(cutoff_b >= cutoff_a)) throw ConfigError("coupled run needs cutoff_b >= cutoff_a");
  system_a().validate();
  system_b().validate();
  for (double t : record_times)
    if (!(t >= 0.0 && t <= horizon_t)) throw ConfigError("record time outside [0, horizon_t]");
  if (!std::is_sorted(record_times.begin(), record_times.end())) throw ConfigError("record_times must be sorted");
}

SimConfig CoupledConfig::system_a() const {
  SimConfig c;
  c.n_particles = n_particles;
  c.kernel = kernel;
  c.cutoff_k = cutoff_a;
  c.horizon_t = horizon_t;
  c.seed = seed;
  return c;
}

SimConfig CoupledConfig::system_b() const {
  SimConfig c = system_a();
  c.cutoff_k = cutoff_b;
  return c;
}

CoupledState make_coupled(const CoupledConfig& config, std::vector<Vec3> initial) {
  config.validate();
  CoupledState s;
  s.a = make_state(config.system_a(), initial);
  s.b = make_state(config.system_b(), std::move(initial));
  s.rng = Rng(config.seed);
  return s;
}

void apply_coupled_event(const CoupledConfig& config, CoupledState& state, const EventDraw& draw) {
  const std::size_t i = draw.first;
  const std::size_t j = draw.second;
  const Vec3 rel_a = state.a.velocities[i] - state.a.velocities[j];
  const Vec3 rel_b = state.b.velocities[i] - state.b.velocities[j];

  double phi_a = draw.phi;
  if (config.tanaka_alignment && draw.z <= config.cutoff_a && norm2(rel_a) > 0.0 && norm2(rel_b) > 0.0) {
    phi_a = std::fmod(draw.phi + phi_zero(rel_b, rel_a), 2.0 * std::numbers::pi);
  }

  EventDraw db = draw;
  apply_event(config.system_b(), state.b, db);
  EventDraw da = draw;
  da.phi = phi_a;
  apply_event(config.system_a(), state.a, da);
}

void coupled_step(const CoupledConfig& config, CoupledState& state) {
  const SimConfig cb = config.system_b();
  const double rate = event_rate(cb, state.b);
  state.time += state.rng.exponential(rate);
  state.a.time = state.b.time = state.time;

  // Same draw order as the uncoupled simulator: pair, z, phi.
  const std::uint64_t n = state.b.size();
  EventDraw d;
  const std::uint64_t p = state.rng.index(n);
  std::uint64_t q = state.rng.index(n - 1);
  if (q >= p) ++q;
  d.first = std::min(p, q);
  d.second = std::max(p, q);
  d.z = state.rng.uniform(0.0, z_range(cb, state.b));
  d.phi = state.rng.uniform(0.0, 2.0 * std::numbers::pi);
  apply_coupled_event(config, state, d);
}

double coupled_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size()) throw DomainError("coupled_distance: systems differ in size");
  if (a.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += norm2(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

CoupledState run_coupled(const CoupledConfig& config, std::vector<Vec3> initial) {
  CoupledState state = make_coupled(config, std::move(initial));
  std::vector<double> times = config.record_times;
  if (times.empty()) times.push_back(config.horizon_t);
  std::size_t next_rec = 0;
  auto record_until = [&](double t_next) {
    while (next_rec < times.size() && times[next_rec] < t_next)
      state.history.emplace_back(times[next_rec++], coupled_distance(state));
  };

  const SimConfig cb = config.system_b();
  const double rate = event_rate(cb, state.b);
  const double z_max = z_range(cb, state.b);
  const std::uint64_t n = state.b.size();
  for (;;) {
    const double t_next = state.time + state.rng.exponential(rate);
    if (t_next > config.horizon_t) {
      record_until(std::numeric_limits<double>::infinity());
      state.time = config.horizon_t;
      break;
    }
    record_until(t_next);
    state.time = t_next;
    EventDraw d;
    const std::uint64_t p = state.rng.index(n);
    std::uint64_t q = state.rng.index(n - 1);
    if (q >= p) ++q;
    d.first = std::min(p, q);
    d.second = std::max(p, q);
    d.z = state.rng.uniform(0.0, z_max);
    d.phi = state.rng.uniform(0.0, 2.0 * std::numbers::pi);
    apply_coupled_event(config, state, d);
  }
  state.a.time = state.b.time = state.time;
  return state;
}

CutoffStudy cutoff_scaling_study(const CutoffStudyPlan& plan) {
  if (plan.kernel.is_hard_sphere())
    throw ConfigError("cutoff scaling study needs a power-law kernel (hard spheres need no cutoff)");
  if (plan.k_ladder.size() < 2) throw ConfigError("cutoff ladder needs at least two levels");
  if (!std::is_sorted(plan.k_ladder.begin(), plan.k_ladder.end()))
    throw ConfigError("cutoff ladder must be non-decreasing");
  if (plan.replicas == 0) throw ConfigError("cutoff study needs at least one replica");
  const double k_max = plan.k_ladder.back();

  const std::size_t levels = plan.k_ladder.size();
  std::vector<double> h(levels * plan.replicas, 0.0);
  parallel_for(levels * plan.replicas, plan.threads, [&](std::size_t task) {
    const std::size_t level = task / plan.replicas;
    const std::size_t replica = task % plan.replicas;
    InitialLaw law = plan.initial;
    law.seed = derive_seed(plan.seed, {1, replica});
    CoupledConfig c;
    c.n_particles = plan.n_particles;
    c.kernel = plan.kernel;
    c.cutoff_a = plan.k_ladder[level];
    c.cutoff_b = k_max;
    c.horizon_t = plan.horizon_t;
    c.tanaka_alignment = plan.tanaka_alignment;
    // The noise depends on the replica only, so every level sees the same atoms.
    c.seed = derive_seed(plan.seed, {2, replica});
    h[task] = coupled_distance(run_coupled(c, sample_initial(law, plan.n_particles)));
  });

  CutoffStudy study;
  std::vector<double> ks, ms;
  for (std::size_t level = 0; level < levels; ++level) {
    const std::span<const double> slice(h.data() + level * plan.replicas, plan.replicas);
    for (std::size_t r = 0; r < plan.replicas; ++r) study.rows.push_back({plan.k_ladder[level], r, slice[r]});
    const double m = mean(slice);
    study.means.emplace_back(plan.k_ladder[level], m);
    if (m > 0.0) {
      ks.push_back(plan.k_ladder[level]);
      ms.push_back(m);
    }
  }
  study.fit = fit_loglog(ks, ms);

  study.strictly_decreasing = true;
  std::size_t below_max = 0;
  for (std::size_t level = 0; level < levels; ++level)
    if (plan.k_ladder[level] < k_max) ++below_max;
  for (std::size_t level = 1; level < below_max; ++level)
    if (!(study.means[level].second < study.means[level - 1].second)) study.strictly_decreasing = false;
  if (below_max == 0) study.strictly_decreasing = false;
  return study;
}

}  // namespace kac
