#include "kac/simulator.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "kac/errors.hpp"

namespace kac {

void SimConfig::validate() const {
  if (n_particles < 2) throw ConfigError("simulation needs at least two particles");
  try {
    kernel.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(cutoff_k >= 1.0)) throw ConfigError("cutoff_k must be >= 1");
  if (!kernel.is_hard_sphere() && !std::isfinite(cutoff_k))
    throw ConfigError("power-law kernels need a finite cutoff_k (infinite event rate otherwise)");
  if (!(horizon_t >= 0.0 && std::isfinite(horizon_t))) throw ConfigError("horizon_t must be finite and >= 0");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw ConfigError("snapshot_times must be sorted");
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t <= horizon_t)) throw ConfigError("snapshot time outside [0, horizon_t]");
}

ParticleState make_state(const SimConfig& config, std::vector<Vec3> velocities) {
  config.validate();
  if (velocities.size() != config.n_particles)
    throw ConfigError("initial velocity count does not match n_particles");
  ParticleState s;
  s.velocities = std::move(velocities);
  for (const Vec3& v : s.velocities) {
    if (!is_finite(v)) throw ConfigError("initial velocities must be finite");
    s.total_momentum += v;
    s.total_energy += norm2(v);
  }
  s.rng = Rng(config.seed);
  return s;
}

double z_range(const SimConfig& config, const ParticleState& state) {
  if (!config.kernel.is_hard_sphere()) return config.cutoff_k;
  // |v_i - v_j|^2 <= 2 (|v_i|^2 + |v_j|^2) <= 2 sum_k |v_k|^2, which is conserved.
  const double x_max = std::sqrt(2.0 * state.total_energy);
  return std::min(config.cutoff_k, kHalfPi * x_max);
}

double event_rate(const SimConfig& config, const ParticleState& state) {
  // Each unordered pair carries intensity 2 pi z_range / (N - 1).
  return std::numbers::pi * static_cast<double>(state.size()) * z_range(config, state);
}

EventDraw draw_event(const SimConfig& config, ParticleState& state) {
  const std::uint64_t n = state.size();
  EventDraw d;
  const std::uint64_t a = state.rng.index(n);
  std::uint64_t b = state.rng.index(n - 1);
  if (b >= a) ++b;
  d.first = std::min(a, b);
  d.second = std::max(a, b);
  d.z = state.rng.uniform(0.0, z_range(config, state));
  d.phi = state.rng.uniform(0.0, 2.0 * std::numbers::pi);
  return d;
}

bool apply_event(const SimConfig& config, ParticleState& state, EventDraw& draw) {
  ++state.proposal_count;
  draw.accepted = false;
  if (draw.z > config.cutoff_k) return false;
  Vec3& vi = state.velocities[draw.first];
  Vec3& vj = state.velocities[draw.second];
  const double theta = deflection_angle(config.kernel, draw.z, norm(vi - vj));
  if (theta == 0.0) return false;
  std::tie(vi, vj) = collide_with_angle(vi, vj, theta, draw.phi);
  ++state.event_count;
  draw.accepted = true;
  return true;
}

void step(const SimConfig& config, ParticleState& state) {
  state.time += state.rng.exponential(event_rate(config, state));
  EventDraw d = draw_event(config, state);
  apply_event(config, state, d);
}

std::vector<ParticleState> run(const SimConfig& config, std::vector<Vec3> initial) {
  ParticleState state = make_state(config, std::move(initial));
  std::vector<double> times = config.snapshot_times;
  if (times.empty()) times.push_back(config.horizon_t);

  std::vector<ParticleState> snapshots;
  snapshots.reserve(times.size());
  std::size_t next_snap = 0;
  auto record_until = [&](double t_next) {
    while (next_snap < times.size() && times[next_snap] < t_next) {
      ParticleState snap = state;
      snap.time = times[next_snap++];
      snapshots.push_back(std::move(snap));
    }
  };

  const double rate = event_rate(config, state);
  for (;;) {
    const double t_next = state.time + state.rng.exponential(rate);
    if (t_next > config.horizon_t) {
      record_until(std::numeric_limits<double>::infinity());
      break;
    }
    record_until(t_next);
    state.time = t_next;
    EventDraw d = draw_event(config, state);
    apply_event(config, state, d);
  }
  return snapshots;
}

ParticleState run_to_horizon(const SimConfig& config, std::vector<Vec3> initial) {
  SimConfig c = config;
  c.snapshot_times = {config.horizon_t};
  return std::move(run(c, std::move(initial)).back());
}

double empirical_moment(std::span<const Vec3> velocities, double p) {
  if (!(p > 0.0)) throw DomainError("empirical_moment: order must be positive");
  if (velocities.empty()) return 0.0;
  double sum = 0.0;
  const double half_p = 0.5 * p;
  for (const Vec3& v : velocities) sum += std::pow(norm2(v), half_p);
  return sum / static_cast<double>(velocities.size());
}

ConservationDrift conservation_drift(const ParticleState& state) {
  Vec3 momentum;
  double energy = 0.0;
  for (const Vec3& v : state.velocities) {
    momentum += v;
    energy += norm2(v);
  }
  ConservationDrift d;
  d.momentum = norm(momentum - state.total_momentum);
  d.relative_energy = state.total_energy > 0.0 ? std::abs(energy - state.total_energy) / state.total_energy : 0.0;
  return d;
}

void write_snapshot_header(std::ostream& out) { out << "replica_id,t,particle_id,vx,vy,vz\n"; }

void write_snapshot_rows(std::ostream& out, std::size_t replica_id, std::span<const ParticleState> snapshots) {
  char buf[192];
  for (const ParticleState& s : snapshots) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Vec3& v = s.velocities[i];
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%zu,%.17g,%.17g,%.17g\n", replica_id, s.time, i, v.x, v.y, v.z);
      out << buf;
    }
  }
}

std::vector<SnapshotRow> read_snapshot_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "replica_id,t,particle_id,vx,vy,vz")
    throw ConfigError("snapshot file: missing or unexpected header");
  std::vector<SnapshotRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    SnapshotRow r{};
    char tail = 0;
    const int got = std::sscanf(line.c_str(), "%zu,%lf,%zu,%lf,%lf,%lf%c", &r.replica_id, &r.t, &r.particle_id,
                                &r.v.x, &r.v.y, &r.v.z, &tail);
    if (got != 6) throw ConfigError("snapshot file: malformed row at line " + std::to_string(line_no));
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Povzner audit

namespace {

constexpr int kPhiNodes = 64;

// |w + d|^p - |w|^p with d small relative to w, computed without cancellation.
double power_gain(const Vec3& w, const Vec3& d, double p) {
  const double w2 = norm2(w);
  if (w2 == 0.0) return std::pow(norm2(d), 0.5 * p);
  const double delta = (2.0 * dot(w, d) + norm2(d)) / w2;
  return std::pow(w2, 0.5 * p) * std::expm1(0.5 * p * std::log1p(delta));
}

}  // namespace

double povzner_lhs(const KernelSpec& spec, const Vec3& v, const Vec3& v_star, double p) {
  if (!(p > 2.0)) throw DomainError("povzner_audit: order must exceed 2");
  const Vec3 rel = v - v_star;
  const double x = norm(rel);
  if (x == 0.0) return 0.0;
  const Frame f = frame_of(rel);

  // Substituting theta = G(z / x^gamma) turns dz into x^gamma beta(theta) dtheta.
  auto phi_average = [&](double theta) {
    const double s = std::sin(0.5 * theta);
    const Vec3 radial = (-s * s) * rel;
    const double transverse = 0.5 * std::sin(theta) * x;
    double sum = 0.0;
    for (int k = 0; k < kPhiNodes; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / kPhiNodes;
      const Vec3 a = radial + (transverse * std::cos(phi)) * f.e2 + (transverse * std::sin(phi)) * f.e3;
      sum += power_gain(v, a, p) + power_gain(v_star, -a, p);
    }
    return 2.0 * std::numbers::pi * sum / kPhiNodes;
  };
  const double scale = spec.is_hard_sphere() ? x : std::pow(x, spec.gamma);
  return scale * integrate_against_beta(spec, phi_average, 1e-10, 6);
}

double povzner_tilde_constant(double p, const KernelSpec& spec) {
  if (!(p > 2.0)) throw DomainError("povzner_tilde_constant: order must exceed 2");
  spec.validate();
  static std::mutex mu;
  static std::map<std::tuple<double, int, double, double>, double> cache;
  const auto key = std::make_tuple(p, static_cast<int>(spec.family), spec.gamma, spec.nu);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // Both sides scale like |v|^(p+gamma); the ratio depends on |v*|/|v| and the
  // angle between the two velocities only, and is symmetric in (v, v*).
  const double a_p = povzner_constant(p, spec);
  constexpr int kRatios = 24;
  constexpr int kAngles = 24;
  double sup = 0.0;
  for (int ir = 1; ir <= kRatios; ++ir) {
    const double r = static_cast<double>(ir) / kRatios;
    for (int ia = 0; ia <= kAngles; ++ia) {
      const double alpha = std::numbers::pi * ia / kAngles;
      const Vec3 v{1.0, 0.0, 0.0};
      const Vec3 vs{r * std::cos(alpha), r * std::sin(alpha), 0.0};
      const double x = norm(v - vs);
      if (x < 1e-9) continue;
      const double scale = spec.is_hard_sphere() ? x : std::pow(x, spec.gamma);
      const double mixed = std::pow(r, 2.0) + std::pow(r, p - 2.0);
      const double lhs = povzner_lhs(spec, v, vs, p) / scale;
      const double needed = (lhs + a_p * (1.0 + std::pow(r, p))) / mixed;
      sup = std::max(sup, needed);
    }
  }
  const double tilde = 1.05 * std::max(sup, 0.0);
  std::lock_guard lock(mu);
  cache.emplace(key, tilde);
  return tilde;
}

PovznerAudit povzner_audit(const KernelSpec& spec, const Vec3& v, const Vec3& v_star, double p) {
  if (!(p > 2.0)) throw DomainError("povzner_audit: order must exceed 2");
  PovznerAudit out;
  out.lhs = povzner_lhs(spec, v, v_star, p);
  const double x = norm(v - v_star);
  const double scale = x == 0.0 ? 0.0 : (spec.is_hard_sphere() ? x : std::pow(x, spec.gamma));
  const double nv = norm(v);
  const double ns = norm(v_star);
  const double pure = std::pow(nv, p) + std::pow(ns, p);
  const double mixed = std::pow(nv, p - 2.0) * ns * ns + std::pow(ns, p - 2.0) * nv * nv;
  out.rhs = -povzner_constant(p, spec) * scale * pure + povzner_tilde_constant(p, spec) * scale * mixed;
  out.holds = out.lhs <= out.rhs + 1e-10 * scale * pure;
  return out;
}

}  // namespace kac
