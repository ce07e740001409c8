#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kac/geometry.hpp"
#include "kac/kernel.hpp"
#include "kac/rng.hpp"
#include "kac/vec3.hpp"

namespace kac {

struct SimConfig {
  std::size_t n_particles = 2;
  KernelSpec kernel = KernelSpec::hard_sphere();
  double cutoff_k = kNoCutoff;  ///< must be finite for PowerLaw kernels
  double horizon_t = 0.0;
  std::vector<double> snapshot_times;  ///< sorted, within [0, horizon_t]
  std::uint64_t seed = 0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// N velocities plus the conserved quantities recorded at construction.
struct ParticleState {
  std::vector<Vec3> velocities;
  double time = 0.0;
  Vec3 total_momentum;
  double total_energy = 0.0;        ///< sum of |v_i|^2
  std::uint64_t event_count = 0;     ///< collisions with nonzero deflection
  std::uint64_t proposal_count = 0;  ///< all Poisson atoms drawn
  Rng rng;

  std::size_t size() const { return velocities.size(); }
};

/// State at time 0 with cached invariants and an RNG seeded from config.seed.
ParticleState make_state(const SimConfig& config, std::vector<Vec3> velocities);

/// One Poisson atom. `first` receives +c, `second` receives -c.
struct EventDraw {
  std::size_t first = 0;
  std::size_t second = 0;
  double z = 0.0;
  double phi = 0.0;
  bool accepted = false;  ///< set by apply_event
};

/// Upper end of the z-range sampled per event: K for power laws, and
/// min(K, pi x_max / 2) for hard spheres with x_max = sqrt(2 * total_energy).
double z_range(const SimConfig& config, const ParticleState& state);

/// Total intensity of proposed atoms, pi N z_range. For power laws this is
/// the exact rate pi K N; for hard spheres it is a thinning majorant.
double event_rate(const SimConfig& config, const ParticleState& state);

/// Draws pair, z, phi in that order from the state's generator.
EventDraw draw_event(const SimConfig& config, ParticleState& state);

/// Applies an atom. Returns true (and counts the event) iff the deflection
/// angle is nonzero; rejected atoms leave the velocities untouched.
bool apply_event(const SimConfig& config, ParticleState& state, EventDraw& draw);

/// Advances the clock by an exponential waiting time, then draws and applies
/// one atom.
void step(const SimConfig& config, ParticleState& state);

/// Simulates from the given initial velocities and records a snapshot at each
/// requested time (an initial-state snapshot when the list is empty and the
/// horizon is 0). Deterministic in config.seed.
std::vector<ParticleState> run(const SimConfig& config, std::vector<Vec3> initial);

/// Simulates to the horizon and returns the final state only.
ParticleState run_to_horizon(const SimConfig& config, std::vector<Vec3> initial);

/// (1/N) sum |v_i|^p.
double empirical_moment(std::span<const Vec3> velocities, double p);
inline double empirical_moment(const ParticleState& state, double p) {
  return empirical_moment(state.velocities, p);
}

struct ConservationDrift {
  double momentum = 0.0;         ///< |sum v_i - cached momentum|
  double relative_energy = 0.0;  ///< |sum |v_i|^2 - cached| / cached
};
ConservationDrift conservation_drift(const ParticleState& state);

/// Normative snapshot export: header "replica_id,t,particle_id,vx,vy,vz",
/// one row per particle per snapshot, numbers in %.17g.
void write_snapshot_header(std::ostream& out);
void write_snapshot_rows(std::ostream& out, std::size_t replica_id, std::span<const ParticleState> snapshots);

struct SnapshotRow {
  std::size_t replica_id;
  double t;
  std::size_t particle_id;
  Vec3 v;
};
/// Reads the text format back; throws ConfigError on malformed input.
std::vector<SnapshotRow> read_snapshot_rows(std::istream& in);

/// Povzner audit for one velocity pair:
///   lhs = int_0^inf int_0^{2pi} (|v'|^p + |v*'|^p - |v|^p - |v*|^p) dphi dz
///   rhs = -A_p x^gamma (|v|^p + |v*|^p) + Atilde_p x^gamma (|v|^{p-2}|v*|^2 + |v*|^{p-2}|v|^2)
struct PovznerAudit {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};
PovznerAudit povzner_audit(const KernelSpec& spec, const Vec3& v, const Vec3& v_star, double p);

/// The z-phi integral of the p-th moment gain for one pair.
double povzner_lhs(const KernelSpec& spec, const Vec3& v, const Vec3& v_star, double p);

/// Calibrated Atilde_p: 1.05 times the largest ratio needed over a grid of
/// (|v*|/|v|, angle) configurations. Memoized per (p, spec).
double povzner_tilde_constant(double p, const KernelSpec& spec);

}  // namespace kac
