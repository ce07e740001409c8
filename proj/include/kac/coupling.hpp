#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kac/initial_data.hpp"
#include "kac/simulator.hpp"
#include "kac/stats.hpp"

namespace kac {

/// Two Kac systems driven by one stream of Poisson atoms. System B uses
/// cutoff_b, system A the smaller cutoff_a. A rotates its azimuth by the
/// Tanaka angle phi_zero(X_B, X_A) of the two pre-collision relative
/// velocities unless tanaka_alignment is off.
struct CoupledConfig {
  std::size_t n_particles = 2;
  KernelSpec kernel = KernelSpec::hard_sphere();
  double cutoff_a = 1.0;
  double cutoff_b = 1.0;
  double horizon_t = 0.0;
  std::vector<double> record_times;  ///< h_t is recorded here; empty means {horizon_t}
  bool tanaka_alignment = true;
  std::uint64_t seed = 0;

  void validate() const;
  SimConfig system_a() const;
  SimConfig system_b() const;
};

struct CoupledState {
  ParticleState a;
  ParticleState b;
  Rng rng;
  double time = 0.0;
  std::vector<std::pair<double, double>> history;  ///< (t, h_t)
};

/// Both systems start from the same velocities; h_0 = 0.
CoupledState make_coupled(const CoupledConfig& config, std::vector<Vec3> initial);

/// Applies one shared atom to both systems. B moves iff z <= cutoff_b and its
/// deflection is nonzero; A moves iff z <= cutoff_a, using its own relative
/// speed and the aligned azimuth.
void apply_coupled_event(const CoupledConfig& config, CoupledState& state, const EventDraw& draw);

/// Advances the shared clock at B's rate, then draws (pair, z, phi) and applies it.
void coupled_step(const CoupledConfig& config, CoupledState& state);

/// (1/N) sum |V_i^A - V_i^B|^2.
double coupled_distance(std::span<const Vec3> a, std::span<const Vec3> b);
inline double coupled_distance(const CoupledState& s) { return coupled_distance(s.a.velocities, s.b.velocities); }

/// Runs to the horizon, filling state.history at the record times.
CoupledState run_coupled(const CoupledConfig& config, std::vector<Vec3> initial);

struct CutoffStudyRow {
  double k;
  std::size_t replica;
  double h_t;
};

struct CutoffStudy {
  std::vector<CutoffStudyRow> rows;         ///< sorted by (K, replica)
  std::vector<std::pair<double, double>> means;  ///< (K, mean h_T)
  LogLogFit fit;                            ///< over levels with positive mean
  bool strictly_decreasing = false;         ///< over levels below K_max
};

struct CutoffStudyPlan {
  KernelSpec kernel;
  InitialLaw initial;
  std::size_t n_particles = 512;
  std::vector<double> k_ladder;  ///< non-decreasing; the last entry is K_max
  double horizon_t = 1.0;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  bool tanaka_alignment = true;
  std::size_t threads = 1;
};

/// Couples each ladder level K with K_max and reports h_T per replica, the
/// replica means and the log-log slope of mean h_T against K.
/// Throws ConfigError for hard-sphere kernels or malformed ladders.
CutoffStudy cutoff_scaling_study(const CutoffStudyPlan& plan);

}  // namespace kac
