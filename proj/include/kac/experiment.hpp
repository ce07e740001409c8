#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kac/coupling.hpp"
#include "kac/initial_data.hpp"
#include "kac/kernel.hpp"
#include "kac/stats.hpp"

namespace kac {

enum class Mode { Simulate, Converge, Couple, Validate };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// Declarative description of one study. Loaded from a flat `key = value`
/// text file; see README for the key list. Unknown keys are errors.
struct ExperimentPlan {
  Mode mode = Mode::Simulate;
  KernelSpec kernel = KernelSpec::hard_sphere();
  InitialLaw initial;
  std::vector<std::size_t> n_ladder{256};
  double cutoff_k = kNoCutoff;
  double horizon_t = 1.0;
  std::size_t replicas = 1;
  std::uint64_t base_seed = 0;
  std::string output_path = "out";
  std::size_t reference_n = 0;     ///< Converge: 0 means 2 * max(n_ladder)
  std::size_t t_grid_points = 5;   ///< uniform grid {0, T/(m-1), ..., T}
  std::vector<double> k_ladder;    ///< Couple: last entry is K_max
  bool tanaka_alignment = true;    ///< Couple
  std::optional<double> slope_ceiling;  ///< pass threshold for fitted slopes
  std::size_t threads = 1;

  /// Throws ConfigError when the plan is inconsistent for its mode.
  void validate() const;

  /// One `key = value` line per field in a fixed order; used for the config
  /// echo and the config hash.
  std::string canonical_text() const;
  std::string config_hash() const;  ///< 16 hex digits, FNV-1a of canonical_text()

  std::vector<double> t_grid() const;
  std::size_t effective_reference_n() const;
  double effective_slope_ceiling() const;  ///< -0.30 Converge, -1.5 Couple by default
};

ExperimentPlan parse_plan(std::istream& in);
ExperimentPlan load_plan(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Converge

struct ConvergenceRow {
  std::size_t n;
  std::size_t replica;
  double t;
  double w2_squared;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  ///< sorted by (N, replica, t)
  /// Per N: max over the t-grid of the replica-mean W2^2 (approximates the
  /// sup over [0, T]).
  std::vector<std::pair<std::size_t, double>> sup_means;
  LogLogFit fit;
  std::string reference_spec;
  std::uint64_t seed = 0;
};

struct ConvergeOptions {
  /// Compare every run with itself instead of an independent reference run.
  /// Plumbing check: every W2^2 row must be zero.
  bool self_reference = false;
};

/// For each N and replica: simulate to each t-grid time, compare mu^N_t with
/// disjoint N-blocks of an independent reference run of size N_ref by exact
/// W2^2, then fit the log-log slope of the sup-over-t replica mean against N.
ConvergenceReport run_convergence_study(const ExperimentPlan& plan, ConvergeOptions options = {});

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
std::vector<ConvergenceRow> read_convergence_csv(std::istream& in);

/// Writes <dir>/converge.csv and <dir>/converge_summary.json. I/O failures
/// raise ConfigError naming the path.
void emit_results(const ConvergenceReport& report, const ExperimentPlan& plan, const std::filesystem::path& dir);

/// JSON summary text {slope, stderr, ..., config, config_hash, seed}.
std::string convergence_summary_json(const ConvergenceReport& report, const ExperimentPlan& plan);

// ---------------------------------------------------------------------------
// Couple / Simulate

CutoffStudyPlan cutoff_plan_from(const ExperimentPlan& plan);
void write_cutoff_csv(std::ostream& out, const CutoffStudy& study);
void emit_cutoff_results(const CutoffStudy& study, const ExperimentPlan& plan, const std::filesystem::path& dir);

struct SimulationRunSummary {
  std::size_t n;
  std::size_t replica;
  std::uint64_t events;
  double momentum_drift;
  double relative_energy_drift;
  bool within_budget;
};

/// Simulates every (N, replica), writes snapshots_N<N>.csv and
/// simulate_summary.json into dir. Returns per-run conservation summaries.
std::vector<SimulationRunSummary> run_simulations(const ExperimentPlan& plan, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Validate

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<SuiteResult> suites;
  bool all_passed() const;
  std::string to_json() const;
};

/// Replaceable primitives, so that mutation tests can inject faults and
/// confirm the suites catch them.
struct ValidationHooks {
  std::function<std::pair<Vec3, Vec3>(const KernelSpec&, const Vec3&, const Vec3&, double, double, double)>
      collide = [](const KernelSpec& s, const Vec3& a, const Vec3& b, double z, double phi, double k) {
        return collide_pair(s, a, b, z, phi, k);
      };
  std::function<double(const KernelSpec&, double)> big_g = [](const KernelSpec& s, double z) {
    return kac::big_g(s, z);
  };
};

/// Runs the invariant suites of every module with fixed seeds.
ValidationReport run_validation_suite(std::uint64_t seed, const ValidationHooks& hooks = {});

/// Writes text atomically enough for our purposes; throws ConfigError with
/// the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace kac
