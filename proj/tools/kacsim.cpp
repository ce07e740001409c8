#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kac/errors.hpp"
#include "kac/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

void add_flags(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "experiment config file (key = value)");
  if (config_required) opt->required();
  cmd->add_option("--seed", f.seed, "base seed (overrides the config)");
  cmd->add_option("--out", f.out, "output directory (overrides the config)");
  cmd->add_option("--threads", f.threads, "worker threads (output bytes do not depend on it)")
      ->check(CLI::PositiveNumber);
}

kac::ExperimentPlan plan_for(kac::Mode mode, const CommonFlags& f) {
  kac::ExperimentPlan plan;
  if (!f.config.empty()) {
    plan = kac::load_plan(f.config);
    // A config without a mode key parses as simulate.
    if (plan.mode != mode && plan.mode != kac::Mode::Simulate)
      throw kac::ConfigError("config declares mode '" + kac::to_string(plan.mode) + "' but the subcommand is '" +
                             kac::to_string(mode) + "'");
  }
  plan.mode = mode;
  if (f.seed) plan.base_seed = *f.seed;
  if (f.out) plan.output_path = *f.out;
  if (f.threads) plan.threads = *f.threads;
  plan.validate();
  return plan;
}

int run_simulate(const CommonFlags& f) {
  const auto plan = plan_for(kac::Mode::Simulate, f);
  const auto runs = kac::run_simulations(plan, plan.output_path);
  bool ok = true;
  for (const auto& r : runs) {
    std::printf("N=%zu replica=%zu events=%llu momentum_drift=%.3g energy_drift=%.3g %s\n", r.n, r.replica,
                static_cast<unsigned long long>(r.events), r.momentum_drift, r.relative_energy_drift,
                r.within_budget ? "ok" : "OVER BUDGET");
    ok = ok && r.within_budget;
  }
  return ok ? 0 : 1;
}

int run_converge(const CommonFlags& f) {
  const auto plan = plan_for(kac::Mode::Converge, f);
  const auto report = kac::run_convergence_study(plan);
  kac::emit_results(report, plan, plan.output_path);
  for (const auto& [n, m] : report.sup_means) std::printf("N=%zu sup_t mean W2^2=%.6g\n", n, m);
  if (!report.fit.valid) {
    std::printf("fit rejected: %s\n", report.fit.diagnostic.c_str());
    return 1;
  }
  const bool ok = report.fit.slope <= plan.effective_slope_ceiling();
  std::printf("slope=%.4f stderr=%.4f ceiling=%.2f %s\n", report.fit.slope, report.fit.slope_stderr,
              plan.effective_slope_ceiling(), ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int run_couple(const CommonFlags& f) {
  const auto plan = plan_for(kac::Mode::Couple, f);
  const auto study = kac::cutoff_scaling_study(kac::cutoff_plan_from(plan));
  kac::emit_cutoff_results(study, plan, plan.output_path);
  for (const auto& [k, m] : study.means) std::printf("K=%g mean h_T=%.6g\n", k, m);
  if (!study.fit.valid) {
    std::printf("fit rejected: %s\n", study.fit.diagnostic.c_str());
    return 1;
  }
  const bool ok = study.strictly_decreasing && study.fit.slope <= plan.effective_slope_ceiling();
  std::printf("slope=%.4f stderr=%.4f strictly_decreasing=%s ceiling=%.2f %s\n", study.fit.slope,
              study.fit.slope_stderr, study.strictly_decreasing ? "yes" : "no", plan.effective_slope_ceiling(),
              ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int run_validate(const CommonFlags& f) {
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;
  if (!f.config.empty()) {
    const auto plan = plan_for(kac::Mode::Validate, f);
    seed = plan.base_seed;
    if (f.out) out = plan.output_path;
  } else {
    if (f.seed) seed = *f.seed;
    if (f.out) out = *f.out;
  }
  const auto report = kac::run_validation_suite(seed);
  const std::string json = report.to_json();
  if (out) {
    std::filesystem::create_directories(*out);
    kac::write_text_file(*out / "validate.json", json);
  }
  std::cout << json;
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-driven Kac particle simulator and Wasserstein experiment runner"};
  app.require_subcommand(1);
  CommonFlags sim, conv, coup, val;
  add_flags(app.add_subcommand("simulate", "run particle systems and export snapshots"), sim, true);
  add_flags(app.add_subcommand("converge", "chaos-rate study: W2^2 against N"), conv, true);
  add_flags(app.add_subcommand("couple", "cutoff scaling study with coupled systems"), coup, true);
  add_flags(app.add_subcommand("validate", "run the invariant suites"), val, false);
  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("simulate")) return run_simulate(sim);
    if (app.got_subcommand("converge")) return run_converge(conv);
    if (app.got_subcommand("couple")) return run_couple(coup);
    return run_validate(val);
  } catch (const kac::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
