#include "kac/experiment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include "json.hpp"
#include <ostream>
#include <set>
#include <sstream>

#include "kac/errors.hpp"
#include "kac/parallel.hpp"
#include "kac/simulator.hpp"
#include "kac/transport.hpp"

namespace kac {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "infinity") return kNoCutoff;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw ConfigError("config key '" + key + "': not a nonnegative integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + text + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError("config key '" + key + "': expected three comma-separated numbers");
  return {parse_double(key, parts[0]), parse_double(key, parts[1]), parse_double(key, parts[2])};
}

const std::set<std::string> kKnownKeys = {
    "mode",           "kernel",         "gamma",          "nu",         "initial",          "initial_energy",
    "initial_radius", "initial_u1",     "initial_u2",     "initial_weight", "n_ladder",     "cutoff_k",
    "horizon_t",      "replicas",       "base_seed",      "output_path", "reference_n",     "t_grid_points",
    "k_ladder",       "tanaka_alignment", "slope_ceiling", "threads",
};

void write_rows_header(std::ostream& out) { out << "N,replica,t,w2_squared\n"; }

Json config_echo(const ExperimentPlan& plan) {
  Json echo = Json::object();
  std::istringstream is(plan.canonical_text());
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    echo[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return echo;
}

Json json_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Simulate:
      return "simulate";
    case Mode::Converge:
      return "converge";
    case Mode::Couple:
      return "couple";
    case Mode::Validate:
      return "validate";
  }
  return "unknown";
}

Mode parse_mode(const std::string& text) {
  if (text == "simulate") return Mode::Simulate;
  if (text == "converge") return Mode::Converge;
  if (text == "couple") return Mode::Couple;
  if (text == "validate") return Mode::Validate;
  throw ConfigError("unknown mode '" + text + "'");
}

void ExperimentPlan::validate() const {
  try {
    kernel.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  initial.validate();
  if (n_ladder.empty()) throw ConfigError("n_ladder must not be empty");
  for (std::size_t i = 0; i < n_ladder.size(); ++i) {
    if (n_ladder[i] < 2) throw ConfigError("n_ladder entries must be >= 2");
    if (i > 0 && n_ladder[i] <= n_ladder[i - 1])
      throw ConfigError("n_ladder must be strictly increasing (degenerate ladder has no x-variation to fit)");
  }
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  if (!(horizon_t >= 0.0 && std::isfinite(horizon_t))) throw ConfigError("horizon_t must be finite and >= 0");
  if (!(cutoff_k >= 1.0)) throw ConfigError("cutoff_k must be >= 1");
  // Couple mode takes its cutoffs from k_ladder.
  if (mode != Mode::Couple && !kernel.is_hard_sphere() && !std::isfinite(cutoff_k))
    throw ConfigError("power-law kernels need a finite cutoff_k");
  if (t_grid_points < 1) throw ConfigError("t_grid_points must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");

  if (mode == Mode::Converge) {
    if (n_ladder.size() < 3) throw ConfigError("converge mode needs at least three n_ladder points");
    if (effective_reference_n() < 2 * n_ladder.back())
      throw ConfigError("reference_n must be at least twice the largest ladder N");
  }
  if (mode == Mode::Couple) {
    if (kernel.is_hard_sphere()) throw ConfigError("couple mode needs a power-law kernel");
    if (n_ladder.size() != 1) throw ConfigError("couple mode uses a single N (n_ladder with one entry)");
    if (k_ladder.size() < 2) throw ConfigError("couple mode needs a k_ladder with at least two levels");
    for (std::size_t i = 0; i < k_ladder.size(); ++i) {
      if (!(k_ladder[i] >= 1.0 && std::isfinite(k_ladder[i])))
        throw ConfigError("k_ladder entries must be finite and >= 1");
      if (i > 0 && k_ladder[i] < k_ladder[i - 1]) throw ConfigError("k_ladder must be non-decreasing");
    }
  }
}

std::vector<double> ExperimentPlan::t_grid() const {
  if (t_grid_points <= 1) return {horizon_t};
  std::vector<double> grid(t_grid_points);
  for (std::size_t i = 0; i < t_grid_points; ++i)
    grid[i] = horizon_t * static_cast<double>(i) / static_cast<double>(t_grid_points - 1);
  grid.back() = horizon_t;
  return grid;
}

std::size_t ExperimentPlan::effective_reference_n() const {
  if (reference_n > 0) return reference_n;
  return n_ladder.empty() ? 0 : 2 * n_ladder.back();
}

double ExperimentPlan::effective_slope_ceiling() const {
  if (slope_ceiling) return *slope_ceiling;
  return mode == Mode::Couple ? -1.5 : -0.30;
}

std::string ExperimentPlan::canonical_text() const {
  std::ostringstream os;
  auto list_u = [](const std::vector<std::size_t>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s;
  };
  auto list_d = [](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt_double(xs[i]);
    return s;
  };
  auto vec = [](const Vec3& v) { return fmt_double(v.x) + "," + fmt_double(v.y) + "," + fmt_double(v.z); };

  os << "mode = " << to_string(mode) << "\n";
  os << "kernel = " << (kernel.is_hard_sphere() ? "hard_sphere" : "power_law") << "\n";
  os << "gamma = " << fmt_double(kernel.gamma) << "\n";
  if (!kernel.is_hard_sphere()) os << "nu = " << fmt_double(kernel.nu) << "\n";
  if (const auto* g = std::get_if<IsotropicGaussian>(&initial.kind)) {
    os << "initial = gaussian\ninitial_energy = " << fmt_double(g->energy_per_particle) << "\n";
  } else if (const auto* b = std::get_if<UniformBall>(&initial.kind)) {
    os << "initial = uniform_ball\ninitial_radius = " << fmt_double(b->radius) << "\n";
  } else if (const auto* m = std::get_if<TwoPointMixture>(&initial.kind)) {
    os << "initial = two_point\ninitial_u1 = " << vec(m->u1) << "\ninitial_u2 = " << vec(m->u2)
       << "\ninitial_weight = " << fmt_double(m->weight) << "\n";
  }
  os << "n_ladder = " << list_u(n_ladder) << "\n";
  os << "cutoff_k = " << fmt_double(cutoff_k) << "\n";
  os << "horizon_t = " << fmt_double(horizon_t) << "\n";
  os << "replicas = " << replicas << "\n";
  os << "base_seed = " << base_seed << "\n";
  os << "t_grid_points = " << t_grid_points << "\n";
  if (mode == Mode::Converge) os << "reference_n = " << effective_reference_n() << "\n";
  if (mode == Mode::Couple) {
    os << "k_ladder = " << list_d(k_ladder) << "\n";
    os << "tanaka_alignment = " << (tanaka_alignment ? "true" : "false") << "\n";
  }
  if (mode == Mode::Converge || mode == Mode::Couple)
    os << "slope_ceiling = " << fmt_double(effective_slope_ceiling()) << "\n";
  return os.str();
}

std::string ExperimentPlan::config_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

ExperimentPlan parse_plan(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key)) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!kv.emplace(key, value).second) throw ConfigError("config key '" + key + "' given twice");
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  ExperimentPlan plan;
  if (auto v = take("mode")) plan.mode = parse_mode(*v);

  const std::string kernel = take("kernel").value_or("hard_sphere");
  const auto gamma = take("gamma");
  const auto nu = take("nu");
  if (kernel == "hard_sphere") {
    if (nu) throw ConfigError("config key 'nu' is not used by hard_sphere kernels");
    if (gamma && parse_double("gamma", *gamma) != 1.0) throw ConfigError("hard_sphere kernels require gamma = 1");
    plan.kernel = KernelSpec::hard_sphere();
  } else if (kernel == "power_law") {
    if (!gamma || !nu) throw ConfigError("power_law kernels need both 'gamma' and 'nu'");
    plan.kernel = KernelSpec{KernelFamily::PowerLaw, parse_double("gamma", *gamma), parse_double("nu", *nu)};
  } else {
    throw ConfigError("unknown kernel '" + kernel + "' (expected hard_sphere or power_law)");
  }

  const std::string initial = take("initial").value_or("gaussian");
  auto forbid = [&](const char* key) {
    if (kv.count(key)) throw ConfigError(std::string("config key '") + key + "' does not apply to initial = " + initial);
  };
  if (initial == "gaussian") {
    forbid("initial_radius"), forbid("initial_u1"), forbid("initial_u2"), forbid("initial_weight");
    IsotropicGaussian g;
    if (auto v = take("initial_energy")) g.energy_per_particle = parse_double("initial_energy", *v);
    plan.initial.kind = g;
  } else if (initial == "uniform_ball") {
    forbid("initial_energy"), forbid("initial_u1"), forbid("initial_u2"), forbid("initial_weight");
    UniformBall b;
    if (auto v = take("initial_radius")) b.radius = parse_double("initial_radius", *v);
    plan.initial.kind = b;
  } else if (initial == "two_point") {
    forbid("initial_energy"), forbid("initial_radius");
    TwoPointMixture m;
    const auto u1 = take("initial_u1");
    const auto u2 = take("initial_u2");
    if (!u1 || !u2) throw ConfigError("two_point initial law needs 'initial_u1' and 'initial_u2'");
    m.u1 = parse_vec3("initial_u1", *u1);
    m.u2 = parse_vec3("initial_u2", *u2);
    if (auto v = take("initial_weight")) m.weight = parse_double("initial_weight", *v);
    plan.initial.kind = m;
  } else {
    throw ConfigError("unknown initial law '" + initial + "' (expected gaussian, uniform_ball or two_point)");
  }

  if (auto v = take("n_ladder")) {
    plan.n_ladder.clear();
    for (const auto& part : split(*v, ',')) plan.n_ladder.push_back(parse_u64("n_ladder", part));
  }
  if (auto v = take("cutoff_k")) plan.cutoff_k = parse_double("cutoff_k", *v);
  if (auto v = take("horizon_t")) plan.horizon_t = parse_double("horizon_t", *v);
  if (auto v = take("replicas")) plan.replicas = parse_u64("replicas", *v);
  if (auto v = take("base_seed")) plan.base_seed = parse_u64("base_seed", *v);
  if (auto v = take("output_path")) plan.output_path = *v;
  if (auto v = take("reference_n")) plan.reference_n = parse_u64("reference_n", *v);
  if (auto v = take("t_grid_points")) plan.t_grid_points = parse_u64("t_grid_points", *v);
  if (auto v = take("k_ladder")) {
    for (const auto& part : split(*v, ',')) plan.k_ladder.push_back(parse_double("k_ladder", part));
  }
  if (auto v = take("tanaka_alignment")) plan.tanaka_alignment = parse_bool("tanaka_alignment", *v);
  if (auto v = take("slope_ceiling")) plan.slope_ceiling = parse_double("slope_ceiling", *v);
  if (auto v = take("threads")) plan.threads = parse_u64("threads", *v);
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_plan(in);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

SimConfig sim_config_for(const ExperimentPlan& plan, std::size_t n, std::uint64_t seed) {
  SimConfig c;
  c.n_particles = n;
  c.kernel = plan.kernel;
  c.cutoff_k = plan.cutoff_k;
  c.horizon_t = plan.horizon_t;
  c.snapshot_times = plan.t_grid();
  c.seed = seed;
  return c;
}

std::vector<Vec3> initial_for(const ExperimentPlan& plan, std::size_t n, std::uint64_t seed) {
  InitialLaw law = plan.initial;
  law.seed = seed;
  return sample_initial(law, n);
}

// Stream tags for derive_seed.
constexpr std::uint64_t kTagInit = 1;
constexpr std::uint64_t kTagDynamics = 2;
constexpr std::uint64_t kTagRefInit = 3;
constexpr std::uint64_t kTagRefDynamics = 4;

}  // namespace

ConvergenceReport run_convergence_study(const ExperimentPlan& plan, ConvergeOptions options) {
  plan.validate();
  const std::vector<double> grid = plan.t_grid();
  const std::size_t n_ref = plan.effective_reference_n();

  std::vector<std::vector<ParticleState>> references(options.self_reference ? 0 : plan.replicas);
  if (!options.self_reference) {
    parallel_for(plan.replicas, plan.threads, [&](std::size_t r) {
      const SimConfig c = sim_config_for(plan, n_ref, derive_seed(plan.base_seed, {kTagRefDynamics, r}));
      references[r] = run(c, initial_for(plan, n_ref, derive_seed(plan.base_seed, {kTagRefInit, r})));
    });
  }

  const std::size_t n_levels = plan.n_ladder.size();
  const std::size_t tasks = n_levels * plan.replicas;
  std::vector<std::vector<double>> values(tasks);
  // Largest N first keeps the worker pool balanced.
  parallel_for(tasks, plan.threads, [&](std::size_t k) {
    const std::size_t task = tasks - 1 - k;
    const std::size_t level = task / plan.replicas;
    const std::size_t r = task % plan.replicas;
    const std::size_t n = plan.n_ladder[level];
    const SimConfig c = sim_config_for(plan, n, derive_seed(plan.base_seed, {kTagDynamics, n, r}));
    const auto snaps = run(c, initial_for(plan, n, derive_seed(plan.base_seed, {kTagInit, n, r})));
    std::vector<double>& out = values[task];
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
      const EmpiricalMeasure mu(snaps[ti].velocities);
      const EmpiricalMeasure big = options.self_reference ? mu : EmpiricalMeasure(references[r][ti].velocities);
      out.push_back(subsample_compare(big, mu, n).mean_w2_squared);
    }
  });

  ConvergenceReport report;
  report.seed = plan.base_seed;
  report.reference_spec = options.self_reference
                              ? std::string("self-reference (plumbing check)")
                              : "independent particle run per replica, N_ref=" + std::to_string(n_ref) +
                                    ", compared blockwise with block size N";
  std::vector<double> xs, ys;
  for (std::size_t level = 0; level < n_levels; ++level) {
    double sup = -1.0;
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
      double acc = 0.0;
      for (std::size_t r = 0; r < plan.replicas; ++r) {
        const double w = values[level * plan.replicas + r][ti];
        acc += w;
      }
      sup = std::max(sup, acc / static_cast<double>(plan.replicas));
    }
    for (std::size_t r = 0; r < plan.replicas; ++r)
      for (std::size_t ti = 0; ti < grid.size(); ++ti)
        report.rows.push_back({plan.n_ladder[level], r, grid[ti], values[level * plan.replicas + r][ti]});
    report.sup_means.emplace_back(plan.n_ladder[level], sup);
    xs.push_back(static_cast<double>(plan.n_ladder[level]));
    ys.push_back(sup);
  }
  report.fit = fit_loglog(xs, ys);
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  write_rows_header(out);
  char buf[128];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", row.n, row.replica, row.t, row.w2_squared);
    out << buf;
  }
}

std::vector<ConvergenceRow> read_convergence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "N,replica,t,w2_squared")
    throw ConfigError("convergence file: missing or unexpected header");
  std::vector<ConvergenceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ConvergenceRow r{};
    char tail = 0;
    if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf%c", &r.n, &r.replica, &r.t, &r.w2_squared, &tail) != 4)
      throw ConfigError("convergence file: malformed row at line " + std::to_string(line_no));
    rows.push_back(r);
  }
  return rows;
}

std::string convergence_summary_json(const ConvergenceReport& report, const ExperimentPlan& plan) {
  Json j;
  j["slope"] = report.fit.valid ? json_number(report.fit.slope) : Json(nullptr);
  j["stderr"] = report.fit.valid ? json_number(report.fit.slope_stderr) : Json(nullptr);
  j["fit_valid"] = report.fit.valid;
  j["diagnostic"] = report.fit.diagnostic;
  j["slope_ceiling"] = plan.effective_slope_ceiling();
  j["passed"] = report.fit.valid && report.fit.slope <= plan.effective_slope_ceiling();
  Json sup = Json::array();
  for (const auto& [n, m] : report.sup_means) sup.push_back(Json{{"N", n}, {"sup_mean_w2_squared", m}});
  j["sup_over_t_grid"] = sup;
  j["reference"] = report.reference_spec;
  j["t_grid_note"] = "sup over [0,T] approximated by the max over the t-grid; the gap is not quantified";
  j["config"] = config_echo(plan);
  j["config_hash"] = plan.config_hash();
  j["seed"] = report.seed;
  return j.dump(2) + "\n";
}

void emit_results(const ConvergenceReport& report, const ExperimentPlan& plan, const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::ostringstream csv;
  write_convergence_csv(csv, report);
  write_text_file(dir / "converge.csv", csv.str());
  write_text_file(dir / "converge_summary.json", convergence_summary_json(report, plan));
}

CutoffStudyPlan cutoff_plan_from(const ExperimentPlan& plan) {
  CutoffStudyPlan c;
  c.kernel = plan.kernel;
  c.initial = plan.initial;
  c.n_particles = plan.n_ladder.front();
  c.k_ladder = plan.k_ladder;
  c.horizon_t = plan.horizon_t;
  c.replicas = plan.replicas;
  c.seed = plan.base_seed;
  c.tanaka_alignment = plan.tanaka_alignment;
  c.threads = plan.threads;
  return c;
}

void write_cutoff_csv(std::ostream& out, const CutoffStudy& study) {
  out << "K,replica,h_T\n";
  char buf[128];
  for (const auto& row : study.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g\n", row.k, row.replica, row.h_t);
    out << buf;
  }
}

void emit_cutoff_results(const CutoffStudy& study, const ExperimentPlan& plan, const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::ostringstream csv;
  write_cutoff_csv(csv, study);
  write_text_file(dir / "couple.csv", csv.str());

  Json j;
  j["slope"] = study.fit.valid ? json_number(study.fit.slope) : Json(nullptr);
  j["stderr"] = study.fit.valid ? json_number(study.fit.slope_stderr) : Json(nullptr);
  j["fit_valid"] = study.fit.valid;
  j["diagnostic"] = study.fit.diagnostic;
  j["strictly_decreasing"] = study.strictly_decreasing;
  j["slope_ceiling"] = plan.effective_slope_ceiling();
  j["reference_slope"] = plan.kernel.is_hard_sphere() ? Json(nullptr) : Json(1.0 - 2.0 / plan.kernel.nu);
  j["passed"] = study.fit.valid && study.strictly_decreasing && study.fit.slope <= plan.effective_slope_ceiling();
  Json means = Json::array();
  for (const auto& [k, m] : study.means) means.push_back(Json{{"K", k}, {"mean_h_T", m}});
  j["means"] = means;
  j["config"] = config_echo(plan);
  j["config_hash"] = plan.config_hash();
  j["seed"] = plan.base_seed;
  write_text_file(dir / "couple_summary.json", j.dump(2) + "\n");
}

std::vector<SimulationRunSummary> run_simulations(const ExperimentPlan& plan, const std::filesystem::path& dir) {
  plan.validate();
  ensure_dir(dir);
  std::vector<SimulationRunSummary> summaries;
  for (const std::size_t n : plan.n_ladder) {
    std::vector<std::vector<ParticleState>> snaps(plan.replicas);
    parallel_for(plan.replicas, plan.threads, [&](std::size_t r) {
      const SimConfig c = sim_config_for(plan, n, derive_seed(plan.base_seed, {kTagDynamics, n, r}));
      snaps[r] = run(c, initial_for(plan, n, derive_seed(plan.base_seed, {kTagInit, n, r})));
    });
    std::ostringstream csv;
    write_snapshot_header(csv);
    for (std::size_t r = 0; r < plan.replicas; ++r) {
      write_snapshot_rows(csv, r, snaps[r]);
      const ParticleState& last = snaps[r].back();
      const ConservationDrift d = conservation_drift(last);
      const bool ok = d.relative_energy <= 1e-9 && d.momentum <= 1e-11 * std::sqrt(last.total_energy);
      summaries.push_back({n, r, last.event_count, d.momentum, d.relative_energy, ok});
    }
    write_text_file(dir / ("snapshots_N" + std::to_string(n) + ".csv"), csv.str());
  }

  Json runs = Json::array();
  bool all_ok = true;
  for (const auto& s : summaries) {
    all_ok = all_ok && s.within_budget;
    runs.push_back(Json{{"N", s.n},
                        {"replica", s.replica},
                        {"events", s.events},
                        {"momentum_drift", s.momentum_drift},
                        {"relative_energy_drift", s.relative_energy_drift},
                        {"within_budget", s.within_budget}});
  }
  Json j;
  j["passed"] = all_ok;
  j["runs"] = runs;
  j["config"] = config_echo(plan);
  j["config_hash"] = plan.config_hash();
  j["seed"] = plan.base_seed;
  write_text_file(dir / "simulate_summary.json", j.dump(2) + "\n");
  return summaries;
}

}  // namespace kac
