#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "aaw/errors.hpp"
#include "aaw/examples.hpp"
#include "aaw/floquet.hpp"
#include "aaw/gainsearch.hpp"
#include "aaw/io.hpp"
#include "aaw/simulate.hpp"
#include "aaw/verify.hpp"

namespace {

using aaw::Matrix;
using aaw::Vector;
using nlohmann::json;

constexpr int kExitUsage = 64;
constexpr int kExitRuntime = 70;

struct CommonOptions {
  std::string example;
  std::vector<double> gain;
  std::vector<int> schedule;
  int steps_per_period = 4000;
  double tol_unit = 1e-6;
  double tol_margin = 1e-9;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool need_example) {
  auto* ex = cmd->add_option("--example", opt.example,
                             "built-in system name (ex41, ex42, ex42-ghat, "
                             "ex42-gbar)");
  if (need_example) ex->required();
  cmd->add_option("--gain", opt.gain,
                  "gain override, row-major comma list")
      ->delimiter(',');
  cmd->add_option("--schedule", opt.schedule,
                  "schedule override as wait,act,delay period counts")
      ->delimiter(',')
      ->expected(3);
  cmd->add_option("--steps-per-period", opt.steps_per_period,
                  "integration steps per period (even)");
  cmd->add_option("--tol-unit", opt.tol_unit,
                  "radius used to identify the structural unit multiplier");
  cmd->add_option("--tol-margin", opt.tol_margin,
                  "slack around the unit circle in the stability test");
  cmd->add_option("--out", opt.out_dir, "output directory for result files");
}

/// Resolved run setup shared by the analysis-style commands.
struct Run {
  const aaw::ExampleEntry* entry = nullptr;
  aaw::LinearPeriodicSystem linear;
  aaw::FeedbackLaw law;
  aaw::IntegratorConfig cfg;
  aaw::SpectralTolerances tol;
};

Run resolve(const CommonOptions& opt) {
  Run run;
  run.entry = &aaw::get_example(opt.example);
  run.linear = aaw::analysis_system(*run.entry);
  run.law = run.entry->law;
  if (!opt.schedule.empty()) {
    run.law.schedule = aaw::SwitchingSchedule{opt.schedule[0], opt.schedule[1],
                                              opt.schedule[2]};
    aaw::validate(run.law.schedule);
  }
  if (!opt.gain.empty()) {
    const auto m = run.linear.input_dim, n = run.linear.dim;
    if (static_cast<int>(opt.gain.size()) != m * n) {
      throw std::invalid_argument("gain override needs " +
                                  std::to_string(m * n) + " entries");
    }
    Matrix gain(m, n);
    for (int e = 0; e < m * n; ++e) gain(e / n, e % n) = opt.gain[e];
    run.law.gain = gain;
  }
  run.cfg.steps_per_period = opt.steps_per_period;
  aaw::validate(run.cfg);
  if (!(opt.tol_unit > 0.0) || !(opt.tol_margin >= 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  run.tol = aaw::SpectralTolerances{opt.tol_unit, opt.tol_margin};
  return run;
}

json meta_json(const std::string& command, const CommonOptions& opt) {
  json schedule = json::array();
  for (int v : opt.schedule) schedule.push_back(v);
  return json{{"tool", "floquet-aaw"},
              {"version", std::string(aaw::kVersion)},
              {"command", command},
              {"example", opt.example},
              {"steps_per_period", opt.steps_per_period},
              {"tol_unit", opt.tol_unit},
              {"tol_margin", opt.tol_margin},
              {"schedule_override", schedule}};
}

void emit(const json& payload, const std::string& out_dir,
          const std::string& filename, const json& meta) {
  if (out_dir.empty()) {
    std::cout << payload.dump(2) << "\n";
    return;
  }
  std::filesystem::create_directories(out_dir);
  aaw::write_text_file(out_dir + "/" + filename, payload.dump(2) + "\n");
  aaw::write_text_file(out_dir + "/meta.json", meta.dump(2) + "\n");
}

int verdict_exit(aaw::Verdict v) {
  switch (v) {
    case aaw::Verdict::ConvergesToPeriodic:
      return 0;
    case aaw::Verdict::Unstable:
      return 1;
    case aaw::Verdict::Inconclusive:
      return 2;
  }
  return kExitRuntime;
}

int cmd_analyze(const CommonOptions& opt) {
  const Run run = resolve(opt);
  const auto analysis =
      aaw::analyze_monodromy(run.linear, run.law, run.cfg, run.tol);
  json payload = aaw::report_json(analysis.report);
  payload["route_agreement_residual"] =
      analysis.route_agreement ? json(*analysis.route_agreement)
                               : json(nullptr);
  payload["system"] = json{{"name", run.entry->name},
                           {"description", run.entry->description}};
  emit(payload, opt.out_dir, "report.json", meta_json("analyze", opt));
  return verdict_exit(analysis.report.verdict);
}

int cmd_simulate(const CommonOptions& opt, std::vector<double> x0_flat,
                 int cycles) {
  const Run run = resolve(opt);
  const auto& entry = *run.entry;
  if (cycles < 1) throw std::invalid_argument("cycles must be at least 1");

  Vector x0 = entry.orbit.x_star(0.0);
  if (!x0_flat.empty()) {
    if (static_cast<int>(x0_flat.size()) != run.linear.dim) {
      throw std::invalid_argument("x0 needs " +
                                  std::to_string(run.linear.dim) + " entries");
    }
    for (int i = 0; i < run.linear.dim; ++i) x0(i) = x0_flat[i];
  }

  const std::string out_dir = opt.out_dir.empty() ? "." : opt.out_dir;
  std::filesystem::create_directories(out_dir);

  const auto result =
      entry.is_linear()
          ? aaw::run_closed_loop(std::get<aaw::LinearPeriodicSystem>(entry.system),
                                 run.law, x0, cycles, run.cfg)
          : aaw::run_closed_loop(
                std::get<aaw::NonlinearAutonomousSystem>(entry.system), run.law,
                x0, cycles, run.cfg);
  aaw::write_trajectory_csv(result.trajectory, out_dir + "/trajectory.csv");

  json payload;
  const json meta = meta_json("simulate", opt);
  if (result.divergence) {
    payload = json{{"error", "divergence"},
                   {"time", result.divergence->time},
                   {"norm", result.divergence->norm}};
    aaw::write_text_file(out_dir + "/limit.json", payload.dump(2) + "\n");
    aaw::write_text_file(out_dir + "/meta.json", meta.dump(2) + "\n");
    std::cerr << "state diverged at t=" << result.divergence->time
              << "; partial trajectory written\n";
    return kExitRuntime;
  }

  const auto analysis =
      aaw::analyze_monodromy(run.linear, run.law, run.cfg, run.tol);
  payload["verdict"] = aaw::to_string(analysis.report.verdict);

  // For nonlinear entries the cycle map acts on deviations from the orbit;
  // shift the prediction back into state space for reporting.
  const Vector base_point =
      entry.is_linear() ? Vector(Vector::Zero(run.linear.dim))
                        : entry.orbit.x_star(0.0);
  try {
    auto prediction =
        aaw::predict_limit(analysis.report.lambda, Vector(x0 - base_point),
                           run.tol);
    const Vector reference = aaw::unit_eigen_direction(entry);
    const double orbit_alpha =
        prediction.limit_point.dot(reference) / reference.squaredNorm();
    prediction.limit_point += base_point;

    payload["alphas"] = aaw::complex_vector_json(prediction.alphas);
    payload["kappa"] = prediction.kappa;
    payload["ill_conditioned"] = prediction.ill_conditioned;
    payload["limit_point"] = aaw::real_vector_json(prediction.limit_point);
    payload["orbit_alpha"] = orbit_alpha;
    if (cycles >= 3) {
      const double cycle_time =
          run.law.schedule.cycle_periods() * run.linear.period;
      const auto diag = aaw::convergence_diagnostics(result.trajectory,
                                                     prediction, cycle_time);
      payload["cycle_distances"] = diag.cycle_distances;
      payload["final_distance"] = diag.cycle_distances.back();
      payload["monotone_tail"] = diag.monotone_tail;
    }
  } catch (const aaw::PreconditionError& e) {
    payload["prediction_error"] = e.what();
  }

  aaw::write_text_file(out_dir + "/limit.json", payload.dump(2) + "\n");
  aaw::write_text_file(out_dir + "/meta.json", meta.dump(2) + "\n");
  return 0;
}

int cmd_search_gain(const CommonOptions& opt,
                    const std::vector<std::string>& box, int grid_points) {
  const Run run = resolve(opt);
  const auto m = run.linear.input_dim, n = run.linear.dim;
  if (static_cast<int>(box.size()) != m * n) {
    throw std::invalid_argument("--box needs " + std::to_string(m * n) +
                                " lo:hi ranges");
  }
  aaw::GainSearchSpec spec;
  spec.lower.resize(m, n);
  spec.upper.resize(m, n);
  for (int e = 0; e < m * n; ++e) {
    const auto& range = box[static_cast<size_t>(e)];
    const auto sep = range.find(':');
    if (sep == std::string::npos) {
      throw std::invalid_argument("box entry '" + range + "' is not lo:hi");
    }
    spec.lower(e / n, e % n) = std::stod(range.substr(0, sep));
    spec.upper(e / n, e % n) = std::stod(range.substr(sep + 1));
  }
  spec.grid_points = grid_points;

  const auto result =
      aaw::search(run.linear, run.law.schedule, spec, run.cfg, run.tol);
  emit(aaw::search_result_json(result), opt.out_dir, "search.json",
       meta_json("search-gain", opt));
  return 0;
}

int cmd_verify_paper(int steps_per_period) {
  aaw::IntegratorConfig cfg;
  cfg.steps_per_period = steps_per_period;
  aaw::validate(cfg);
  const auto rows = aaw::run_acceptance_suite(cfg);
  std::cout << aaw::format_criteria_table(rows);
  for (const auto& r : rows) {
    if (!r.pass) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "act-and-wait delayed feedback control: monodromy construction, "
      "Floquet stability verdicts, closed-loop simulation, and gain search"};
  app.require_subcommand(1);

  CommonOptions analyze_opt, simulate_opt, search_opt;
  std::vector<double> x0;
  int cycles = 30;
  std::vector<std::string> box;
  int grid_points = 21;
  int verify_steps = 4000;

  auto* analyze = app.add_subcommand(
      "analyze", "cycle map, multipliers, and stability verdict");
  add_common(analyze, analyze_opt, true);

  auto* simulate = app.add_subcommand(
      "simulate", "closed-loop trajectory plus limit prediction");
  add_common(simulate, simulate_opt, true);
  simulate->add_option("--x0", x0, "initial state (default: orbit point)")
      ->delimiter(',');
  simulate->add_option("--cycles", cycles, "number of act-and-wait cycles");

  auto* search = app.add_subcommand(
      "search-gain", "grid + simplex search for a stabilizing gain");
  add_common(search, search_opt, true);
  search
      ->add_option("--box", box,
                   "per-entry gain bounds lo:hi, row-major, comma separated")
      ->delimiter(',')
      ->required();
  search->add_option("--grid-points", grid_points, "grid points per entry");

  auto* verify = app.add_subcommand(
      "verify-paper", "run the full reproduction suite and print the table");
  verify->add_option("--steps-per-period", verify_steps,
                     "integration steps per period (even)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_opt);
    if (simulate->parsed()) return cmd_simulate(simulate_opt, x0, cycles);
    if (search->parsed()) return cmd_search_gain(search_opt, box, grid_points);
    return cmd_verify_paper(verify_steps);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
