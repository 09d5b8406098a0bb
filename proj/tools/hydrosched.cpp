// Command-line front end: solve a day, check a schedule, or simulate one.
// Exit codes: 0 success, 1 usage/parse/validation problem, 2 infeasible.

#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hydro/io.hpp"
#include "hydro/model.hpp"
#include "hydro/schedule.hpp"
#include "hydro/simulate.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

struct SolveOptions {
  std::string model_path;
  std::vector<std::string> scenario_paths;
  std::string out_dir = "out";
  std::string ke_mode = "constant";
  std::vector<std::string> ke_overrides;  // plant=value
  bool semicontinuous = false;
  int slp_max_iters = 50;
  double slp_tol = 1e-4;
  double check_tol = 1e-6;
  int jobs = 1;
};

std::vector<double> resolve_ke(const hydro::ValidatedModel& model,
                               const std::vector<std::string>& overrides) {
  std::vector<double> ke(model.n_plants(), 1.0);
  for (const std::string& spec : overrides) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
      hydro::fail(hydro::Errc::ParseError, "--ke expects <plant>=<value>, got '" + spec + "'");
    std::string id = spec.substr(0, eq);
    int p = model.plant_index(id);
    if (p < 0) hydro::fail(hydro::Errc::ParseError, "--ke names unknown plant '" + id + "'");
    char* end = nullptr;
    ke[p] = std::strtod(spec.c_str() + eq + 1, &end);
    if (end == spec.c_str() + eq + 1 || *end != '\0')
      hydro::fail(hydro::Errc::ParseError, "--ke value is not a number in '" + spec + "'");
  }
  return ke;
}

void print_report(const hydro::FeasibilityReport& report, std::ostream& os) {
  if (report.feasible) {
    os << "feasible: yes\n";
    return;
  }
  os << "feasible: no (" << report.violations.size() << " violations)\n";
  for (const auto& v : report.violations)
    os << "  " << hydro::violation_kind_name(v.kind) << ' ' << v.id << " hour " << v.hour
       << ": " << v.magnitude << "\n";
}

int solve_one(const hydro::ValidatedModel& model, const SolveOptions& opt,
              const fs::path& scenario_path, const fs::path& out_dir) {
  hydro::Scenario scenario = hydro::load_scenario(scenario_path, model);

  hydro::ProblemOptions popt;
  popt.semicontinuous = opt.semicontinuous;
  popt.slp.max_iters = opt.slp_max_iters;
  popt.slp.tol = opt.slp_tol;

  hydro::Schedule schedule;
  double objective = 0.0;
  hydro::SlpTrace trace;
  const hydro::SlpTrace* trace_ptr = nullptr;

  if (opt.ke_mode == "polynomial") {
    popt.ke_mode = hydro::KeMode::Polynomial;
    hydro::SlpResult result = hydro::optimize_polynomial_ke(model, scenario, popt);
    schedule = std::move(result.schedule);
    objective = result.objective;
    trace = std::move(result.trace);
    trace_ptr = &trace;
  } else {
    std::vector<double> ke = resolve_ke(model, opt.ke_overrides);
    hydro::OptimizeResult result = hydro::optimize_constant_ke(model, scenario, ke, popt);
    schedule = std::move(result.schedule);
    objective = result.objective;
  }

  hydro::VolumeTrajectory traj = hydro::simulate_volumes(model, scenario, schedule);
  hydro::FeasibilityReport report =
      hydro::check_feasibility(model, scenario, schedule, opt.check_tol);
  hydro::emit_results(out_dir, model, scenario, schedule, traj, report, objective, "optimal",
                      trace_ptr);

  std::cout << scenario_path.filename().string() << ": objective " << objective << ", results in "
            << out_dir.string() << "\n";
  if (!report.feasible) {
    print_report(report, std::cerr);
    return kExitInfeasible;
  }
  return kExitOk;
}

int run_solve(const SolveOptions& opt) {
  hydro::ValidatedModel model = hydro::validate_model(hydro::load_model(opt.model_path));

  struct Job {
    fs::path scenario;
    fs::path out;
  };
  std::vector<Job> jobs;
  const bool single = opt.scenario_paths.size() == 1;
  for (const std::string& s : opt.scenario_paths) {
    fs::path sp(s);
    jobs.push_back({sp, single ? fs::path(opt.out_dir) : fs::path(opt.out_dir) / sp.stem()});
  }

  int worst = kExitOk;
  const int width = std::max(1, opt.jobs);
  for (std::size_t base = 0; base < jobs.size(); base += width) {
    std::vector<std::future<int>> batch;
    for (std::size_t i = base; i < std::min(jobs.size(), base + width); ++i)
      batch.push_back(std::async(std::launch::async, [&, i] {
        return solve_one(model, opt, jobs[i].scenario, jobs[i].out);
      }));
    for (auto& f : batch) worst = std::max(worst, f.get());
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead scheduler for cascaded hydro reservoirs"};
  app.require_subcommand(1);

  SolveOptions opt;
  std::string schedule_path;

  CLI::App* solve = app.add_subcommand("solve", "Optimize a day and emit result files");
  solve->add_option("--model", opt.model_path, "Model file")->required();
  solve->add_option("--scenario", opt.scenario_paths, "Scenario CSV (repeatable)")->required();
  solve->add_option("--out", opt.out_dir, "Output directory");
  solve->add_option("--ke-mode", opt.ke_mode, "constant|polynomial")
      ->check(CLI::IsMember({"constant", "polynomial"}));
  solve->add_option("--ke", opt.ke_overrides, "Constant coefficient, <plant>=<value>");
  solve->add_flag("--semicontinuous", opt.semicontinuous, "Enforce t_min > 0 via binaries");
  solve->add_option("--slp-max-iters", opt.slp_max_iters, "Linearization iteration cap");
  solve->add_option("--slp-tol", opt.slp_tol, "Linearization step tolerance [m^3/s]");
  solve->add_option("--tol", opt.check_tol, "Relative feasibility tolerance");
  solve->add_option("--jobs", opt.jobs, "Scenarios optimized concurrently");

  CLI::App* check = app.add_subcommand("check", "Check feasibility of a schedule CSV");
  check->add_option("--model", opt.model_path, "Model file")->required();
  check->add_option("--scenario", opt.scenario_paths, "Scenario CSV")->required();
  check->add_option("--schedule", schedule_path, "Schedule CSV")->required();
  check->add_option("--tol", opt.check_tol, "Relative feasibility tolerance");

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate volumes under a schedule CSV");
  simulate->add_option("--model", opt.model_path, "Model file")->required();
  simulate->add_option("--scenario", opt.scenario_paths, "Scenario CSV")->required();
  simulate->add_option("--schedule", schedule_path, "Schedule CSV")->required();
  simulate->add_option("--out", opt.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return run_solve(opt);

    hydro::ValidatedModel model = hydro::validate_model(hydro::load_model(opt.model_path));
    hydro::Scenario scenario = hydro::load_scenario(opt.scenario_paths.front(), model);
    hydro::Schedule schedule = hydro::load_schedule(schedule_path, model);

    if (check->parsed()) {
      hydro::FeasibilityReport report =
          hydro::check_feasibility(model, scenario, schedule, opt.check_tol);
      print_report(report, std::cout);
      return report.feasible ? kExitOk : kExitInfeasible;
    }

    // simulate
    hydro::VolumeTrajectory traj = hydro::simulate_volumes(model, scenario, schedule);
    fs::create_directories(opt.out_dir);
    fs::path path = fs::path(opt.out_dir) / "volumes.csv";
    std::ofstream out(path);
    if (!out) hydro::fail(hydro::Errc::IoError, "cannot write '" + path.string() + "'");
    out << "hour";
    for (const auto& r : model.reservoirs()) out << ",V_" << r.id;
    out << "\n";
    char buf[64];
    for (int k = 0; k <= scenario.n_hours; ++k) {
      out << k;
      for (int res = 0; res < model.n_reservoirs(); ++res) {
        std::snprintf(buf, sizeof buf, "%.3f", traj.volumes[res][k]);
        out << ',' << buf;
      }
      out << "\n";
    }
    std::cout << "volumes written to " << path.string() << "\n";
    return kExitOk;
  } catch (const hydro::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == hydro::Errc::InfeasibleSchedule ? kExitInfeasible : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
