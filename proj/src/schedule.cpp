#include "hydro/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "hydro/routing.hpp"
#include "hydro/simulate.hpp"

namespace hydro {

namespace {

constexpr double kSecondsPerHour = 3600.0;

std::vector<std::vector<double>> constant_table(const ValidatedModel& model,
                                                const Scenario& scenario,
                                                const std::vector<double>& plant_ke) {
  if (static_cast<int>(plant_ke.size()) != model.n_plants())
    fail(Errc::MissingKe, "expected " + std::to_string(model.n_plants()) +
                              " plant coefficients, got " + std::to_string(plant_ke.size()));
  for (double ke : plant_ke)
    if (!std::isfinite(ke)) fail(Errc::MissingKe, "non-finite plant coefficient");
  std::vector<std::vector<double>> table(model.n_plants(),
                                         std::vector<double>(scenario.n_hours));
  for (int p = 0; p < model.n_plants(); ++p)
    std::fill(table[p].begin(), table[p].end(), plant_ke[p]);
  return table;
}

/// Necessary-condition screen so infeasibility comes back with a readable
/// diagnosis instead of a bare solver status.
void screen_necessary_conditions(const ValidatedModel& model, const Scenario& scenario) {
  const int n = scenario.n_hours;
  for (int res = 0; res < model.n_reservoirs(); ++res) {
    const Reservoir& r = model.reservoirs()[res];
    double total_inflow = 0.0;
    for (int k = 0; k < n; ++k) total_inflow += scenario.inflows[res][k];

    double max_arrivals = 0.0;
    for (int p : model.upstream_plants(res))
      max_arrivals += model.effective_t_max(model.plant_upstream_res(p)) * n;

    double max_outflow = (model.has_release(res) ? model.effective_t_max(res) * n : 0.0);
    if (r.spill.allowed)
      max_outflow += std::isfinite(r.spill.cap) ? r.spill.cap * n : kInfinity;

    double v_highest = r.v_start + kSecondsPerHour * (total_inflow + max_arrivals);
    double v_lowest = r.v_start + kSecondsPerHour * (total_inflow - max_outflow);

    std::ostringstream os;
    if (v_highest < r.terminal.v_lo) {
      os << "terminal volume unreachable: reservoir '" << r.id << "' needs at least "
         << r.terminal.v_lo << " m^3 but can end with at most " << v_highest
         << " m^3 (start " << r.v_start << ", total inflow " << total_inflow
         << " m^3/s-h, max routed arrivals " << max_arrivals << " m^3/s-h)";
      fail(Errc::InfeasibleSchedule, os.str());
    }
    if (std::isfinite(r.terminal.v_hi) && v_lowest > r.terminal.v_hi) {
      os << "terminal volume unreachable: reservoir '" << r.id << "' must end at or below "
         << r.terminal.v_hi << " m^3 but cannot drain below " << v_lowest
         << " m^3 (outflow capacity " << max_outflow << " m^3/s-h over " << n << " h)";
      fail(Errc::InfeasibleSchedule, os.str());
    }
  }
}

}  // namespace

BuiltProblem build_lp_frozen(const ValidatedModel& model, const Scenario& scenario,
                             const ProblemOptions& /*options*/,
                             const std::vector<std::vector<double>>& plant_hour_ke) {
  validate_scenario(model, scenario);
  if (scenario.n_hours <= 0) fail(Errc::HorizonZero, "cannot build a zero-hour problem");
  const int n = scenario.n_hours;
  const int nr = model.n_reservoirs();

  if (static_cast<int>(plant_hour_ke.size()) != model.n_plants())
    fail(Errc::MissingKe, "coefficient table needs one series per plant");
  for (const auto& series : plant_hour_ke)
    if (static_cast<int>(series.size()) != n)
      fail(Errc::MissingKe, "coefficient table series length != n_hours");

  BuiltProblem built;
  LinearProgram& lp = built.lp;
  VariableMap& map = built.map;
  map.n_hours = n;
  map.x_base.assign(nr, -1);
  map.y_base.assign(nr, -1);

  // Chain revenue coefficient of reservoir res at hour k (0-based).
  auto chain_ke = [&](int res, int k) {
    double sum = 0.0;
    for (int p : model.down(res)) sum += plant_hour_ke[p][k];
    return sum;
  };

  for (int res = 0; res < nr; ++res) {
    if (!model.has_release(res)) continue;
    map.x_base[res] = lp.n_vars;
    for (int k = 0; k < n; ++k)
      lp.add_variable(0.0, model.effective_t_max(res), scenario.prices[k] * chain_ke(res, k));
  }
  for (int res = 0; res < nr; ++res) {
    const SpillPolicy& spill = model.reservoirs()[res].spill;
    if (!spill.allowed) continue;
    map.y_base[res] = lp.n_vars;
    for (int k = 0; k < n; ++k)
      lp.add_variable(0.0, spill.cap, -scenario.prices[k] * chain_ke(res, k));
  }

  // Volume rows, in m^3/s-hour units:
  //   V_k = v_start + 3600 (cum inflow + activity), so
  //   activity >= (v_min - v_start)/3600 - cum_inflow  (and <= for v_max),
  // where activity = -cum x - cum y + routed cumulative arrivals.
  for (int res = 0; res < nr; ++res) {
    const Reservoir& r = model.reservoirs()[res];
    double cum_inflow = 0.0;
    for (int k = 1; k <= n; ++k) {
      cum_inflow += scenario.inflows[res][k - 1];
      std::map<int, double> coeffs;
      if (map.has_x(res))
        for (int l = 1; l <= k; ++l) coeffs[map.x_index(res, l)] -= 1.0;
      if (map.has_y(res))
        for (int l = 1; l <= k; ++l) coeffs[map.y_index(res, l)] -= 1.0;
      for (int p : model.upstream_plants(res)) {
        ArrivalWeights w = arrival_weights(model.plants()[p].t_c);
        int up = model.plant_upstream_res(p);
        for (int l = 1; l <= k - w.lag_lo && l <= n; ++l)
          coeffs[map.x_index(up, l)] += w.w_lo;
        if (w.w_hi != 0.0)
          for (int l = 1; l <= k - w.lag_hi && l <= n; ++l)
            coeffs[map.x_index(up, l)] += w.w_hi;
      }
      std::vector<std::pair<int, double>> row(coeffs.begin(), coeffs.end());

      double rhs_min = (r.v_min - r.v_start) / kSecondsPerHour - cum_inflow;
      map.volume_rows.push_back({static_cast<int>(lp.rows.size()), res, k, true});
      lp.add_row(Relation::GreaterEq, rhs_min, row);

      double rhs_max = (r.v_max - r.v_start) / kSecondsPerHour - cum_inflow;
      map.volume_rows.push_back({static_cast<int>(lp.rows.size()), res, k, false});
      lp.add_row(Relation::LessEq, rhs_max, std::move(row));

      if (k == n) {
        // Terminal window rides on the same cumulative activity.
        std::vector<std::pair<int, double>> trow(coeffs.begin(), coeffs.end());
        const TerminalTarget& t = r.terminal;
        auto rhs_for = [&](double v) { return (v - r.v_start) / kSecondsPerHour - cum_inflow; };
        switch (t.mode) {
          case TerminalTarget::Mode::Exact:
            map.terminal_rows.push_back({static_cast<int>(lp.rows.size()), res, Relation::Eq});
            lp.add_row(Relation::Eq, rhs_for(t.v_lo), std::move(trow));
            break;
          case TerminalTarget::Mode::AtLeast:
            map.terminal_rows.push_back(
                {static_cast<int>(lp.rows.size()), res, Relation::GreaterEq});
            lp.add_row(Relation::GreaterEq, rhs_for(t.v_lo), std::move(trow));
            break;
          case TerminalTarget::Mode::Window:
            map.terminal_rows.push_back(
                {static_cast<int>(lp.rows.size()), res, Relation::GreaterEq});
            lp.add_row(Relation::GreaterEq, rhs_for(t.v_lo), trow);
            map.terminal_rows.push_back(
                {static_cast<int>(lp.rows.size()), res, Relation::LessEq});
            lp.add_row(Relation::LessEq, rhs_for(t.v_hi), std::move(trow));
            break;
        }
      }
    }
  }

  lp.validate();
  return built;
}

BuiltProblem build_lp(const ValidatedModel& model, const Scenario& scenario,
                      const ProblemOptions& options, const std::vector<double>& plant_ke) {
  return build_lp_frozen(model, scenario, options, constant_table(model, scenario, plant_ke));
}

double eval_ke(const KeModel& ke, double h) { return ke.evaluate(h); }

Schedule extract_schedule(const LpSolution& solution, const VariableMap& map,
                          const ValidatedModel& model) {
  if (solution.status != LpStatus::Optimal)
    fail(Errc::NotOptimal, "cannot extract a schedule from a non-optimal solution");

  auto cleaned = [&](int idx) {
    double v = solution.values[idx];
    if (v < 0.0) {
      if (v <= -1e-7)
        fail(Errc::InternalError, "solution value " + std::to_string(v) +
                                      " violates a lower bound beyond tolerance");
      return 0.0;
    }
    return v;
  };

  Schedule schedule =
      Schedule::zeros(model.n_plants(), model.n_reservoirs(), map.n_hours);
  for (int res = 0; res < model.n_reservoirs(); ++res) {
    if (map.has_x(res)) {
      for (int k = 1; k <= map.n_hours; ++k) {
        double v = cleaned(map.x_index(res, k));
        for (int p : model.down(res)) schedule.turbine[p][k - 1] = v;
      }
    }
    if (map.has_y(res))
      for (int k = 1; k <= map.n_hours; ++k)
        schedule.spill[res][k - 1] = cleaned(map.y_index(res, k));
  }
  return schedule;
}

namespace {

/// Solves a built problem, applying the semicontinuous reformulation first
/// when requested. Maps solver statuses onto scheduling errors.
LpSolution solve_built(BuiltProblem& built, const ValidatedModel& model,
                       const ProblemOptions& options) {
  std::vector<int> binaries;
  if (options.semicontinuous) {
    for (int res = 0; res < model.n_reservoirs(); ++res) {
      if (!built.map.has_x(res)) continue;
      double l = model.effective_t_min(res);
      if (l <= 0.0) continue;
      double u = model.effective_t_max(res);
      for (int k = 1; k <= built.map.n_hours; ++k)
        binaries.push_back(
            semicontinuous_reformulate(built.lp, built.map.x_index(res, k), l, u));
    }
  }

  LpSolution sol = binaries.empty() ? solve_lp(built.lp, options.lp)
                                    : solve_milp(built.lp, binaries, options.lp);
  if (sol.status == LpStatus::Unbounded)
    fail(Errc::UnboundedModel,
         "objective is unbounded; the model is missing a flow or volume limit");
  if (sol.status == LpStatus::Infeasible)
    fail(Errc::InfeasibleSchedule,
         "no hourly schedule satisfies the volume, terminal and flow constraints "
         "simultaneously (the necessary-condition screen passed; the conflict is "
         "in the hour-by-hour interplay)");
  return sol;
}

}  // namespace

OptimizeResult optimize_constant_ke(const ValidatedModel& model, const Scenario& scenario,
                                    const std::vector<double>& plant_ke,
                                    const ProblemOptions& options) {
  validate_scenario(model, scenario);
  screen_necessary_conditions(model, scenario);
  BuiltProblem built = build_lp(model, scenario, options, plant_ke);
  LpSolution sol = solve_built(built, model, options);
  OptimizeResult result;
  result.schedule = extract_schedule(sol, built.map, model);
  result.objective = sol.objective_value;
  return result;
}

SlpResult optimize_polynomial_ke(const ValidatedModel& model, const Scenario& scenario,
                                 const ProblemOptions& options) {
  validate_scenario(model, scenario);
  screen_necessary_conditions(model, scenario);
  const int n = scenario.n_hours;

  for (int p = 0; p < model.n_plants(); ++p) {
    const Plant& plant = model.plants()[p];
    if (plant.ke.kind == KeModel::Kind::Polynomial &&
        !model.reservoirs()[model.plant_upstream_res(p)].gauge)
      fail(Errc::MissingGauge, "plant '" + plant.id + "' has no gauge curve upstream");
  }

  Schedule schedule = Schedule::zeros(model.n_plants(), model.n_reservoirs(), n);
  SlpResult result;

  for (int iter = 0; iter < options.slp.max_iters; ++iter) {
    // Freeze each plant's coefficient at the start-of-hour height of its
    // upstream reservoir under the current schedule. Volumes outside the
    // gauge span (possible for intermediate, infeasible iterates) clamp.
    VolumeTrajectory traj = simulate_volumes(model, scenario, schedule);
    std::vector<std::vector<double>> table(model.n_plants(), std::vector<double>(n));
    for (int p = 0; p < model.n_plants(); ++p) {
      const Plant& plant = model.plants()[p];
      int up = model.plant_upstream_res(p);
      for (int k = 0; k < n; ++k) {
        double h = 0.0;
        if (plant.ke.kind == KeModel::Kind::Polynomial)
          h = model.reservoirs()[up].gauge->height_clamped(traj.volumes[up][k]);
        table[p][k] = plant.ke.evaluate(h);
      }
    }

    BuiltProblem built = build_lp_frozen(model, scenario, options, table);
    LpSolution sol = solve_built(built, model, options);
    Schedule next = extract_schedule(sol, built.map, model);

    double step = 0.0;
    for (int p = 0; p < model.n_plants(); ++p)
      for (int k = 0; k < n; ++k)
        step = std::max(step, std::abs(next.turbine[p][k] - schedule.turbine[p][k]));
    for (int res = 0; res < model.n_reservoirs(); ++res)
      for (int k = 0; k < n; ++k)
        step = std::max(step, std::abs(next.spill[res][k] - schedule.spill[res][k]));

    result.trace.steps.push_back(SlpStep{sol.objective_value, step});
    schedule = std::move(next);
    if (step < options.slp.tol) {
      result.trace.converged = true;
      break;
    }
  }

  result.schedule = std::move(schedule);
  VolumeTrajectory traj = simulate_volumes(model, scenario, result.schedule);
  result.objective = revenue(model, scenario, result.schedule, traj);
  return result;
}

}  // namespace hydro
