#pragma once

#include <vector>

#include "hydro/lp.hpp"
#include "hydro/model.hpp"

namespace hydro {

enum class KeMode { Constant, Polynomial };

struct SlpParams {
  int max_iters = 50;
  double tol = 1e-4;  // m^3/s, on the largest schedule change per iteration
};

struct ProblemOptions {
  KeMode ke_mode = KeMode::Constant;
  bool semicontinuous = false;  // enforce t_min > 0 through binaries
  SlpParams slp;
  LpTolerances lp;
};

/// Where each decision variable and each volume row landed in the LP.
struct VariableMap {
  int n_hours = 0;
  std::vector<int> x_base;  // per reservoir; -1 when it has no release chain
  std::vector<int> y_base;  // per reservoir; -1 when spill is not allowed

  int x_index(int res, int hour) const { return x_base[res] + hour - 1; }  // hour 1-based
  int y_index(int res, int hour) const { return y_base[res] + hour - 1; }
  bool has_x(int res) const { return x_base[res] >= 0; }
  bool has_y(int res) const { return y_base[res] >= 0; }

  struct VolumeRow {
    int row;
    int res;
    int hour;       // 1-based
    bool is_lower;  // true: V_k >= v_min row, false: V_k <= v_max row
  };
  std::vector<VolumeRow> volume_rows;

  struct TerminalRow {
    int row;
    int res;
    Relation rel;
  };
  std::vector<TerminalRow> terminal_rows;
};

struct BuiltProblem {
  LinearProgram lp;
  VariableMap map;
};

/// Discretizes the scheduling problem: per reservoir and hour two rows
/// bracketing the cumulative volume balance between v_min and v_max (in
/// m^3/s-hour units, volumes divided by 3600), terminal rows at the last
/// hour, bounds [0, effective t_max] on releases and [0, cap] on spills.
/// Objective: sum_k P_k (KeChain_i x_k^i - KeChain_i y_k^i), maximized.
/// `plant_ke` holds one constant coefficient per plant.
BuiltProblem build_lp(const ValidatedModel& model, const Scenario& scenario,
                      const ProblemOptions& options, const std::vector<double>& plant_ke);

/// Same construction with a per-plant, per-hour coefficient table (used by
/// the successive linearization loop, which freezes Ke(h) each iteration).
BuiltProblem build_lp_frozen(const ValidatedModel& model, const Scenario& scenario,
                             const ProblemOptions& options,
                             const std::vector<std::vector<double>>& plant_hour_ke);

struct OptimizeResult {
  Schedule schedule;
  double objective = 0.0;
};

/// Solves the constant-coefficient problem. Throws InfeasibleSchedule with a
/// diagnosis (a terminal-reachability screen runs first) or UnboundedModel.
OptimizeResult optimize_constant_ke(const ValidatedModel& model, const Scenario& scenario,
                                    const std::vector<double>& plant_ke,
                                    const ProblemOptions& options = {});

struct SlpStep {
  double frozen_objective;  // optimum of that iteration's linearized problem
  double step;              // max |x_new - x_old| over all decision series
};

struct SlpTrace {
  std::vector<SlpStep> steps;
  bool converged = false;
};

struct SlpResult {
  Schedule schedule;
  double objective = 0.0;  // nonlinear objective of the returned schedule
  SlpTrace trace;
};

/// Successive linear programming for height-dependent coefficients: start
/// from the all-zero schedule, simulate volumes, freeze Ke at each hour's
/// start-of-hour gauge height, solve the frozen problem, repeat until the
/// schedule moves less than slp.tol or max_iters is reached (reported via
/// trace.converged; the last iterate is returned either way). A local
/// method: no global optimality claim for the nonconvex problem.
SlpResult optimize_polynomial_ke(const ValidatedModel& model, const Scenario& scenario,
                                 const ProblemOptions& options = {});

/// eta * sum_j gamma_j h^j (constant kind ignores h).
double eval_ke(const KeModel& ke, double h);

/// Reads the decision variables back out of an optimal solution. Negative
/// roundoff within 1e-7 is clamped to zero; anything more negative is a
/// corrupted solution (InternalError). Throws NotOptimal on other statuses.
Schedule extract_schedule(const LpSolution& solution, const VariableMap& map,
                          const ValidatedModel& model);

}  // namespace hydro
