#pragma once

#include <utility>
#include <vector>

#include "hydro/errors.hpp"

namespace hydro {

enum class Relation { LessEq, Eq, GreaterEq };

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Central numeric knobs of the solver. Defaults are used everywhere unless
/// a caller overrides them.
struct LpTolerances {
  double pivot = 1e-9;        // smallest usable pivot element
  double feasibility = 1e-7;  // absolute, on rows normalized by max |coeff|
  double integrality = 1e-6;  // |z - round(z)| for binaries
  double reduced_cost = 1e-9;
  int bland_after = 1000;     // degenerate pivots before switching to Bland's rule
  long node_limit = 1000000;  // branch-and-bound budget
};

/// Sparse maximization LP with per-variable bounds. Upper bounds may be
/// +infinity; lower bounds must be finite (every variable here is a flow or
/// a slack-like quantity with a floor).
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
  };

  int n_vars = 0;
  std::vector<double> objective;  // maximize objective . z
  std::vector<double> lower, upper;
  std::vector<Row> rows;

  int add_variable(double lo, double hi, double obj);
  void add_row(Relation rel, double rhs, std::vector<std::pair<int, double>> coeffs);
  /// Index bounds and lo <= hi. Throws BadBounds.
  void validate() const;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
};

/// Bounded-variable two-phase primal simplex. Dantzig pricing with ties
/// broken toward the lowest variable index; Bland's rule takes over after
/// LpTolerances::bland_after degenerate pivots. Deterministic.
LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol = {});

/// Depth-first branch and bound over the given binary variables (bounds must
/// lie within [0, 1]), pruning against the incumbent. Throws
/// NodeLimitExceeded past the node budget.
LpSolution solve_milp(const LinearProgram& lp, const std::vector<int>& binaries,
                      const LpTolerances& tol = {});

/// Rewrites variable `var` (currently bounded [0, u]) as a semicontinuous
/// quantity: x = 0 or l <= x <= u, by appending one binary variable y and
/// the rows x <= u y, x >= l y. Returns the index of y.
/// Throws BadBounds for l <= 0, l > u, or when var is not bounded [0, u].
int semicontinuous_reformulate(LinearProgram& lp, int var, double l, double u);

}  // namespace hydro
