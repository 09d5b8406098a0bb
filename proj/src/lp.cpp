#include "hydro/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace hydro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int LinearProgram::add_variable(double lo, double hi, double obj) {
  lower.push_back(lo);
  upper.push_back(hi);
  objective.push_back(obj);
  return n_vars++;
}

void LinearProgram::add_row(Relation rel, double rhs, std::vector<std::pair<int, double>> coeffs) {
  rows.push_back(Row{std::move(coeffs), rel, rhs});
}

void LinearProgram::validate() const {
  if (static_cast<int>(objective.size()) != n_vars ||
      static_cast<int>(lower.size()) != n_vars || static_cast<int>(upper.size()) != n_vars)
    fail(Errc::BadBounds, "objective/bounds arrays out of sync with n_vars");
  for (int j = 0; j < n_vars; ++j) {
    if (!(lower[j] <= upper[j]))
      fail(Errc::BadBounds, "variable " + std::to_string(j) + ": lower > upper");
    if (!std::isfinite(lower[j]))
      fail(Errc::BadBounds, "variable " + std::to_string(j) + ": lower bound must be finite");
  }
  for (const Row& row : rows) {
    if (!std::isfinite(row.rhs)) fail(Errc::BadBounds, "non-finite rhs");
    for (auto [j, c] : row.coeffs) {
      if (j < 0 || j >= n_vars)
        fail(Errc::BadBounds, "row references variable " + std::to_string(j));
      if (!std::isfinite(c)) fail(Errc::BadBounds, "non-finite coefficient");
    }
  }
}

namespace {

enum class State : std::uint8_t { Basic, AtLower, AtUpper };

/// Dense two-phase tableau. Problem sizes here stay in the low hundreds of
/// variables, so Gauss-Jordan updates on the full matrix are adequate and
/// keep the implementation dependency-free and deterministic.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpTolerances& tol) : lp_(lp), tol_(tol) {
    build();
  }

  LpStatus run() {
    // Phase 1: drive artificial infeasibility to zero.
    if (n_art_ > 0) {
      LpStatus s = iterate(wcost_);
      if (s != LpStatus::Optimal)
        fail(Errc::SolverStall, "phase 1 terminated " + std::string(s == LpStatus::Unbounded
                                                                        ? "unbounded"
                                                                        : "abnormally"));
      if (artificial_residual() > tol_.feasibility) return LpStatus::Infeasible;
      // Pin artificials at zero for phase 2.
      for (int j = n_art_base_; j < n_total_; ++j) lo_[j] = hi_[j] = 0.0;
    }
    LpStatus s = iterate(cost_);
    if (s == LpStatus::Optimal) verify();
    return s;
  }

  std::vector<double> solution() const {
    std::vector<double> vals = values();
    vals.resize(lp_.n_vars);
    return vals;
  }

  double objective() const {
    std::vector<double> vals = values();
    double obj = 0.0;
    for (int j = 0; j < lp_.n_vars; ++j) obj += lp_.objective[j] * vals[j];
    return obj;
  }

 private:
  const LinearProgram& lp_;
  LpTolerances tol_;

  int m_ = 0;        // rows
  int n_total_ = 0;  // structural + slack + artificial columns
  int n_art_ = 0;
  int n_art_base_ = 0;

  std::vector<double> a_;      // m x n_total, row major
  std::vector<double> b_;      // transformed rhs
  std::vector<double> lo_, hi_;
  std::vector<double> cost_;   // phase 2 (maximize)
  std::vector<double> wcost_;  // phase 1 (maximize -sum of artificials)
  std::vector<State> state_;
  std::vector<int> basis_;     // row -> column
  long degenerate_ = 0;
  bool bland_ = false;

  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * n_total_ + c]; }
  double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_total_ + c]; }

  void build() {
    m_ = static_cast<int>(lp_.rows.size());
    const int n = lp_.n_vars;

    // Column layout: structural | one slack per inequality | artificials.
    int n_slack = 0;
    for (const auto& row : lp_.rows)
      if (row.rel != Relation::Eq) ++n_slack;
    n_art_base_ = n + n_slack;
    n_total_ = n_art_base_;  // artificials appended below as needed

    lo_ = lp_.lower;
    hi_ = lp_.upper;
    cost_ = lp_.objective;
    lo_.resize(n_art_base_);
    hi_.resize(n_art_base_);
    cost_.resize(n_art_base_, 0.0);
    state_.assign(n_art_base_, State::AtLower);

    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(lo_[j]))
        fail(Errc::BadBounds, "free variables are not supported by the solver");
      state_[j] = State::AtLower;
    }

    a_.assign(static_cast<std::size_t>(m_) * n_art_base_, 0.0);
    b_.resize(m_);
    basis_.assign(m_, -1);

    int slack = n;
    std::vector<int> slack_of(m_, -1);
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      for (auto [j, c] : row.coeffs) at(i, j) += c;
      b_[i] = row.rhs;
      if (row.rel == Relation::LessEq) {
        at(i, slack) = 1.0;
        lo_[slack] = 0.0;
        hi_[slack] = kInf;
        state_[slack] = State::AtLower;
        slack_of[i] = slack++;
      } else if (row.rel == Relation::GreaterEq) {
        // a.z + s = rhs with s <= 0
        at(i, slack) = 1.0;
        lo_[slack] = -kInf;
        hi_[slack] = 0.0;
        state_[slack] = State::AtUpper;
        slack_of[i] = slack++;
      }
    }

    // Initial basis: reuse the slack where its sign admits the residual,
    // otherwise add an artificial column carrying |residual|.
    std::vector<double> art_col_sign;
    std::vector<int> art_row;
    for (int i = 0; i < m_; ++i) {
      double residual = b_[i];
      for (int j = 0; j < n_art_base_; ++j) {
        if (j == slack_of[i]) continue;
        double v = nonbasic_value(j);
        if (v != 0.0) residual -= at(i, j) * v;
      }
      const auto& row = lp_.rows[i];
      bool slack_ok = slack_of[i] >= 0 &&
                      ((row.rel == Relation::LessEq && residual >= 0.0) ||
                       (row.rel == Relation::GreaterEq && residual <= 0.0));
      if (slack_ok) {
        basis_[i] = slack_of[i];
        state_[slack_of[i]] = State::Basic;
      } else {
        art_row.push_back(i);
        art_col_sign.push_back(residual >= 0.0 ? 1.0 : -1.0);
      }
    }

    n_art_ = static_cast<int>(art_row.size());
    if (n_art_ > 0) {
      n_total_ = n_art_base_ + n_art_;
      std::vector<double> wide(static_cast<std::size_t>(m_) * n_total_, 0.0);
      for (int i = 0; i < m_; ++i)
        std::copy_n(a_.begin() + static_cast<std::size_t>(i) * n_art_base_, n_art_base_,
                    wide.begin() + static_cast<std::size_t>(i) * n_total_);
      a_ = std::move(wide);
      lo_.resize(n_total_, 0.0);
      hi_.resize(n_total_, kInf);
      cost_.resize(n_total_, 0.0);
      state_.resize(n_total_, State::Basic);
      for (int k = 0; k < n_art_; ++k) {
        int col = n_art_base_ + k;
        at(art_row[k], col) = art_col_sign[k];
        basis_[art_row[k]] = col;
      }
    } else {
      n_total_ = n_art_base_;
    }

    wcost_.assign(n_total_, 0.0);
    for (int j = n_art_base_; j < n_total_; ++j) wcost_[j] = -1.0;
  }

  double nonbasic_value(int j) const {
    return state_[j] == State::AtUpper ? hi_[j] : lo_[j];
  }

  /// Values of every column under the current basis and nonbasic states.
  std::vector<double> values() const {
    std::vector<double> v(n_total_);
    for (int j = 0; j < n_total_; ++j)
      if (state_[j] != State::Basic) v[j] = nonbasic_value(j);
    for (int i = 0; i < m_; ++i) {
      double x = b_[i];
      for (int j = 0; j < n_total_; ++j) {
        if (state_[j] == State::Basic) continue;
        double nv = v[j];
        if (nv != 0.0) x -= at(i, j) * nv;
      }
      v[basis_[i]] = x;
    }
    return v;
  }

  double artificial_residual() const {
    std::vector<double> v = values();
    double s = 0.0;
    for (int j = n_art_base_; j < n_total_; ++j) s += std::abs(v[j]);
    return s;
  }

  LpStatus iterate(const std::vector<double>& cost) {
    const long iter_cap = 10000L + 200L * (m_ + n_total_);
    for (long iter = 0; iter < iter_cap; ++iter) {
      std::vector<double> vals = values();

      // Reduced costs d_j = c_j - c_B . column_j on the transformed tableau.
      std::vector<double> cb(m_);
      for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[i]];

      int enter = -1;
      double best = 0.0;
      int dir = +1;
      for (int j = 0; j < n_total_; ++j) {
        if (state_[j] == State::Basic) continue;
        if (hi_[j] - lo_[j] <= 0.0) continue;  // pinned, cannot move
        double d = cost[j];
        for (int i = 0; i < m_; ++i) {
          double aij = at(i, j);
          if (aij != 0.0) d -= cb[i] * aij;
        }
        bool favorable = (state_[j] == State::AtLower) ? d > tol_.reduced_cost
                                                       : d < -tol_.reduced_cost;
        if (!favorable) continue;
        if (bland_) {
          enter = j;
          dir = state_[j] == State::AtLower ? +1 : -1;
          break;
        }
        double score = std::abs(d);
        if (score > best) {  // strict: ties keep the lowest index
          best = score;
          enter = j;
          dir = state_[j] == State::AtLower ? +1 : -1;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      // Ratio test: how far the entering variable can move.
      double t_limit = kInf;
      int leave_row = -1;
      bool leave_at_lower = true;
      for (int i = 0; i < m_; ++i) {
        double aij = at(i, enter);
        if (std::abs(aij) <= tol_.pivot) continue;
        double rate = -dir * aij;  // d(basic_i)/dt
        int bj = basis_[i];
        double t;
        bool hits_lower;
        if (rate < 0.0) {
          if (!std::isfinite(lo_[bj])) continue;
          t = (vals[bj] - lo_[bj]) / (-rate);
          hits_lower = true;
        } else {
          if (!std::isfinite(hi_[bj])) continue;
          t = (hi_[bj] - vals[bj]) / rate;
          hits_lower = false;
        }
        if (t < 0.0) t = 0.0;  // tiny infeasibility from roundoff
        double tie = 1e-12 * std::max(1.0, std::isfinite(t_limit) ? t_limit : 0.0);
        bool better = t < t_limit - tie;
        bool tied = leave_row >= 0 && std::abs(t - t_limit) <= tie && bj < basis_[leave_row];
        if (better || tied) {
          t_limit = std::min(t, t_limit);
          leave_row = i;
          leave_at_lower = hits_lower;
        }
      }
      double span = hi_[enter] - lo_[enter];  // may be +inf

      if (span <= t_limit) {
        if (!std::isfinite(span)) return LpStatus::Unbounded;
        // Bound flip, no basis change.
        state_[enter] = state_[enter] == State::AtLower ? State::AtUpper : State::AtLower;
        if (span <= tol_.pivot) note_degenerate();
        continue;
      }
      if (leave_row < 0) return LpStatus::Unbounded;
      if (t_limit <= tol_.pivot) note_degenerate();

      int leaving_var = basis_[leave_row];
      pivot(leave_row, enter);
      state_[enter] = State::Basic;
      state_[leaving_var] = leave_at_lower ? State::AtLower : State::AtUpper;
    }
    fail(Errc::SolverStall,
         "iteration cap exceeded (" + std::to_string(m_) + " rows, " +
             std::to_string(n_total_) + " cols)");
  }

  void pivot(int r, int c) {
    double p = at(r, c);
    double inv = 1.0 / p;
    for (int j = 0; j < n_total_; ++j) at(r, j) *= inv;
    b_[r] *= inv;
    at(r, c) = 1.0;  // cut roundoff
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j < n_total_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
      b_[i] -= f * b_[r];
    }
    basis_[r] = c;
  }

  void note_degenerate() {
    if (++degenerate_ >= tol_.bland_after) bland_ = true;
  }

  /// Re-checks the solution against the original rows and bounds.
  void verify() const {
    std::vector<double> v = values();
    for (int j = 0; j < lp_.n_vars; ++j) {
      double slack_lo = lp_.lower[j] - v[j];
      double slack_hi = std::isfinite(lp_.upper[j]) ? v[j] - lp_.upper[j] : -1.0;
      double scale = std::max({1.0, std::abs(lp_.lower[j]),
                               std::isfinite(lp_.upper[j]) ? std::abs(lp_.upper[j]) : 0.0});
      if (slack_lo > tol_.feasibility * scale || slack_hi > tol_.feasibility * scale)
        fail(Errc::SolverStall, "bound violated beyond tolerance on variable " +
                                    std::to_string(j) + " (value " + std::to_string(v[j]) + ")");
    }
    for (std::size_t i = 0; i < lp_.rows.size(); ++i) {
      const auto& row = lp_.rows[i];
      double act = 0.0, scale = 1.0;
      for (auto [j, c] : row.coeffs) {
        act += c * v[j];
        scale = std::max(scale, std::abs(c));
      }
      double tol = tol_.feasibility * scale * std::max(1.0, std::abs(row.rhs));
      bool ok = (row.rel == Relation::LessEq && act <= row.rhs + tol) ||
                (row.rel == Relation::GreaterEq && act >= row.rhs - tol) ||
                (row.rel == Relation::Eq && std::abs(act - row.rhs) <= tol);
      if (!ok)
        fail(Errc::SolverStall, "row " + std::to_string(i) +
                                    " violated beyond tolerance (activity " +
                                    std::to_string(act) + ", rhs " + std::to_string(row.rhs) + ")");
    }
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol) {
  lp.validate();
  LpSolution sol;
  if (lp.rows.empty() && lp.n_vars == 0) {
    sol.status = LpStatus::Optimal;
    return sol;
  }
  Simplex simplex(lp, tol);
  sol.status = simplex.run();
  if (sol.status == LpStatus::Optimal) {
    sol.values = simplex.solution();
    sol.objective_value = simplex.objective();
  }
  return sol;
}

namespace {

struct Node {
  std::vector<double> lower, upper;
  int depth = 0;
};

}  // namespace

LpSolution solve_milp(const LinearProgram& lp, const std::vector<int>& binaries,
                      const LpTolerances& tol) {
  lp.validate();
  for (int b : binaries) {
    if (b < 0 || b >= lp.n_vars)
      fail(Errc::BadBounds, "binary index " + std::to_string(b) + " out of range");
    if (lp.lower[b] < 0.0 || lp.upper[b] > 1.0)
      fail(Errc::BadBounds, "binary variable " + std::to_string(b) +
                                " must have bounds within [0, 1]");
  }
  if (binaries.empty()) return solve_lp(lp, tol);

  LinearProgram work = lp;
  LpSolution incumbent;
  incumbent.status = LpStatus::Infeasible;
  bool have_incumbent = false;

  std::vector<Node> stack;
  stack.push_back(Node{lp.lower, lp.upper, 0});
  long nodes = 0;

  while (!stack.empty()) {
    if (++nodes > tol.node_limit)
      fail(Errc::NodeLimitExceeded, "node budget of " + std::to_string(tol.node_limit) +
                                        " exhausted after " + std::to_string(nodes - 1) +
                                        " nodes");
    Node node = std::move(stack.back());
    stack.pop_back();
    work.lower = node.lower;
    work.upper = node.upper;

    LpSolution relax = solve_lp(work, tol);
    if (relax.status == LpStatus::Unbounded) return relax;  // MILP unbounded too
    if (relax.status != LpStatus::Optimal) continue;
    if (have_incumbent &&
        relax.objective_value <= incumbent.objective_value +
                                     1e-9 * std::max(1.0, std::abs(incumbent.objective_value)))
      continue;

    int frac = -1;
    for (int b : binaries) {
      double v = relax.values[b];
      if (std::abs(v - std::round(v)) > tol.integrality) {
        frac = b;
        break;
      }
    }
    if (frac < 0) {
      // Integral: snap binaries and accept as incumbent.
      for (int b : binaries) relax.values[b] = std::round(relax.values[b]);
      incumbent = relax;
      have_incumbent = true;
      continue;
    }

    Node down = node, up = node;
    down.upper[frac] = 0.0;
    down.lower[frac] = 0.0;
    down.depth = node.depth + 1;
    up.lower[frac] = 1.0;
    up.upper[frac] = 1.0;
    up.depth = node.depth + 1;
    // Explore the side nearer the fractional value first (LIFO stack).
    if (relax.values[frac] >= 0.5) {
      stack.push_back(std::move(down));
      stack.push_back(std::move(up));
    } else {
      stack.push_back(std::move(up));
      stack.push_back(std::move(down));
    }
  }

  return have_incumbent ? incumbent : LpSolution{LpStatus::Infeasible, {}, 0.0};
}

int semicontinuous_reformulate(LinearProgram& lp, int var, double l, double u) {
  if (!(l > 0.0) || !(l <= u))
    fail(Errc::BadBounds, "semicontinuous bounds need 0 < l <= u, got l=" +
                              std::to_string(l) + " u=" + std::to_string(u));
  if (var < 0 || var >= lp.n_vars)
    fail(Errc::BadBounds, "variable index " + std::to_string(var) + " out of range");
  if (lp.lower[var] != 0.0 || lp.upper[var] != u)
    fail(Errc::BadBounds, "variable " + std::to_string(var) +
                              " must currently be bounded [0, u] to become semicontinuous");
  int y = lp.add_variable(0.0, 1.0, 0.0);
  lp.add_row(Relation::LessEq, 0.0, {{var, 1.0}, {y, -u}});
  lp.add_row(Relation::GreaterEq, 0.0, {{var, 1.0}, {y, -l}});
  return y;
}

}  // namespace hydro
