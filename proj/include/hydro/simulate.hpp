#pragma once

#include <string>
#include <vector>

#include "hydro/model.hpp"

namespace hydro {

/// Hourly volumes per reservoir, index 0..n_hours with index 0 = v_start.
struct VolumeTrajectory {
  std::vector<std::vector<double>> volumes;  // [reservoir][0..n_hours]
};

enum class ViolationKind { VolMin, VolMax, Terminal, FlowBound, SpillCap };

const char* violation_kind_name(ViolationKind k);

/// One broken constraint. `magnitude` is the signed excess: positive above
/// an upper limit, negative below a lower one (m^3 for volumes, m^3/s for
/// flows).
struct Violation {
  ViolationKind kind;
  std::string id;  // reservoir or plant
  int hour;        // 1-based
  double magnitude;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
};

/// Forward mass-balance recursion:
///   V_k = V_{k-1} + 3600 (a_k - x_k - y_k + arrivals_k).
/// Deliberately independent of the LP constraint assembly so optimizer bugs
/// cannot certify themselves.
VolumeTrajectory simulate_volumes(const ValidatedModel& model, const Scenario& scenario,
                                  const Schedule& schedule);

/// Verifies hourly volume bounds, the terminal window, chain flow bounds
/// (zero or within [effective t_min, t_max]), chain series consistency and
/// spill caps. `tol` is relative: volume slack is tol * (v_max - v_min) per
/// reservoir, flow slack tol * max(1, t_max).
FeasibilityReport check_feasibility(const ValidatedModel& model, const Scenario& scenario,
                                    const Schedule& schedule, double tol = 1e-6);

/// Objective recomputed from a schedule with fixed per-plant coefficients:
/// sum_k P_k (sum_j Ke_j x_k^j - sum_i KeChain_i y_k^i), where a spilling
/// reservoir is penalized with the coefficients of the plants it feeds.
double revenue(const ValidatedModel& model, const Scenario& scenario, const Schedule& schedule,
               const std::vector<double>& plant_ke);

/// Polynomial-coefficient variant: each plant's coefficient is evaluated at
/// the start-of-hour gauge height of its upstream reservoir, read from the
/// supplied trajectory.
double revenue(const ValidatedModel& model, const Scenario& scenario, const Schedule& schedule,
               const VolumeTrajectory& trajectory);

}  // namespace hydro
