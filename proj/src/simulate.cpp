#include "hydro/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "hydro/errors.hpp"
#include "hydro/routing.hpp"

namespace hydro {

namespace {

constexpr double kSecondsPerHour = 3600.0;

void check_lengths(const ValidatedModel& model, const Scenario& scenario,
                   const Schedule& schedule) {
  validate_scenario(model, scenario);
  if (static_cast<int>(schedule.turbine.size()) != model.n_plants())
    fail(Errc::LengthMismatch, "schedule has wrong plant count");
  if (static_cast<int>(schedule.spill.size()) != model.n_reservoirs())
    fail(Errc::LengthMismatch, "schedule has wrong reservoir count");
  for (const auto& s : schedule.turbine)
    if (static_cast<int>(s.size()) != scenario.n_hours)
      fail(Errc::LengthMismatch, "turbine series length != n_hours");
  for (const auto& s : schedule.spill)
    if (static_cast<int>(s.size()) != scenario.n_hours)
      fail(Errc::LengthMismatch, "spill series length != n_hours");
}

/// Release taken out of a reservoir: plants in a chain pass the same water,
/// so the first plant's series is the reservoir's outflow.
const std::vector<double>* reservoir_release(const ValidatedModel& model,
                                             const Schedule& schedule, int res) {
  if (!model.has_release(res)) return nullptr;
  return &schedule.turbine[model.down(res).front()];
}

}  // namespace

const char* violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::VolMin: return "VolMin";
    case ViolationKind::VolMax: return "VolMax";
    case ViolationKind::Terminal: return "Terminal";
    case ViolationKind::FlowBound: return "FlowBound";
    case ViolationKind::SpillCap: return "SpillCap";
  }
  return "?";
}

VolumeTrajectory simulate_volumes(const ValidatedModel& model, const Scenario& scenario,
                                  const Schedule& schedule) {
  check_lengths(model, scenario, schedule);
  const int n = scenario.n_hours;
  const int nr = model.n_reservoirs();

  // Arrivals per reservoir from each feeding plant.
  std::vector<std::vector<double>> arrivals(nr, std::vector<double>(n, 0.0));
  for (int res = 0; res < nr; ++res) {
    for (int p : model.upstream_plants(res)) {
      std::vector<double> a = route_release(schedule.turbine[p], model.plants()[p].t_c, n);
      for (int k = 0; k < n; ++k) arrivals[res][k] += a[k];
    }
  }

  VolumeTrajectory traj;
  traj.volumes.assign(nr, std::vector<double>(n + 1, 0.0));
  for (int res = 0; res < nr; ++res) {
    const std::vector<double>* release = reservoir_release(model, schedule, res);
    double v = model.reservoirs()[res].v_start;
    traj.volumes[res][0] = v;
    for (int k = 0; k < n; ++k) {
      double out = (release ? (*release)[k] : 0.0) + schedule.spill[res][k];
      v += kSecondsPerHour * (scenario.inflows[res][k] - out + arrivals[res][k]);
      traj.volumes[res][k + 1] = v;
    }
  }
  return traj;
}

FeasibilityReport check_feasibility(const ValidatedModel& model, const Scenario& scenario,
                                    const Schedule& schedule, double tol) {
  VolumeTrajectory traj = simulate_volumes(model, scenario, schedule);
  const int n = scenario.n_hours;
  FeasibilityReport report;

  auto flag = [&](ViolationKind kind, const std::string& id, int hour, double magnitude) {
    report.violations.push_back(Violation{kind, id, hour, magnitude});
  };

  for (int res = 0; res < model.n_reservoirs(); ++res) {
    const Reservoir& r = model.reservoirs()[res];
    double span = r.v_max - r.v_min;
    double vol_tol = tol * (span > 0.0 ? span : std::max(1.0, r.v_max));

    for (int k = 1; k <= n; ++k) {
      double v = traj.volumes[res][k];
      if (v < r.v_min - vol_tol) flag(ViolationKind::VolMin, r.id, k, v - r.v_min);
      if (v > r.v_max + vol_tol) flag(ViolationKind::VolMax, r.id, k, v - r.v_max);
    }

    double v_end = traj.volumes[res][n];
    if (v_end < r.terminal.v_lo - vol_tol)
      flag(ViolationKind::Terminal, r.id, n, v_end - r.terminal.v_lo);
    if (std::isfinite(r.terminal.v_hi) && v_end > r.terminal.v_hi + vol_tol)
      flag(ViolationKind::Terminal, r.id, n, v_end - r.terminal.v_hi);

    // Chain flow bounds: each hour zero or within [eff t_min, eff t_max].
    if (model.has_release(res)) {
      double t_lo = model.effective_t_min(res);
      double t_hi = model.effective_t_max(res);
      double flow_tol = tol * std::max(1.0, t_hi);
      const std::vector<double>& lead = *reservoir_release(model, schedule, res);
      for (int k = 0; k < n; ++k) {
        double x = lead[k];
        if (x < -flow_tol)
          flag(ViolationKind::FlowBound, model.plants()[model.down(res).front()].id, k + 1, x);
        else if (x > t_hi + flow_tol)
          flag(ViolationKind::FlowBound, model.plants()[model.down(res).front()].id, k + 1,
               x - t_hi);
        else if (t_lo > 0.0 && x > flow_tol && x < t_lo - flow_tol)
          flag(ViolationKind::FlowBound, model.plants()[model.down(res).front()].id, k + 1,
               x - t_lo);
      }
      // Plants of one chain must carry the same water.
      for (std::size_t ci = 1; ci < model.down(res).size(); ++ci) {
        int p = model.down(res)[ci];
        for (int k = 0; k < n; ++k) {
          double diff = schedule.turbine[p][k] - lead[k];
          if (std::abs(diff) > flow_tol)
            flag(ViolationKind::FlowBound, model.plants()[p].id, k + 1, diff);
        }
      }
    }

    const SpillPolicy& spill = r.spill;
    double spill_tol = tol * std::max(1.0, std::isfinite(spill.cap) ? spill.cap : 1.0);
    for (int k = 0; k < n; ++k) {
      double y = schedule.spill[res][k];
      if (y < -spill_tol) flag(ViolationKind::SpillCap, r.id, k + 1, y);
      if (!spill.allowed) {
        if (y > spill_tol) flag(ViolationKind::SpillCap, r.id, k + 1, y);
      } else if (std::isfinite(spill.cap) && y > spill.cap + spill_tol) {
        flag(ViolationKind::SpillCap, r.id, k + 1, y - spill.cap);
      }
    }
  }

  report.feasible = report.violations.empty();
  return report;
}

namespace {

double revenue_impl(const ValidatedModel& model, const Scenario& scenario,
                    const Schedule& schedule,
                    const std::vector<std::vector<double>>& plant_hour_ke) {
  const int n = scenario.n_hours;
  double total = 0.0;
  for (int p = 0; p < model.n_plants(); ++p)
    for (int k = 0; k < n; ++k)
      total += scenario.prices[k] * plant_hour_ke[p][k] * schedule.turbine[p][k];
  for (int res = 0; res < model.n_reservoirs(); ++res) {
    for (int k = 0; k < n; ++k) {
      double y = schedule.spill[res][k];
      if (y == 0.0) continue;
      double ke = 0.0;
      for (int p : model.down(res)) ke += plant_hour_ke[p][k];
      total -= scenario.prices[k] * ke * y;
    }
  }
  return total;
}

}  // namespace

double revenue(const ValidatedModel& model, const Scenario& scenario, const Schedule& schedule,
               const std::vector<double>& plant_ke) {
  check_lengths(model, scenario, schedule);
  if (static_cast<int>(plant_ke.size()) != model.n_plants())
    fail(Errc::MissingKe, "one coefficient per plant required");
  std::vector<std::vector<double>> table(model.n_plants(),
                                         std::vector<double>(scenario.n_hours));
  for (int p = 0; p < model.n_plants(); ++p)
    std::fill(table[p].begin(), table[p].end(), plant_ke[p]);
  return revenue_impl(model, scenario, schedule, table);
}

double revenue(const ValidatedModel& model, const Scenario& scenario, const Schedule& schedule,
               const VolumeTrajectory& trajectory) {
  check_lengths(model, scenario, schedule);
  const int n = scenario.n_hours;
  std::vector<std::vector<double>> table(model.n_plants(), std::vector<double>(n));
  for (int p = 0; p < model.n_plants(); ++p) {
    const Plant& plant = model.plants()[p];
    int up = model.plant_upstream_res(p);
    const Reservoir& res = model.reservoirs()[up];
    for (int k = 0; k < n; ++k) {
      double h = 0.0;
      if (plant.ke.kind == KeModel::Kind::Polynomial) {
        if (!res.gauge) fail(Errc::MissingKe, "plant '" + plant.id + "' needs a gauge curve");
        h = res.gauge->height_clamped(trajectory.volumes[up][k]);
      }
      table[p][k] = plant.ke.evaluate(h);
    }
  }
  return revenue_impl(model, scenario, schedule, table);
}

}  // namespace hydro
