#include "hydro/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hydro {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

GaugeCurve::GaugeCurve(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.size() < 2)
    fail(Errc::BoundViolation, "gauge curve needs at least two points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].height > points_[i - 1].height) ||
        !(points_[i].volume > points_[i - 1].volume))
      fail(Errc::BoundViolation,
           "gauge curve must be strictly increasing in height and volume near point " +
               std::to_string(i));
  }
  for (const Point& p : points_) {
    if (!std::isfinite(p.height) || !std::isfinite(p.volume))
      fail(Errc::BoundViolation, "gauge curve points must be finite");
  }
}

double GaugeCurve::height_at(double volume) const {
  if (points_.empty()) fail(Errc::OutOfRange, "empty gauge curve");
  if (volume < min_volume() || volume > max_volume())
    fail(Errc::OutOfRange, "volume " + fmt(volume) + " outside gauge span [" +
                               fmt(min_volume()) + ", " + fmt(max_volume()) + "]");
  auto hi = std::lower_bound(points_.begin(), points_.end(), volume,
                             [](const Point& p, double v) { return p.volume < v; });
  if (hi == points_.begin()) return hi->height;
  auto lo = std::prev(hi);
  if (hi == points_.end()) return lo->height;
  double t = (volume - lo->volume) / (hi->volume - lo->volume);
  return lo->height + t * (hi->height - lo->height);
}

double GaugeCurve::volume_at(double height) const {
  if (points_.empty()) fail(Errc::OutOfRange, "empty gauge curve");
  if (height < min_height() || height > max_height())
    fail(Errc::OutOfRange, "height " + fmt(height) + " outside gauge span [" +
                               fmt(min_height()) + ", " + fmt(max_height()) + "]");
  auto hi = std::lower_bound(points_.begin(), points_.end(), height,
                             [](const Point& p, double h) { return p.height < h; });
  if (hi == points_.begin()) return hi->volume;
  auto lo = std::prev(hi);
  if (hi == points_.end()) return lo->volume;
  double t = (height - lo->height) / (hi->height - lo->height);
  return lo->volume + t * (hi->volume - lo->volume);
}

double GaugeCurve::height_clamped(double volume) const {
  if (points_.empty()) fail(Errc::OutOfRange, "empty gauge curve");
  return height_at(std::clamp(volume, min_volume(), max_volume()));
}

double KeModel::evaluate(double h) const {
  if (kind == Kind::Constant) return constant_value;
  // Horner on gamma_0..gamma_m
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
    acc = acc * h + *it;
  return efficiency * acc;
}

Schedule Schedule::zeros(int n_plants, int n_reservoirs, int n_hours) {
  Schedule s;
  s.turbine.assign(n_plants, std::vector<double>(n_hours, 0.0));
  s.spill.assign(n_reservoirs, std::vector<double>(n_hours, 0.0));
  return s;
}

int ValidatedModel::reservoir_index(const std::string& id) const {
  for (int i = 0; i < n_reservoirs(); ++i)
    if (model_.reservoirs[i].id == id) return i;
  return -1;
}

int ValidatedModel::plant_index(const std::string& id) const {
  for (int i = 0; i < n_plants(); ++i)
    if (model_.plants[i].id == id) return i;
  return -1;
}

namespace {

void check_reservoir(const Reservoir& r) {
  if (r.id.empty()) fail(Errc::BoundViolation, "reservoir with empty id");
  if (!(r.v_min >= 0.0) || !(r.v_min <= r.v_max))
    fail(Errc::BoundViolation,
         "reservoir '" + r.id + "': requires 0 <= v_min <= v_max, got v_min=" +
             std::to_string(r.v_min) + " v_max=" + std::to_string(r.v_max));
  if (!(r.v_start >= r.v_min) || !(r.v_start <= r.v_max))
    fail(Errc::BoundViolation,
         "reservoir '" + r.id + "': v_start must lie in [v_min, v_max]");
  const TerminalTarget& t = r.terminal;
  if (!(t.v_lo <= t.v_hi))
    fail(Errc::BoundViolation, "reservoir '" + r.id + "': terminal window lo > hi");
  if (t.v_lo < r.v_min || std::min(t.v_hi, r.v_max) < t.v_lo ||
      (t.mode != TerminalTarget::Mode::AtLeast && t.v_hi > r.v_max))
    fail(Errc::BoundViolation,
         "reservoir '" + r.id + "': terminal window must lie inside [v_min, v_max]");
  if (r.spill.allowed && !(r.spill.cap > 0.0))
    fail(Errc::BoundViolation, "reservoir '" + r.id + "': spill cap must be > 0");
  if (r.gauge) {
    // Heights are needed for every volume the reservoir may legally hold.
    if (r.gauge->min_volume() > r.v_min || r.gauge->max_volume() < r.v_max)
      fail(Errc::BoundViolation,
           "reservoir '" + r.id + "': gauge curve span does not cover [v_min, v_max]");
  }
}

void check_plant(const Plant& p) {
  if (p.id.empty()) fail(Errc::BoundViolation, "plant with empty id");
  if (!(p.t_min >= 0.0) || !(p.t_min <= p.t_max))
    fail(Errc::BoundViolation,
         "plant '" + p.id + "': requires 0 <= t_min <= t_max, got t_min=" +
             std::to_string(p.t_min) + " t_max=" + std::to_string(p.t_max));
  if (!(p.t_c >= 0.0))
    fail(Errc::BoundViolation, "plant '" + p.id + "': concentration time must be >= 0");
}

}  // namespace

ValidatedModel validate_model(const CascadeModel& model) {
  ValidatedModel vm;
  vm.model_ = model;
  const int nr = vm.n_reservoirs();
  const int np = vm.n_plants();

  for (int i = 0; i < nr; ++i) {
    check_reservoir(model.reservoirs[i]);
    for (int j = i + 1; j < nr; ++j)
      if (model.reservoirs[i].id == model.reservoirs[j].id)
        fail(Errc::DanglingReference, "duplicate reservoir id '" + model.reservoirs[i].id + "'");
  }
  for (int i = 0; i < np; ++i) {
    check_plant(model.plants[i]);
    for (int j = i + 1; j < np; ++j)
      if (model.plants[i].id == model.plants[j].id)
        fail(Errc::DanglingReference, "duplicate plant id '" + model.plants[i].id + "'");
  }

  vm.down_.assign(nr, {});
  vm.upstream_.assign(nr, {});
  vm.plant_up_.assign(np, -1);
  vm.plant_down_.assign(np, -1);

  for (int p = 0; p < np; ++p) {
    const Plant& plant = model.plants[p];
    int up = vm.reservoir_index(plant.upstream);
    if (up < 0)
      fail(Errc::DanglingReference,
           "plant '" + plant.id + "': unknown upstream reservoir '" + plant.upstream + "'");
    vm.plant_up_[p] = up;
    vm.down_[up].push_back(p);
    if (plant.downstream == kSink) {
      vm.plant_down_[p] = -1;
    } else {
      int dn = vm.reservoir_index(plant.downstream);
      if (dn < 0)
        fail(Errc::DanglingReference,
             "plant '" + plant.id + "': unknown downstream reservoir '" + plant.downstream + "'");
      vm.plant_down_[p] = dn;
      vm.upstream_[dn].push_back(p);
    }
    if (plant.ke.kind == KeModel::Kind::Polynomial && !model.reservoirs[up].gauge)
      fail(Errc::MissingGauge,
           "plant '" + plant.id + "': polynomial coefficient needs a gauge curve on '" +
               plant.upstream + "'");
  }

  // Aggregated chain bounds per reservoir.
  vm.eff_t_min_.assign(nr, 0.0);
  vm.eff_t_max_.assign(nr, 0.0);
  for (int i = 0; i < nr; ++i) {
    if (vm.down_[i].empty()) continue;
    double lo = 0.0, hi = kInfinity;
    for (int p : vm.down_[i]) {
      lo = std::max(lo, model.plants[p].t_min);
      hi = std::min(hi, model.plants[p].t_max);
    }
    if (lo > hi)
      fail(Errc::BoundViolation,
           "reservoir '" + model.reservoirs[i].id +
               "': chain flow bounds are contradictory (max t_min > min t_max)");
    vm.eff_t_min_[i] = lo;
    vm.eff_t_max_[i] = hi;
  }

  // Cycle check on the reservoir graph (edges through plants).
  // 0 = unseen, 1 = on stack, 2 = done.
  std::vector<int> mark(nr, 0);
  std::vector<int> stack;
  for (int start = 0; start < nr; ++start) {
    if (mark[start]) continue;
    stack.push_back(start);
    while (!stack.empty()) {
      int node = stack.back();
      if (mark[node] == 0) {
        mark[node] = 1;
        for (int p : vm.down_[node]) {
          int dn = vm.plant_down_[p];
          if (dn < 0) continue;
          if (mark[dn] == 1)
            fail(Errc::CycleDetected,
                 "cascade contains a directed cycle through reservoir '" +
                     model.reservoirs[dn].id + "'");
          if (mark[dn] == 0) stack.push_back(dn);
        }
      } else {
        mark[node] = 2;
        stack.pop_back();
      }
    }
  }

  return vm;
}

ValidatedModel validate_model(const ValidatedModel& model) {
  return validate_model(model.model());
}

double gauge_height(const GaugeCurve& curve, double volume) { return curve.height_at(volume); }

double gauge_volume(const GaugeCurve& curve, double height) { return curve.volume_at(height); }

void validate_scenario(const ValidatedModel& model, const Scenario& scenario) {
  if (scenario.n_hours <= 0) fail(Errc::HorizonZero, "scenario has no hours");
  if (static_cast<int>(scenario.prices.size()) != scenario.n_hours)
    fail(Errc::LengthMismatch, "price series length != n_hours");
  if (static_cast<int>(scenario.inflows.size()) != model.n_reservoirs())
    fail(Errc::LengthMismatch, "one inflow series per reservoir required");
  for (double p : scenario.prices)
    if (!std::isfinite(p)) fail(Errc::BoundViolation, "non-finite price");
  for (const auto& series : scenario.inflows) {
    if (static_cast<int>(series.size()) != scenario.n_hours)
      fail(Errc::LengthMismatch, "inflow series length != n_hours");
    for (double a : series)
      if (!std::isfinite(a)) fail(Errc::BoundViolation, "non-finite inflow");
  }
}

}  // namespace hydro
