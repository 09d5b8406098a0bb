#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hydro/errors.hpp"

namespace hydro {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Downstream sentinel: water leaving through such a plant exits the system.
inline const std::string kSink = "sink";

/// Piecewise-linear height <-> volume map of a reservoir. Both coordinates
/// must be strictly increasing, which makes the map invertible.
class GaugeCurve {
 public:
  struct Point {
    double height;  // m above the local datum
    double volume;  // m^3
    bool operator==(const Point&) const = default;
  };

  GaugeCurve() = default;
  explicit GaugeCurve(std::vector<Point> points);

  const std::vector<Point>& points() const { return points_; }
  double min_volume() const { return points_.front().volume; }
  double max_volume() const { return points_.back().volume; }
  double min_height() const { return points_.front().height; }
  double max_height() const { return points_.back().height; }

  /// Volume -> height. Throws OutOfRange outside the tabulated span.
  double height_at(double volume) const;
  /// Height -> volume, inverse of height_at.
  double volume_at(double height) const;
  /// As height_at, but volumes outside the span are clamped to the ends.
  double height_clamped(double volume) const;

  bool operator==(const GaugeCurve&) const = default;

 private:
  std::vector<Point> points_;
};

struct TerminalTarget {
  enum class Mode { Exact, AtLeast, Window };
  Mode mode = Mode::Exact;
  double v_lo = 0.0;
  double v_hi = 0.0;  // == v_lo for Exact, +inf for AtLeast

  static TerminalTarget exact(double v) { return {Mode::Exact, v, v}; }
  static TerminalTarget at_least(double v) { return {Mode::AtLeast, v, kInfinity}; }
  static TerminalTarget window(double lo, double hi) { return {Mode::Window, lo, hi}; }

  bool operator==(const TerminalTarget&) const = default;
};

struct SpillPolicy {
  bool allowed = false;
  double cap = kInfinity;  // m^3/s, must be > 0 when allowed

  static SpillPolicy none() { return {false, kInfinity}; }
  static SpillPolicy unbounded() { return {true, kInfinity}; }
  static SpillPolicy capped(double c) { return {true, c}; }

  bool operator==(const SpillPolicy&) const = default;
};

struct Reservoir {
  std::string id;
  double v_min = 0.0;    // m^3
  double v_max = 0.0;    // m^3
  double v_start = 0.0;  // m^3
  TerminalTarget terminal;
  SpillPolicy spill;
  std::optional<GaugeCurve> gauge;

  bool operator==(const Reservoir&) const = default;
};

/// Energy yield per unit turbined flow, either a fixed coefficient or a
/// polynomial in the upstream reservoir's gauge height.
struct KeModel {
  enum class Kind { Constant, Polynomial };
  Kind kind = Kind::Constant;
  double constant_value = 1.0;        // kWh per (m^3/s)
  std::vector<double> coefficients;   // gamma_0..gamma_m, ascending powers of h
  double efficiency = 1.0;            // eta

  /// eta * sum_j gamma_j h^j for the polynomial kind; h is ignored otherwise.
  double evaluate(double h) const;

  bool operator==(const KeModel&) const = default;
};

struct Plant {
  std::string id;
  std::string upstream;    // reservoir id the plant draws from
  std::string downstream;  // reservoir id or kSink
  double t_min = 0.0;      // m^3/s
  double t_max = 0.0;      // m^3/s
  double t_c = 0.0;        // hours, release-to-arrival delay
  KeModel ke;

  bool operator==(const Plant&) const = default;
};

struct CascadeModel {
  std::vector<Reservoir> reservoirs;
  std::vector<Plant> plants;

  bool operator==(const CascadeModel&) const = default;
};

/// Hourly price and inflow forecast. Series are stored 0-based: index k-1
/// holds hour k.
struct Scenario {
  int n_hours = 0;
  std::vector<double> prices;                // length n_hours
  std::vector<std::vector<double>> inflows;  // [reservoir][hour], m^3/s

  bool operator==(const Scenario&) const = default;
};

/// Decision variables of one day: turbined flow per plant and spill per
/// reservoir, both m^3/s per hour. Plants drawing from the same reservoir
/// form one hydraulic chain and carry identical series.
struct Schedule {
  std::vector<std::vector<double>> turbine;  // [plant][hour]
  std::vector<std::vector<double>> spill;    // [reservoir][hour]

  static Schedule zeros(int n_plants, int n_reservoirs, int n_hours);

  bool operator==(const Schedule&) const = default;
};

/// A structurally checked model with the derived cascade topology:
/// per-reservoir plant chains (down sets), aggregated flow bounds and
/// upstream plant lists.
class ValidatedModel {
 public:
  const CascadeModel& model() const { return model_; }
  const std::vector<Reservoir>& reservoirs() const { return model_.reservoirs; }
  const std::vector<Plant>& plants() const { return model_.plants; }
  int n_reservoirs() const { return static_cast<int>(model_.reservoirs.size()); }
  int n_plants() const { return static_cast<int>(model_.plants.size()); }

  int reservoir_index(const std::string& id) const;  // -1 if unknown
  int plant_index(const std::string& id) const;

  /// Plants drawing from reservoir i (its chain), in declaration order.
  const std::vector<int>& down(int res) const { return down_[res]; }
  /// Plants discharging into reservoir i.
  const std::vector<int>& upstream_plants(int res) const { return upstream_[res]; }

  /// max of t_min / min of t_max over the chain; (0, 0) for an empty chain.
  double effective_t_min(int res) const { return eff_t_min_[res]; }
  double effective_t_max(int res) const { return eff_t_max_[res]; }
  bool has_release(int res) const { return !down_[res].empty(); }

  int plant_upstream_res(int plant) const { return plant_up_[plant]; }
  /// -1 when the plant discharges to the sink.
  int plant_downstream_res(int plant) const { return plant_down_[plant]; }

  bool operator==(const ValidatedModel&) const = default;

 private:
  friend ValidatedModel validate_model(const CascadeModel&);

  CascadeModel model_;
  std::vector<std::vector<int>> down_;
  std::vector<std::vector<int>> upstream_;
  std::vector<double> eff_t_min_, eff_t_max_;
  std::vector<int> plant_up_, plant_down_;
};

/// Checks every structural invariant and computes the derived topology.
/// Throws CycleDetected, BoundViolation, DanglingReference or MissingGauge.
ValidatedModel validate_model(const CascadeModel& model);
/// Re-validation of an already validated model returns an identical one.
ValidatedModel validate_model(const ValidatedModel& model);

/// Volume -> height on a curve (piecewise-linear, strictly monotone).
double gauge_height(const GaugeCurve& curve, double volume);
/// Height -> volume, inverse of gauge_height.
double gauge_volume(const GaugeCurve& curve, double height);

/// Scenario/series consistency against a model. Throws LengthMismatch or
/// BoundViolation (non-finite entries).
void validate_scenario(const ValidatedModel& model, const Scenario& scenario);

}  // namespace hydro
