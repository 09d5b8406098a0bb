#pragma once

#include <span>
#include <vector>

namespace hydro {

/// How a release splits across the two integer lags bracketing a fractional
/// time of concentration. w_lo + w_hi == 1 exactly.
struct ArrivalWeights {
  int lag_lo = 0;     // floor(t_c) hours
  double w_lo = 1.0;  // share arriving after lag_lo
  int lag_hi = 0;     // ceil(t_c) hours
  double w_hi = 0.0;  // share arriving after lag_hi

  bool operator==(const ArrivalWeights&) const = default;
};

/// Splits a delay of t_c hours over the bracketing integer lags. An integer
/// t_c puts the full release on that lag. Throws NegativeDelay for t_c < 0.
ArrivalWeights arrival_weights(double t_c);

/// Converts a release series (index 0 = hour 1) into the arrival series at
/// the downstream reservoir: water released during hour k arrives during
/// hour k + lag. Arrivals past hour n_hours are dropped; the corresponding
/// release still left the upstream reservoir.
/// Throws LengthMismatch when release.size() != n_hours and NegativeDelay.
std::vector<double> route_release(std::span<const double> release, double t_c, int n_hours);

}  // namespace hydro
