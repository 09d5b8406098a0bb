#include "hydro/routing.hpp"

#include <cmath>

#include "hydro/errors.hpp"

namespace hydro {

ArrivalWeights arrival_weights(double t_c) {
  if (!(t_c >= 0.0)) fail(Errc::NegativeDelay, "time of concentration must be >= 0");
  double lo = std::floor(t_c);
  double frac = t_c - lo;
  ArrivalWeights w;
  if (frac == 0.0) {
    w.lag_lo = w.lag_hi = static_cast<int>(lo);
    w.w_lo = 1.0;
    w.w_hi = 0.0;
  } else {
    w.lag_lo = static_cast<int>(lo);
    w.lag_hi = w.lag_lo + 1;
    w.w_hi = frac;
    w.w_lo = 1.0 - frac;
  }
  return w;
}

std::vector<double> route_release(std::span<const double> release, double t_c, int n_hours) {
  if (static_cast<int>(release.size()) != n_hours)
    fail(Errc::LengthMismatch, "release series length " + std::to_string(release.size()) +
                                   " != n_hours " + std::to_string(n_hours));
  ArrivalWeights w = arrival_weights(t_c);
  std::vector<double> arrival(static_cast<std::size_t>(n_hours), 0.0);
  for (int k = 0; k < n_hours; ++k) {
    int src_lo = k - w.lag_lo;
    int src_hi = k - w.lag_hi;
    double a = 0.0;
    if (src_lo >= 0) a += w.w_lo * release[src_lo];
    if (w.w_hi != 0.0 && src_hi >= 0) a += w.w_hi * release[src_hi];
    arrival[k] = a;
  }
  return arrival;
}

}  // namespace hydro
