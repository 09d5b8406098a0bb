#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "hydro/model.hpp"
#include "hydro/schedule.hpp"
#include "hydro/simulate.hpp"

namespace hydro {

/// Parses the line-oriented model format:
///
///   [reservoir <id>]
///   v_min = <m^3>        v_max = <m^3>        v_start = <m^3>
///   terminal = exact <v> | at_least <v> | window <lo> <hi>
///   spill = none | unbounded | cap <m^3/s>
///   gauge = <h>:<v> <h>:<v> ...              (optional)
///
///   [plant <id>]
///   upstream = <reservoir id>
///   downstream = <reservoir id> | sink
///   t_min = <m^3/s>   t_max = <m^3/s>   t_c = <hours>
///   ke = constant <value> | poly <g0> <g1> ...
///   eta = <factor>                            (optional, default 1)
///
/// '#' starts a comment. Parse problems raise ParseError with the line
/// number; structural problems raise ValidationError naming the element.
CascadeModel load_model(const std::filesystem::path& path);

/// CSV with header `hour,price,inflow_<res>,...`; hours must run 1..N
/// without gaps, inflow columns must match the model's reservoirs exactly.
Scenario load_scenario(const std::filesystem::path& path, const ValidatedModel& model);

/// Writes a scenario back out in the same CSV schema, 4 decimal places.
void save_scenario(const std::filesystem::path& path, const ValidatedModel& model,
                   const Scenario& scenario);

/// Reads a schedule CSV as written by emit_results: header
/// `hour,price,x_<plant>,...[,y_<res>,...]`. Missing spill columns mean no
/// spill; every plant column must be present.
Schedule load_schedule(const std::filesystem::path& path, const ValidatedModel& model);

/// Writes schedule.csv, volumes.csv, summary.json and plot_data.csv into
/// out_dir (created if needed). Flows carry 4 decimals, summary.json full
/// precision. `slp` adds the iteration trace to the summary when present.
void emit_results(const std::filesystem::path& out_dir, const ValidatedModel& model,
                  const Scenario& scenario, const Schedule& schedule,
                  const VolumeTrajectory& trajectory, const FeasibilityReport& report,
                  double objective, const std::string& status,
                  const SlpTrace* slp = nullptr);

}  // namespace hydro
