#include "hydro/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace hydro {

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line,
                             const std::string& what) {
  fail(Errc::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, const std::filesystem::path& path, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    parse_fail(path, line, "expected a finite number, got '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(strip(cur));
  return out;
}

struct Section {
  std::string kind;  // "reservoir" or "plant"
  std::string id;
  int line = 0;
  std::vector<std::pair<std::string, std::pair<std::string, int>>> entries;  // key -> (value, line)
};

}  // namespace

CascadeModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ParseError, "cannot open model file '" + path.string() + "'");

  std::vector<Section> sections;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(path, lineno, "unterminated section header");
      auto inner = split_ws(strip(line.substr(1, line.size() - 2)));
      if (inner.size() != 2 || (inner[0] != "reservoir" && inner[0] != "plant"))
        parse_fail(path, lineno, "expected [reservoir <id>] or [plant <id>]");
      sections.push_back(Section{inner[0], inner[1], lineno, {}});
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(path, lineno, "expected 'key = value'");
    if (sections.empty()) parse_fail(path, lineno, "entry before any section header");
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (key.empty() || value.empty()) parse_fail(path, lineno, "empty key or value");
    sections.back().entries.push_back({key, {value, lineno}});
  }
  if (sections.empty()) fail(Errc::ParseError, path.string() + ": no sections found");

  CascadeModel model;
  for (const Section& sec : sections) {
    std::map<std::string, std::pair<std::string, int>> kv;
    for (const auto& [key, val] : sec.entries) {
      if (kv.count(key))
        parse_fail(path, val.second, "duplicate key '" + key + "' in [" + sec.kind + " " + sec.id + "]");
      kv[key] = val;
    }
    auto require = [&](const std::string& key) -> std::pair<std::string, int> {
      auto it = kv.find(key);
      if (it == kv.end())
        parse_fail(path, sec.line, "[" + sec.kind + " " + sec.id + "] is missing '" + key + "'");
      return it->second;
    };
    auto number = [&](const std::string& key) {
      auto [value, line] = require(key);
      return parse_double(value, path, line);
    };

    if (sec.kind == "reservoir") {
      Reservoir r;
      r.id = sec.id;
      r.v_min = number("v_min");
      r.v_max = number("v_max");
      r.v_start = number("v_start");

      auto [tval, tline] = require("terminal");
      auto ttoks = split_ws(tval);
      if (ttoks.size() == 2 && ttoks[0] == "exact")
        r.terminal = TerminalTarget::exact(parse_double(ttoks[1], path, tline));
      else if (ttoks.size() == 2 && ttoks[0] == "at_least")
        r.terminal = TerminalTarget::at_least(parse_double(ttoks[1], path, tline));
      else if (ttoks.size() == 3 && ttoks[0] == "window")
        r.terminal = TerminalTarget::window(parse_double(ttoks[1], path, tline),
                                            parse_double(ttoks[2], path, tline));
      else
        parse_fail(path, tline, "terminal must be 'exact <v>', 'at_least <v>' or 'window <lo> <hi>'");

      if (auto it = kv.find("spill"); it != kv.end()) {
        auto stoks = split_ws(it->second.first);
        if (stoks.size() == 1 && stoks[0] == "none")
          r.spill = SpillPolicy::none();
        else if (stoks.size() == 1 && stoks[0] == "unbounded")
          r.spill = SpillPolicy::unbounded();
        else if (stoks.size() == 2 && stoks[0] == "cap")
          r.spill = SpillPolicy::capped(parse_double(stoks[1], path, it->second.second));
        else
          parse_fail(path, it->second.second, "spill must be 'none', 'unbounded' or 'cap <flow>'");
      }

      if (auto it = kv.find("gauge"); it != kv.end()) {
        std::vector<GaugeCurve::Point> pts;
        for (const std::string& pair : split_ws(it->second.first)) {
          auto colon = pair.find(':');
          if (colon == std::string::npos)
            parse_fail(path, it->second.second, "gauge points are '<height>:<volume>'");
          pts.push_back({parse_double(pair.substr(0, colon), path, it->second.second),
                         parse_double(pair.substr(colon + 1), path, it->second.second)});
        }
        try {
          r.gauge = GaugeCurve(std::move(pts));
        } catch (const Error& e) {
          parse_fail(path, it->second.second, e.what());
        }
      }

      for (const auto& [key, val] : kv)
        if (key != "v_min" && key != "v_max" && key != "v_start" && key != "terminal" &&
            key != "spill" && key != "gauge")
          parse_fail(path, val.second, "unknown reservoir key '" + key + "'");

      model.reservoirs.push_back(std::move(r));
    } else {
      Plant p;
      p.id = sec.id;
      p.upstream = require("upstream").first;
      p.downstream = require("downstream").first;
      p.t_max = number("t_max");
      if (kv.count("t_min")) p.t_min = number("t_min");
      if (kv.count("t_c")) p.t_c = number("t_c");
      if (kv.count("eta")) p.ke.efficiency = number("eta");

      auto [keval, keline] = require("ke");
      auto ktoks = split_ws(keval);
      if (ktoks.size() == 2 && ktoks[0] == "constant") {
        p.ke.kind = KeModel::Kind::Constant;
        p.ke.constant_value = parse_double(ktoks[1], path, keline);
      } else if (ktoks.size() >= 2 && ktoks[0] == "poly") {
        p.ke.kind = KeModel::Kind::Polynomial;
        for (std::size_t i = 1; i < ktoks.size(); ++i)
          p.ke.coefficients.push_back(parse_double(ktoks[i], path, keline));
      } else {
        parse_fail(path, keline, "ke must be 'constant <value>' or 'poly <g0> <g1> ...'");
      }

      for (const auto& [key, val] : kv)
        if (key != "upstream" && key != "downstream" && key != "t_min" && key != "t_max" &&
            key != "t_c" && key != "ke" && key != "eta")
          parse_fail(path, val.second, "unknown plant key '" + key + "'");

      model.plants.push_back(std::move(p));
    }
  }

  // Surface structural problems at load time, with the file named.
  try {
    validate_model(model);
  } catch (const Error& e) {
    fail(Errc::ValidationError, path.string() + ": " + e.what());
  }
  return model;
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // parsed numeric cells
  std::vector<int> row_lines;
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ParseError, "cannot open '" + path.string() + "'");
  CsvTable table;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv(line);
    if (table.header.empty()) {
      table.header = cells;
      continue;
    }
    if (cells.size() != table.header.size())
      parse_fail(path, lineno, "expected " + std::to_string(table.header.size()) +
                                   " cells, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& cell : cells) row.push_back(parse_double(cell, path, lineno));
    table.rows.push_back(std::move(row));
    table.row_lines.push_back(lineno);
  }
  if (table.header.empty()) fail(Errc::ParseError, path.string() + ": no header row");
  return table;
}

void check_hours_column(const CsvTable& table, const std::filesystem::path& path) {
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    double h = table.rows[i][0];
    if (h != static_cast<double>(i + 1))
      parse_fail(path, table.row_lines[i],
                 "hours must run 1..N without gaps; expected " + std::to_string(i + 1));
  }
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path, const ValidatedModel& model) {
  CsvTable table = read_csv(path);
  if (table.rows.empty()) fail(Errc::ParseError, path.string() + ": no data rows");
  if (table.header.size() < 2 || table.header[0] != "hour" || table.header[1] != "price")
    fail(Errc::ParseError, path.string() + ": header must start with 'hour,price'");
  check_hours_column(table, path);

  const std::string prefix = "inflow_";
  std::vector<int> column_res(table.header.size(), -1);
  std::vector<bool> seen(model.n_reservoirs(), false);
  for (std::size_t c = 2; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name.rfind(prefix, 0) != 0)
      fail(Errc::ColumnMismatch, path.string() + ": unexpected column '" + name + "'");
    int res = model.reservoir_index(name.substr(prefix.size()));
    if (res < 0)
      fail(Errc::ColumnMismatch,
           path.string() + ": column '" + name + "' names no reservoir in the model");
    if (seen[res])
      fail(Errc::ColumnMismatch, path.string() + ": duplicate column '" + name + "'");
    seen[res] = true;
    column_res[c] = res;
  }
  for (int res = 0; res < model.n_reservoirs(); ++res)
    if (!seen[res])
      fail(Errc::ColumnMismatch, path.string() + ": missing column 'inflow_" +
                                     model.reservoirs()[res].id + "'");

  Scenario scenario;
  scenario.n_hours = static_cast<int>(table.rows.size());
  scenario.prices.reserve(table.rows.size());
  scenario.inflows.assign(model.n_reservoirs(),
                          std::vector<double>(table.rows.size(), 0.0));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    scenario.prices.push_back(table.rows[i][1]);
    for (std::size_t c = 2; c < table.header.size(); ++c)
      scenario.inflows[column_res[c]][i] = table.rows[i][c];
  }
  validate_scenario(model, scenario);
  return scenario;
}

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(Errc::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace

void save_scenario(const std::filesystem::path& path, const ValidatedModel& model,
                   const Scenario& scenario) {
  std::ofstream out = open_out(path);
  out << "hour,price";
  for (const Reservoir& r : model.reservoirs()) out << ",inflow_" << r.id;
  out << "\n";
  for (int k = 0; k < scenario.n_hours; ++k) {
    out << (k + 1) << ',' << fixed4(scenario.prices[k]);
    for (int res = 0; res < model.n_reservoirs(); ++res)
      out << ',' << fixed4(scenario.inflows[res][k]);
    out << "\n";
  }
  finish(out, path);
}

Schedule load_schedule(const std::filesystem::path& path, const ValidatedModel& model) {
  CsvTable table = read_csv(path);
  if (table.rows.empty()) fail(Errc::ParseError, path.string() + ": no data rows");
  if (table.header.size() < 2 || table.header[0] != "hour" || table.header[1] != "price")
    fail(Errc::ParseError, path.string() + ": header must start with 'hour,price'");
  check_hours_column(table, path);

  std::vector<int> turbine_col(model.n_plants(), -1);
  std::vector<int> spill_col(model.n_reservoirs(), -1);
  for (std::size_t c = 2; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name.rfind("x_", 0) == 0) {
      int p = model.plant_index(name.substr(2));
      if (p < 0)
        fail(Errc::ColumnMismatch, path.string() + ": column '" + name + "' names no plant");
      if (turbine_col[p] >= 0)
        fail(Errc::ColumnMismatch, path.string() + ": duplicate column '" + name + "'");
      turbine_col[p] = static_cast<int>(c);
    } else if (name.rfind("y_", 0) == 0) {
      int res = model.reservoir_index(name.substr(2));
      if (res < 0)
        fail(Errc::ColumnMismatch, path.string() + ": column '" + name + "' names no reservoir");
      if (spill_col[res] >= 0)
        fail(Errc::ColumnMismatch, path.string() + ": duplicate column '" + name + "'");
      spill_col[res] = static_cast<int>(c);
    } else {
      fail(Errc::ColumnMismatch, path.string() + ": unexpected column '" + name + "'");
    }
  }
  for (int p = 0; p < model.n_plants(); ++p)
    if (turbine_col[p] < 0)
      fail(Errc::ColumnMismatch,
           path.string() + ": missing column 'x_" + model.plants()[p].id + "'");

  const int n = static_cast<int>(table.rows.size());
  Schedule schedule = Schedule::zeros(model.n_plants(), model.n_reservoirs(), n);
  for (int k = 0; k < n; ++k) {
    for (int p = 0; p < model.n_plants(); ++p)
      schedule.turbine[p][k] = table.rows[k][turbine_col[p]];
    for (int res = 0; res < model.n_reservoirs(); ++res)
      if (spill_col[res] >= 0) schedule.spill[res][k] = table.rows[k][spill_col[res]];
  }
  return schedule;
}

void emit_results(const std::filesystem::path& out_dir, const ValidatedModel& model,
                  const Scenario& scenario, const Schedule& schedule,
                  const VolumeTrajectory& trajectory, const FeasibilityReport& report,
                  double objective, const std::string& status, const SlpTrace* slp) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Errc::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());
  const int n = scenario.n_hours;

  std::vector<int> spilling;
  for (int res = 0; res < model.n_reservoirs(); ++res)
    if (model.reservoirs()[res].spill.allowed) spilling.push_back(res);

  {
    auto path = out_dir / "schedule.csv";
    std::ofstream out = open_out(path);
    out << "hour,price";
    for (const Plant& p : model.plants()) out << ",x_" << p.id;
    for (int res : spilling) out << ",y_" << model.reservoirs()[res].id;
    out << "\n";
    for (int k = 0; k < n; ++k) {
      out << (k + 1) << ',' << fixed4(scenario.prices[k]);
      for (int p = 0; p < model.n_plants(); ++p) out << ',' << fixed4(schedule.turbine[p][k]);
      for (int res : spilling) out << ',' << fixed4(schedule.spill[res][k]);
      out << "\n";
    }
    finish(out, path);
  }

  {
    auto path = out_dir / "volumes.csv";
    std::ofstream out = open_out(path);
    out << "hour";
    for (const Reservoir& r : model.reservoirs()) out << ",V_" << r.id;
    out << "\n";
    char buf[64];
    for (int k = 0; k <= n; ++k) {
      out << k;
      for (int res = 0; res < model.n_reservoirs(); ++res) {
        std::snprintf(buf, sizeof buf, "%.3f", trajectory.volumes[res][k]);
        out << ',' << buf;
      }
      out << "\n";
    }
    finish(out, path);
  }

  {
    auto path = out_dir / "plot_data.csv";
    std::ofstream out = open_out(path);
    out << "hour,series,value\n";
    for (int k = 0; k < n; ++k)
      out << (k + 1) << ",price," << fixed4(scenario.prices[k]) << "\n";
    for (int p = 0; p < model.n_plants(); ++p)
      for (int k = 0; k < n; ++k)
        out << (k + 1) << ",turbine." << model.plants()[p].id << ','
            << fixed4(schedule.turbine[p][k]) << "\n";
    for (int res : spilling)
      for (int k = 0; k < n; ++k)
        out << (k + 1) << ",spill." << model.reservoirs()[res].id << ','
            << fixed4(schedule.spill[res][k]) << "\n";
    char buf[64];
    for (int res = 0; res < model.n_reservoirs(); ++res)
      for (int k = 0; k <= n; ++k) {
        std::snprintf(buf, sizeof buf, "%.3f", trajectory.volumes[res][k]);
        out << k << ",volume." << model.reservoirs()[res].id << ',' << buf << "\n";
      }
    finish(out, path);
  }

  {
    nlohmann::json j;
    j["objective"] = objective;
    j["status"] = status;
    j["feasible"] = report.feasible;
    for (int p = 0; p < model.n_plants(); ++p) {
      double total = 0.0;
      for (double v : schedule.turbine[p]) total += v;
      j["totals"]["turbine"][model.plants()[p].id] = total;
    }
    for (int res = 0; res < model.n_reservoirs(); ++res) {
      double total = 0.0;
      for (double v : schedule.spill[res]) total += v;
      j["totals"]["spill"][model.reservoirs()[res].id] = total;
    }
    if (slp) {
      j["slp"]["iterations"] = slp->steps.size();
      j["slp"]["final_step"] = slp->steps.empty() ? 0.0 : slp->steps.back().step;
      j["slp"]["converged"] = slp->converged;
    }
    auto path = out_dir / "summary.json";
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
    finish(out, path);
  }
}

}  // namespace hydro
